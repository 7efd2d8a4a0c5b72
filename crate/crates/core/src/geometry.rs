//! Spatial primitives: Poisson deployments of base stations inside a circular
//! window, k-nearest queries, order-statistic distance laws and straight-line
//! UE trajectories.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{ensure_positive, Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    /// Point reached by moving `length` along `angle` (radians).
    #[inline]
    pub fn offset(self, angle: f64, length: f64) -> Point {
        Point::new(self.x + length * angle.cos(), self.y + length * angle.sin())
    }
}

/// Circular simulation region standing in for the infinite plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    center: Point,
    radius: f64,
}

impl Window {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        ensure_positive("window.radius", radius)?;
        Ok(Window { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Window::new(Point::ORIGIN, radius)
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: Point) -> bool {
        p.distance_sq(self.center) <= self.radius * self.radius
    }
}

/// Guard distance `3/sqrt(pi*lambda)` kept between the UE and the window edge.
pub fn guard_distance(density: f64) -> f64 {
    3.0 / (PI * density).sqrt()
}

/// Ordered result of a k-nearest query: ascending distance, ties broken by BS id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NeighborList {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest distance in the list (the protection radius for a group-cell).
    pub fn last_distance(&self) -> Option<f64> {
        self.distances.last().copied()
    }

    /// Member ids sorted by id, used for set comparison.
    pub fn sorted_ids(&self) -> Vec<usize> {
        let mut ids = self.indices.clone();
        ids.sort_unstable();
        ids
    }
}

/// Uniform bucket grid over the window's bounding square.
#[derive(Debug, Clone)]
struct GridIndex {
    origin: Point,
    cell: f64,
    dim: usize,
    starts: Vec<u32>,
    ids: Vec<u32>,
}

impl GridIndex {
    fn build(points: &[Point], window: &Window, density: f64) -> Self {
        let side = 2.0 * window.radius;
        // about two points per cell
        let target = (2.0 / density).sqrt();
        let dim = ((side / target).ceil() as usize).clamp(1, 4096);
        let cell = side / dim as f64;
        let origin = Point::new(window.center.x - window.radius, window.center.y - window.radius);

        let mut counts = vec![0u32; dim * dim + 1];
        let cells: Vec<usize> = points
            .iter()
            .map(|p| {
                let (cx, cy) = Self::cell_of(origin, cell, dim, *p);
                cy * dim + cx
            })
            .collect();
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut ids = vec![0u32; points.len()];
        for (id, &c) in cells.iter().enumerate() {
            ids[fill[c] as usize] = id as u32;
            fill[c] += 1;
        }
        GridIndex {
            origin,
            cell,
            dim,
            starts: counts,
            ids,
        }
    }

    #[inline]
    fn cell_of(origin: Point, cell: f64, dim: usize, p: Point) -> (usize, usize) {
        let cx = ((p.x - origin.x) / cell).floor();
        let cy = ((p.y - origin.y) / cell).floor();
        let clamp = |v: f64| (v.max(0.0) as usize).min(dim - 1);
        (clamp(cx), clamp(cy))
    }

    #[inline]
    fn bucket(&self, cx: usize, cy: usize) -> &[u32] {
        let c = cy * self.dim + cx;
        &self.ids[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Visits every bucket on the square ring at Chebyshev radius `ring`.
    fn for_ring(&self, cx: usize, cy: usize, ring: usize, mut visit: impl FnMut(&[u32])) {
        let (cx, cy, ring, dim) = (cx as isize, cy as isize, ring as isize, self.dim as isize);
        let inside = |v: isize| v >= 0 && v < dim;
        if ring == 0 {
            visit(self.bucket(cx as usize, cy as usize));
            return;
        }
        for dx in -ring..=ring {
            for dy in [-ring, ring] {
                let (x, y) = (cx + dx, cy + dy);
                if inside(x) && inside(y) {
                    visit(self.bucket(x as usize, y as usize));
                }
            }
        }
        for dy in (-ring + 1)..ring {
            for dx in [-ring, ring] {
                let (x, y) = (cx + dx, cy + dy);
                if inside(x) && inside(y) {
                    visit(self.bucket(x as usize, y as usize));
                }
            }
        }
    }

    /// Lower bound on the distance from `q` to any bucket outside the block of
    /// Chebyshev radius `ring` around `q`'s cell.
    fn clearance(&self, q: Point, cx: usize, cy: usize, ring: usize) -> f64 {
        let lo_x = self.origin.x + (cx as f64 - ring as f64) * self.cell;
        let hi_x = self.origin.x + (cx as f64 + ring as f64 + 1.0) * self.cell;
        let lo_y = self.origin.y + (cy as f64 - ring as f64) * self.cell;
        let hi_y = self.origin.y + (cy as f64 + ring as f64 + 1.0) * self.cell;
        (q.x - lo_x).min(hi_x - q.x).min(q.y - lo_y).min(hi_y - q.y).max(0.0)
    }

    fn max_ring(&self) -> usize {
        self.dim
    }
}

/// A finite realization of the BS Poisson point process. Immutable after
/// sampling and safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct Deployment {
    points: Vec<Point>,
    density: f64,
    window: Window,
    seed: u64,
    index: GridIndex,
}

impl Deployment {
    /// Builds a deployment from explicit coordinates (tests, hand geometry).
    /// Points outside the window are rejected.
    pub fn from_points(points: Vec<Point>, density: f64, window: Window) -> Result<Self> {
        ensure_positive("density", density)?;
        if let Some(p) = points.iter().find(|p| !window.contains(**p)) {
            return Err(Error::param(
                "points",
                format!("({}, {}) lies outside the window", p.x, p.y),
            ));
        }
        let index = GridIndex::build(&points, &window, density);
        Ok(Deployment {
            points,
            density,
            window,
            seed: 0,
            index,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn point(&self, id: usize) -> Point {
        self.points[id]
    }

    /// All BS ids within `radius` of `query` (inclusive), sorted by id.
    pub fn within_radius(&self, query: Point, radius: f64) -> Vec<usize> {
        let r2 = radius * radius;
        let idx = &self.index;
        let (cx, cy) = GridIndex::cell_of(idx.origin, idx.cell, idx.dim, query);
        let mut out = Vec::new();
        let mut ring = 0;
        loop {
            idx.for_ring(cx, cy, ring, |bucket| {
                for &id in bucket {
                    if self.points[id as usize].distance_sq(query) <= r2 {
                        out.push(id as usize);
                    }
                }
            });
            if idx.clearance(query, cx, cy, ring) > radius || ring >= idx.max_ring() {
                break;
            }
            ring += 1;
        }
        out.sort_unstable();
        out
    }
}

/// Samples a homogeneous PPP of `density` (BS/m²) inside `window`.
///
/// The count is Poisson with mean `density * area` and positions are i.i.d.
/// uniform in the disk. Deterministic for a fixed seed.
pub fn sample_ppp(density: f64, window: Window, seed: u64) -> Result<Deployment> {
    ensure_positive("density", density)?;
    ensure_positive("window.radius", window.radius)?;
    let mut rng = rng::stream(seed);
    let mean = density * window.area();
    let count = Poisson::new(mean)
        .map_err(|e| Error::param("density", format!("poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let r = window.radius * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        points.push(window.center.offset(theta, r));
    }
    let index = GridIndex::build(&points, &window, density);
    Ok(Deployment {
        points,
        density,
        window,
        seed,
        index,
    })
}

/// The `k` nearest BSs to `query`, ascending by distance with ties broken by id.
pub fn k_nearest(deployment: &Deployment, query: Point, k: usize) -> Result<NeighborList> {
    let n = deployment.len();
    if k > n {
        return Err(Error::InsufficientPoints {
            requested: k,
            available: n,
        });
    }
    if k == 0 {
        return Ok(NeighborList::default());
    }
    let idx = &deployment.index;
    let (cx, cy) = GridIndex::cell_of(idx.origin, idx.cell, idx.dim, query);
    // (distance², id), kept sorted, at most k entries
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    let mut ring = 0;
    loop {
        idx.for_ring(cx, cy, ring, |bucket| {
            for &id in bucket {
                let id = id as usize;
                let d2 = deployment.points[id].distance_sq(query);
                let entry = (d2, id);
                if best.len() == k {
                    let worst = best[k - 1];
                    if entry.0 > worst.0 || (entry.0 == worst.0 && entry.1 > worst.1) {
                        continue;
                    }
                }
                let pos = best.partition_point(|&(bd, bid)| bd < d2 || (bd == d2 && bid < id));
                best.insert(pos, entry);
                best.truncate(k);
            }
        });
        if best.len() == k {
            let c = idx.clearance(query, cx, cy, ring);
            if best[k - 1].0 <= c * c {
                break;
            }
        }
        if ring >= idx.max_ring() {
            break;
        }
        ring += 1;
    }
    Ok(NeighborList {
        indices: best.iter().map(|&(_, id)| id).collect(),
        distances: best.iter().map(|&(d2, _)| d2.sqrt()).collect(),
    })
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Density of the distance to the `m`-th nearest BS of a PPP:
/// `2 (pi lambda)^m / Gamma(m) * exp(-lambda pi r²) * r^(2m-1)`.
pub fn kth_distance_pdf(r: f64, m: u32, density: f64) -> f64 {
    assert!(m >= 1, "order must be >= 1");
    if r <= 0.0 {
        return 0.0;
    }
    let pl = PI * density;
    let ln = 2f64.ln() + m as f64 * pl.ln() - ln_factorial(m - 1) - pl * r * r
        + (2 * m - 1) as f64 * r.ln();
    ln.exp()
}

/// CDF of the `m`-th nearest distance: `P(Poisson(pi lambda r²) >= m)`.
pub fn kth_distance_cdf(r: f64, m: u32, density: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let x = PI * density * r * r;
    let mut term = (-x).exp();
    let mut below = 0.0;
    for j in 0..m {
        if j > 0 {
            term *= x / j as f64;
        }
        below += term;
    }
    (1.0 - below).clamp(0.0, 1.0)
}

/// Edge-UE distance law used by the coverage integral:
/// `2 (pi lambda)² R³ exp(-pi lambda R²)`.
///
/// Identical to [`kth_distance_pdf`] with `m = 2`.
pub fn edge_distance_pdf(r: f64, density: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let pl = PI * density;
    2.0 * pl * pl * r * r * r * (-pl * r * r).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryParams {
    pub start: Point,
    pub speed: f64,
    pub duration: f64,
    pub step: f64,
}

/// Straight constant-speed UE path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub start: Point,
    /// Heading in `[0, 2pi)`.
    pub direction: f64,
    pub speed: f64,
    pub duration: f64,
    pub step: f64,
}

impl Trajectory {
    pub fn new(start: Point, direction: f64, speed: f64, duration: f64, step: f64) -> Result<Self> {
        ensure_positive("speed", speed)?;
        ensure_positive("duration", duration)?;
        ensure_positive("step", step)?;
        if step > duration {
            return Err(Error::param("step", format!("{step} exceeds duration {duration}")));
        }
        if !(0.0..2.0 * PI).contains(&direction) {
            return Err(Error::param("direction", format!("{direction} outside [0, 2pi)")));
        }
        Ok(Trajectory {
            start,
            direction,
            speed,
            duration,
            step,
        })
    }

    pub fn length(&self) -> f64 {
        self.speed * self.duration
    }

    pub fn position(&self, t: f64) -> Point {
        self.start.offset(self.direction, self.speed * t)
    }

    pub fn end(&self) -> Point {
        self.position(self.duration)
    }

    /// Number of steps; the last one may be shorter than `step`.
    pub fn step_count(&self) -> usize {
        (self.duration / self.step - 1e-9).ceil().max(1.0) as usize
    }

    /// Sample positions at `t = 0, step, 2 step, ..., duration`.
    pub fn positions(&self) -> impl Iterator<Item = Point> + '_ {
        let n = self.step_count();
        (0..=n).map(move |k| {
            let t = if k == n { self.duration } else { k as f64 * self.step };
            self.position(t)
        })
    }
}

/// Draws a heading uniformly in `[0, 2pi)`; deterministic per seed.
pub fn sample_trajectory(params: &TrajectoryParams, seed: u64) -> Result<Trajectory> {
    let mut rng = rng::stream(seed);
    let direction = sample_direction(&mut rng);
    Trajectory::new(params.start, direction, params.speed, params.duration, params.step)
}

pub(crate) fn sample_direction<R: Rng>(rng: &mut R) -> f64 {
    let d = 2.0 * PI * rng.random::<f64>();
    if d >= 2.0 * PI {
        0.0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute_k_nearest(dep: &Deployment, q: Point, k: usize) -> Vec<usize> {
        let mut all: Vec<(f64, usize)> = dep
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.distance_sq(q), i))
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.into_iter().take(k).map(|(_, i)| i).collect()
    }

    fn three_points() -> Deployment {
        let w = Window::centered(50.0).unwrap();
        Deployment::from_points(
            vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(5.0, 10.0)],
            0.01,
            w,
        )
        .unwrap()
    }

    #[test]
    fn k_nearest_hand_geometry() {
        let dep = three_points();
        let nl = k_nearest(&dep, Point::new(2.0, 0.0), 2).unwrap();
        assert_eq!(nl.indices, vec![0, 1]);
        assert_relative_eq!(nl.distances[0], 2.0);
        assert_relative_eq!(nl.distances[1], 8.0);
    }

    #[test]
    fn k_nearest_zero_and_coincident() {
        let dep = three_points();
        assert!(k_nearest(&dep, Point::new(1.0, 1.0), 0).unwrap().is_empty());
        let nl = k_nearest(&dep, Point::new(10.0, 0.0), 1).unwrap();
        assert_eq!(nl.indices, vec![1]);
        assert_eq!(nl.distances[0], 0.0);
    }

    #[test]
    fn k_nearest_rejects_oversized_k() {
        let dep = three_points();
        assert_eq!(
            k_nearest(&dep, Point::ORIGIN, 4),
            Err(Error::InsufficientPoints {
                requested: 4,
                available: 3
            })
        );
    }

    #[test]
    fn ties_break_by_id() {
        let w = Window::centered(20.0).unwrap();
        let dep = Deployment::from_points(
            vec![Point::new(5.0, 0.0), Point::new(-5.0, 0.0), Point::new(0.0, 5.0)],
            0.01,
            w,
        )
        .unwrap();
        let nl = k_nearest(&dep, Point::ORIGIN, 3).unwrap();
        assert_eq!(nl.indices, vec![0, 1, 2]);
    }

    #[test]
    fn grid_matches_brute_force() {
        let dep = sample_ppp(0.01, Window::centered(120.0).unwrap(), 5).unwrap();
        let mut r = rng::stream(9);
        for _ in 0..500 {
            let q = Point::new(r.random_range(-130.0..130.0), r.random_range(-130.0..130.0));
            for k in [1usize, 3, 7, 12] {
                let got = k_nearest(&dep, q, k).unwrap();
                assert_eq!(got.indices, brute_k_nearest(&dep, q, k), "q={q:?} k={k}");
            }
            let radius = r.random_range(0.0..40.0);
            let mut want: Vec<usize> = (0..dep.len())
                .filter(|&i| dep.point(i).distance(q) <= radius)
                .collect();
            want.sort_unstable();
            assert_eq!(dep.within_radius(q, radius), want);
        }
    }

    #[test]
    fn ppp_is_deterministic_per_seed() {
        let w = Window::centered(500.0).unwrap();
        let a = sample_ppp(0.001, w, 7).unwrap();
        let b = sample_ppp(0.001, w, 7).unwrap();
        assert_eq!(a.points(), b.points());
        assert!(a.points().iter().all(|p| w.contains(*p)));
        assert_eq!(a.density(), 0.001);
    }

    #[test]
    fn ppp_rejects_bad_parameters() {
        assert!(Window::centered(0.0).is_err());
        let w = Window::centered(10.0).unwrap();
        assert!(matches!(sample_ppp(0.0, w, 1), Err(Error::Parameter { .. })));
        assert!(matches!(sample_ppp(-1.0, w, 1), Err(Error::Parameter { .. })));
    }

    #[test]
    fn nearest_pdf_reduces_to_rayleigh() {
        let lam = 0.003;
        for r in [0.5, 3.0, 10.0, 25.0] {
            let rayleigh = 2.0 * PI * lam * r * (-PI * lam * r * r).exp();
            assert_relative_eq!(kth_distance_pdf(r, 1, lam), rayleigh, max_relative = 1e-12);
        }
    }

    #[test]
    fn edge_pdf_equals_second_nearest_pdf() {
        for r in [0.1, 2.0, 6.9, 15.0, 40.0] {
            assert_relative_eq!(
                edge_distance_pdf(r, 0.01),
                kth_distance_pdf(r, 2, 0.01),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn edge_pdf_mode() {
        let lam = 0.01;
        let mode = (3.0 / (2.0 * PI * lam)).sqrt();
        assert_relative_eq!(mode, 6.9099, epsilon = 1e-4);
        let h = 1e-4;
        assert!(edge_distance_pdf(mode, lam) > edge_distance_pdf(mode - h, lam));
        assert!(edge_distance_pdf(mode, lam) > edge_distance_pdf(mode + h, lam));
    }

    #[test]
    fn trajectory_basics() {
        let p = TrajectoryParams {
            start: Point::ORIGIN,
            speed: 10.0,
            duration: 10.0,
            step: 0.5,
        };
        let a = sample_trajectory(&p, 3).unwrap();
        let b = sample_trajectory(&p, 3).unwrap();
        assert_eq!(a.direction.to_bits(), b.direction.to_bits());
        assert_relative_eq!(a.length(), 100.0);
        assert_relative_eq!(a.start.distance(a.end()), 100.0, epsilon = 1e-9);
        assert_eq!(a.positions().count(), 21);
    }

    #[test]
    fn trajectory_validation() {
        assert!(Trajectory::new(Point::ORIGIN, 0.0, 0.0, 1.0, 0.1).is_err());
        assert!(Trajectory::new(Point::ORIGIN, 0.0, 1.0, 1.0, 2.0).is_err());
        assert!(Trajectory::new(Point::ORIGIN, 7.0, 1.0, 1.0, 0.1).is_err());
    }
}
