use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{k_nearest, sample_direction, sample_ppp, Deployment, NeighborList, Point, Trajectory, Window};
use crate::rng::{derive_seed, stream};
use crate::scenario::ScenarioParams;

/// The serving group-cell of one UE.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCellState {
    /// Cooperating BSs, ascending by distance at the last handover.
    pub members: NeighborList,
    /// Protection radius: the largest member distance at the last handover.
    pub r_m: f64,
    pub skip_done: bool,
}

impl GroupCellState {
    pub fn new(members: NeighborList) -> Result<Self> {
        let r_m = members
            .last_distance()
            .ok_or_else(|| Error::param("members", "group-cell must not be empty"))?;
        Ok(GroupCellState {
            members,
            r_m,
            skip_done: false,
        })
    }

    /// Attaches to the `m` nearest BSs of `ue`.
    pub fn attach(deployment: &Deployment, ue: Point, m: usize) -> Result<Self> {
        Self::new(k_nearest(deployment, ue, m)?)
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn member_ids(&self) -> Vec<usize> {
        self.members.sorted_ids()
    }
}

/// Recomputes the `M`-nearest set at `ue`. A handover occurs iff the set
/// (not its order) changed; the members and `r_M` are refreshed only then.
pub fn gcho_step(state: &GroupCellState, deployment: &Deployment, ue: Point) -> Result<(GroupCellState, bool)> {
    let m = state.m();
    if deployment.len() <= m {
        return Err(Error::InsufficientPoints {
            requested: m + 1,
            available: deployment.len(),
        });
    }
    let nearest = k_nearest(deployment, ue, m)?;
    if nearest.sorted_ids() == state.member_ids() {
        return Ok((state.clone(), false));
    }
    let next = GroupCellState {
        skip_done: state.skip_done,
        ..GroupCellState::new(nearest)?
    };
    Ok((next, true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Skip,
    Handover,
}

/// Skips iff the nearest entering BS is inside the protection radius, the
/// second one is at most twice as far, and the previous event was not a skip.
pub fn gchos_decision(r_m: f64, r1_i: f64, r2_i: f64, skip_done: bool) -> Decision {
    if r1_i < r_m && r2_i <= 2.0 * r1_i && !skip_done {
        Decision::Skip
    } else {
        Decision::Handover
    }
}

/// Handover counts of one trajectory under every policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HandoverCounts {
    pub gcho: u64,
    pub gchos: u64,
    pub traditional: u64,
    pub fr: u64,
    /// Skipped GCHO-S events (not handovers).
    pub skips: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub handovers_gcho: u64,
    pub handovers_gchos: u64,
    pub handovers_traditional: u64,
    pub handovers_fr: u64,
    pub skips: u64,
    /// Simulated time (s).
    pub duration: f64,
    /// Path length (m).
    pub trajectory_length: f64,
    /// Trajectories redrawn because they left the guarded region.
    pub rejections: u32,
}

/// First `m` ids of `list`, leaving out `exclude`, sorted by id.
fn group_ids(list: &NeighborList, m: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut ids: Vec<usize> = list
        .indices
        .iter()
        .copied()
        .filter(|&id| Some(id) != exclude)
        .take(m)
        .collect();
    ids.sort_unstable();
    ids
}

/// GCHO-S state: the serving set plus the BS skipped at the last SKIP.
#[derive(Debug, Clone)]
struct SkipTracker {
    serving: Vec<usize>,
    blacklist: Option<usize>,
    skip_done: bool,
}

impl SkipTracker {
    /// Advances to a new position given its `M + 2` nearest BSs. `crossing`
    /// is true when the UE has just crossed a group-cell boundary (the
    /// `M`-nearest set changed); only then is a decision taken.
    fn step(
        &mut self,
        deployment: &Deployment,
        ue: Point,
        list: &NeighborList,
        m: usize,
        crossing: bool,
    ) -> Option<Decision> {
        if !crossing {
            if self.blacklist.is_some() {
                // skip phase: the M nearest other than the skipped BS keep serving
                self.serving = group_ids(list, m, self.blacklist);
            }
            return None;
        }
        let r_m = self
            .serving
            .iter()
            .map(|&id| deployment.point(id).distance(ue))
            .fold(0.0, f64::max);
        let mut outsiders = list
            .indices
            .iter()
            .zip(&list.distances)
            .filter(|(id, _)| self.serving.binary_search(id).is_err());
        // `list` holds M + 2 BSs and at most M are serving.
        let (&b1, &r1) = outsiders.next().expect("two non-members in an (M+2)-list");
        let (_, &r2) = outsiders.next().expect("two non-members in an (M+2)-list");
        let decision = gchos_decision(r_m, r1, r2, self.skip_done);
        match decision {
            Decision::Skip => {
                self.blacklist = Some(b1);
                self.skip_done = true;
                self.serving = group_ids(list, m, Some(b1));
            }
            Decision::Handover => {
                self.blacklist = None;
                self.skip_done = false;
                self.serving = group_ids(list, m, None);
            }
        }
        Some(decision)
    }
}

/// Runs all four policies along `trajectory` on one deployment.
///
/// - GCHO: change of the `m`-nearest set.
/// - GCHO-S: every GCHO boundary crossing is a decision point for
///   [`gchos_decision`]. A SKIP is free: the nearest entering BS is left out
///   and the `m` nearest others serve until the next executed handover.
/// - Traditional: change of the nearest BS.
/// - Fixed region: change of the set of BSs within `fr_radius` of the UE.
pub fn simulate_trajectory(
    deployment: &Deployment,
    trajectory: &Trajectory,
    m: usize,
    fr_radius: f64,
) -> Result<HandoverCounts> {
    if m == 0 {
        return Err(Error::param("m_group", "must be >= 1"));
    }
    let k = m + 2;
    let mut positions = trajectory.positions();
    let start = positions.next().expect("trajectory has a start");
    let list = k_nearest(deployment, start, k)?;
    let mut gcho = group_ids(&list, m, None);
    let mut nearest = list.indices[0];
    let mut skip = SkipTracker {
        serving: gcho.clone(),
        blacklist: None,
        skip_done: false,
    };
    let mut fr = deployment.within_radius(start, fr_radius);
    let mut counts = HandoverCounts::default();
    for ue in positions {
        let list = k_nearest(deployment, ue, k)?;
        let ids = group_ids(&list, m, None);
        let crossing = ids != gcho;
        if crossing {
            counts.gcho += 1;
            gcho = ids;
        }
        if list.indices[0] != nearest {
            counts.traditional += 1;
            nearest = list.indices[0];
        }
        match skip.step(deployment, ue, &list, m, crossing) {
            Some(Decision::Handover) => counts.gchos += 1,
            Some(Decision::Skip) => counts.skips += 1,
            None => {}
        }
        let disk = deployment.within_radius(ue, fr_radius);
        if disk != fr {
            counts.fr += 1;
            fr = disk;
        }
    }
    Ok(counts)
}

/// Radius of the fixed-region baseline disk, `sqrt(M / (pi lambda))`.
pub fn fixed_region_radius(lambda: f64, m: u32) -> f64 {
    (m as f64 / (PI * lambda)).sqrt()
}

const MAX_PLACEMENTS: u32 = 10_000;

/// Drops a deployment, draws a straight trajectory inside the guarded
/// region and counts handovers under every policy.
pub fn run_handover_trial(scenario: &ScenarioParams, seed: u64) -> Result<TrialResult> {
    scenario.validate()?;
    let window = Window::centered(scenario.window_radius())?;
    let deployment = sample_ppp(scenario.lambda_bs, window, derive_seed(seed, 0))?;
    let m = scenario.m_group as usize;
    if deployment.len() < m + 2 {
        return Err(Error::InsufficientPoints {
            requested: m + 2,
            available: deployment.len(),
        });
    }
    let room = scenario.window_radius() - scenario.guard();
    let length = scenario.trajectory_length();
    let mut rng = stream(derive_seed(seed, 1));
    let mut rejections = 0;
    let trajectory = loop {
        if rejections >= MAX_PLACEMENTS {
            return Err(Error::Placement {
                attempts: rejections as usize,
                reason: format!("no trajectory of length {length} fits within radius {room}"),
            });
        }
        let start = window
            .center()
            .offset(2.0 * PI * rng.random::<f64>(), room * rng.random::<f64>().sqrt());
        let direction = sample_direction(&mut rng);
        let t = Trajectory::new(start, direction, scenario.speed, scenario.duration(), scenario.step())?;
        if t.end().distance(window.center()) <= room {
            break t;
        }
        rejections += 1;
    };
    let counts = simulate_trajectory(
        &deployment,
        &trajectory,
        m,
        fixed_region_radius(scenario.lambda_bs, scenario.m_group),
    )?;
    Ok(TrialResult {
        handovers_gcho: counts.gcho,
        handovers_gchos: counts.gchos,
        handovers_traditional: counts.traditional,
        handovers_fr: counts.fr,
        skips: counts.skips,
        duration: trajectory.duration,
        trajectory_length: trajectory.length(),
        rejections,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Total handovers over total time (1/s).
    pub mean: f64,
    /// Normal-approximation 95 % half-width; infinite for a single trial.
    pub half_width_95: f64,
    pub trials: u64,
}

impl RateEstimate {
    /// From integer sums of per-trial counts `N` and `N²`, each trial lasting `duration`.
    pub fn from_sums(sum: u64, sum_sq: u128, trials: u64, duration: f64) -> Self {
        let n = trials as f64;
        let mean_count = sum as f64 / n;
        let half_width_95 = if trials < 2 {
            f64::INFINITY
        } else {
            // exact integer numerator n ΣN² − (ΣN)²
            let num = (trials as u128 * sum_sq).saturating_sub(sum as u128 * sum as u128);
            let var = num as f64 / (n * (n - 1.0));
            1.96 * (var / n).sqrt() / duration
        };
        RateEstimate {
            mean: mean_count / duration,
            half_width_95,
            trials,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Gcho,
    GchoS,
    Traditional,
    FixedRegion,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Gcho, Policy::GchoS, Policy::Traditional, Policy::FixedRegion];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Gcho => "gcho",
            Policy::GchoS => "gchos",
            Policy::Traditional => "traditional",
            Policy::FixedRegion => "fr_baseline_disk",
        }
    }
}

/// Integer tallies over trials; combining is exact and order-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub trials: u64,
    pub sum: [u64; 4],
    pub sum_sq: [u128; 4],
    pub skips: u64,
    pub rejections: u64,
    /// Trials where GCHO-S executed more handovers than GCHO.
    pub dominance_violations: u64,
}

impl Tally {
    fn single(r: &TrialResult) -> Self {
        let counts = [r.handovers_gcho, r.handovers_gchos, r.handovers_traditional, r.handovers_fr];
        Tally {
            trials: 1,
            sum: counts,
            sum_sq: counts.map(|c| c as u128 * c as u128),
            skips: r.skips,
            rejections: r.rejections as u64,
            dominance_violations: (r.handovers_gchos > r.handovers_gcho) as u64,
        }
    }

    fn combine(mut self, other: Self) -> Self {
        self.trials += other.trials;
        for i in 0..4 {
            self.sum[i] += other.sum[i];
            self.sum_sq[i] += other.sum_sq[i];
        }
        self.skips += other.skips;
        self.rejections += other.rejections;
        self.dominance_violations += other.dominance_violations;
        self
    }
}

/// Rate estimates for every policy over a batch of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoverRates {
    pub tally: Tally,
    pub duration: f64,
}

impl HandoverRates {
    pub fn rate(&self, policy: Policy) -> RateEstimate {
        let i = policy as usize;
        RateEstimate::from_sums(self.tally.sum[i], self.tally.sum_sq[i], self.tally.trials, self.duration)
    }

    pub fn gcho(&self) -> RateEstimate {
        self.rate(Policy::Gcho)
    }

    pub fn gchos(&self) -> RateEstimate {
        self.rate(Policy::GchoS)
    }

    pub fn traditional(&self) -> RateEstimate {
        self.rate(Policy::Traditional)
    }

    pub fn fr(&self) -> RateEstimate {
        self.rate(Policy::FixedRegion)
    }

    /// Executed GCHO-S handovers per GCHO handover (ratio of totals).
    pub fn skip_ratio(&self) -> f64 {
        self.tally.sum[1] as f64 / self.tally.sum[0] as f64
    }
}

/// Runs `trials` independent trials with seeds `derive_seed(base_seed, index)`.
pub fn estimate_handover_rates(
    scenario: &ScenarioParams,
    trials: u64,
    base_seed: u64,
    exec: Execution,
) -> Result<HandoverRates> {
    scenario.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    let tally = exec.try_map_reduce(
        trials,
        Tally::default(),
        |i| run_handover_trial(scenario, derive_seed(base_seed, i)).map(|r| Tally::single(&r)),
        Tally::combine,
    )?;
    if tally.rejections > 0 {
        log::debug!("{} trajectory placements rejected over {trials} trials", tally.rejections);
    }
    Ok(HandoverRates {
        tally,
        duration: scenario.duration(),
    })
}

/// Empirical GCHO handover rate `E(N) / E(dt)`.
pub fn estimate_handover_rate(scenario: &ScenarioParams, trials: u64, base_seed: u64) -> Result<RateEstimate> {
    estimate_handover_rates(scenario, trials, base_seed, Execution::default()).map(|r| r.gcho())
}
