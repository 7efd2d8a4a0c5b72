//! Dual-slope path loss, Rayleigh fading and SIR for cooperative transmission.
//!
//! Transmit powers are normalised to one; noise is neglected.

use crate::error::{Error, Result};
use crate::geometry::{k_nearest, Deployment, Point};
use crate::rng;

/// Bounded dual-slope path loss parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    eta1: f64,
    eta2: f64,
    critical_distance: f64,
}

impl PathLossParams {
    /// `0 <= eta1 <= eta2`, `critical_distance > 0`.
    pub fn new(eta1: f64, eta2: f64, critical_distance: f64) -> Result<Self> {
        if !(eta1.is_finite() && eta1 >= 0.0) {
            return Err(Error::param("eta1", format!("must be >= 0, got {eta1}")));
        }
        if !(eta2.is_finite() && eta2 >= eta1) {
            return Err(Error::param("eta2", format!("eta1 <= eta2 violated ({eta1} > {eta2})")));
        }
        if !(critical_distance.is_finite() && critical_distance > 0.0) {
            return Err(Error::param(
                "d_critical",
                format!("must be > 0, got {critical_distance}"),
            ));
        }
        Ok(PathLossParams {
            eta1,
            eta2,
            critical_distance,
        })
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn critical_distance(&self) -> f64 {
        self.critical_distance
    }

    /// Continuity constant `D^(eta2 - eta1)`.
    pub fn continuity(&self) -> f64 {
        self.critical_distance.powf(self.eta2 - self.eta1)
    }

    #[inline]
    pub(crate) fn los_gain(&self, r: f64) -> f64 {
        r.powf(-self.eta1)
    }

    #[inline]
    pub(crate) fn nlos_gain(&self, r: f64) -> f64 {
        self.continuity() * r.powf(-self.eta2)
    }
}

/// `r^-eta1` inside the critical distance, `Lambda r^-eta2` beyond it.
pub fn path_loss(r: f64, params: &PathLossParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Singularity(r));
    }
    if r <= params.critical_distance {
        Ok(params.los_gain(r))
    } else {
        Ok(params.nlos_gain(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSample {
    pub signal: f64,
    pub interference: f64,
    pub sir: f64,
}

impl SirSample {
    fn new(signal: f64, interference: f64) -> Self {
        SirSample {
            signal,
            interference,
            sir: signal / interference,
        }
    }
}

/// Source of per-BS channel power gains.
pub trait GainSource {
    fn gain(&self, bs: usize) -> f64;
}

/// Unit-mean exponential gains keyed by `(seed, bs id)`, so a BS sees the same
/// gain however the links are enumerated.
#[derive(Debug, Clone, Copy)]
pub struct RayleighGains {
    pub seed: u64,
}

impl GainSource for RayleighGains {
    fn gain(&self, bs: usize) -> f64 {
        rng::counter_exponential(self.seed, bs as u64)
    }
}

/// All gains equal to one (no fading).
#[derive(Debug, Clone, Copy)]
pub struct UnitGains;

impl GainSource for UnitGains {
    fn gain(&self, _bs: usize) -> f64 {
        1.0
    }
}

impl<F: Fn(usize) -> f64> GainSource for F {
    fn gain(&self, bs: usize) -> f64 {
        self(bs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CooperatorLink {
    /// LoS or NLoS branch picked by each cooperator's own distance.
    Exact,
    /// Every cooperator on the LoS branch.
    LosOnly,
}

fn sir_with(
    deployment: &Deployment,
    ue: Point,
    m: usize,
    params: &PathLossParams,
    gains: &impl GainSource,
    link: CooperatorLink,
) -> Result<SirSample> {
    let n = deployment.len();
    if n <= m {
        return Err(Error::InsufficientPoints {
            requested: m + 1,
            available: n,
        });
    }
    let all = k_nearest(deployment, ue, n)?;
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (rank, (&id, &r)) in all.indices.iter().zip(&all.distances).enumerate() {
        if !(r > 0.0) {
            return Err(Error::Singularity(r));
        }
        let h = gains.gain(id);
        if rank < m {
            let g = match link {
                CooperatorLink::Exact => path_loss(r, params)?,
                CooperatorLink::LosOnly => params.los_gain(r),
            };
            signal += g * h;
        } else {
            interference += params.nlos_gain(r) * h;
        }
    }
    Ok(SirSample::new(signal, interference))
}

/// SIR with the `m` nearest BSs cooperating, each on its own path-loss branch;
/// every other BS interferes on the NLoS branch.
pub fn sir_exact(
    deployment: &Deployment,
    ue: Point,
    m: usize,
    params: &PathLossParams,
    fading_seed: u64,
) -> Result<SirSample> {
    sir_exact_with(deployment, ue, m, params, &RayleighGains { seed: fading_seed })
}

pub fn sir_exact_with(
    deployment: &Deployment,
    ue: Point,
    m: usize,
    params: &PathLossParams,
    gains: &impl GainSource,
) -> Result<SirSample> {
    sir_with(deployment, ue, m, params, gains, CooperatorLink::Exact)
}

/// As [`sir_exact`] but all cooperators are treated as LoS links.
pub fn sir_approx(
    deployment: &Deployment,
    ue: Point,
    m: usize,
    params: &PathLossParams,
    fading_seed: u64,
) -> Result<SirSample> {
    sir_approx_with(deployment, ue, m, params, &RayleighGains { seed: fading_seed })
}

pub fn sir_approx_with(
    deployment: &Deployment,
    ue: Point,
    m: usize,
    params: &PathLossParams,
    gains: &impl GainSource,
) -> Result<SirSample> {
    sir_with(deployment, ue, m, params, gains, CooperatorLink::LosOnly)
}
