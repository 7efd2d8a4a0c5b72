//! Model constants shared by the analytics, the simulator and the harness.

use std::f64::consts::PI;

use crate::analytics::{CostParams, CoverageParams};
use crate::channel::PathLossParams;
use crate::error::{ensure_positive, Error, Result};
use crate::harness::db_to_linear;

/// One scenario: deployment, channel, mobility, cost and Monte Carlo settings.
///
/// `window_radius`, `step` and `duration` are derived from the density and
/// speed when left unset; see [`ScenarioParams::window_radius`] and friends.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    /// BS density (BS/m²).
    pub lambda_bs: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Critical distance `D` (m).
    pub d_critical: f64,
    /// UE speed (m/s).
    pub speed: f64,
    pub m_group: u32,
    pub tau_db: f64,
    pub t_h: f64,
    pub mu: f64,
    pub t_interval: f64,
    pub s1: f64,
    pub s2: f64,
    /// Handover trials per rate estimate.
    pub trials: u64,
    /// Trials per coverage oracle point.
    pub coverage_trials: u64,
    pub seed: u64,
    pub window_radius: Option<f64>,
    pub step: Option<f64>,
    pub duration: Option<f64>,
}

/// Trajectory length in units of the mean inter-site distance `1/sqrt(lambda)`.
const TRAJECTORY_CELLS: f64 = 20.0;
/// Step length in units of `1/sqrt(pi lambda)`.
const STEP_FRACTION: f64 = 0.02;
/// Largest admissible step length in units of `1/sqrt(pi lambda)`.
const MAX_STEP_FRACTION: f64 = 0.1;

impl ScenarioParams {
    /// Defaults for everything except the density.
    pub fn with_density(lambda_bs: f64) -> Self {
        let t_interval = 0.005;
        ScenarioParams {
            lambda_bs,
            eta1: 2.0,
            eta2: 4.0,
            d_critical: 10.0,
            speed: 10.0,
            m_group: 3,
            tau_db: 0.0,
            t_h: 0.3,
            mu: 1.0,
            t_interval,
            s1: 0.3,
            s2: 0.01 * t_interval,
            trials: 1000,
            coverage_trials: 100_000,
            seed: 1,
            window_radius: None,
            step: None,
            duration: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("lambda_bs", self.lambda_bs)?;
        self.pathloss()?;
        ensure_positive("speed", self.speed)?;
        if self.m_group == 0 {
            return Err(Error::param("m_group", "must be >= 1"));
        }
        if !self.tau_db.is_finite() {
            return Err(Error::param("tau_db", "must be finite"));
        }
        self.costs()?;
        if self.trials == 0 {
            return Err(Error::param("trials", "must be >= 1"));
        }
        if self.coverage_trials == 0 {
            return Err(Error::param("coverage_trials", "must be >= 1"));
        }
        for (name, v) in [
            ("window_radius", self.window_radius),
            ("step", self.step),
            ("duration", self.duration),
        ] {
            if let Some(v) = v {
                ensure_positive(name, v)?;
            }
        }
        let max_step = MAX_STEP_FRACTION / (self.speed * (PI * self.lambda_bs).sqrt());
        if self.step() > max_step {
            return Err(Error::param(
                "step",
                format!("{} exceeds the bound 0.1/(speed sqrt(pi lambda)) = {max_step}", self.step()),
            ));
        }
        if self.step() > self.duration() {
            return Err(Error::param("step", "exceeds duration"));
        }
        let room = self.window_radius() - self.guard();
        if !(2.0 * room >= self.trajectory_length()) {
            return Err(Error::param(
                "window_radius",
                format!(
                    "{} too small: need at least {} for the trajectory plus guard band",
                    self.window_radius(),
                    0.5 * self.trajectory_length() + self.guard()
                ),
            ));
        }
        Ok(())
    }

    pub fn pathloss(&self) -> Result<PathLossParams> {
        PathLossParams::new(self.eta1, self.eta2, self.d_critical)
    }

    pub fn tau_linear(&self) -> f64 {
        db_to_linear(self.tau_db)
    }

    pub fn costs(&self) -> Result<CostParams> {
        CostParams::new(self.t_h, self.s1, self.s2, self.mu, self.t_interval)
    }

    pub fn coverage_params(&self) -> Result<CoverageParams> {
        CoverageParams::new(self.tau_linear(), self.lambda_bs, self.m_group, self.pathloss()?)
    }

    /// `1/sqrt(pi lambda)`, the natural length scale of the deployment.
    pub fn length_scale(&self) -> f64 {
        1.0 / (PI * self.lambda_bs).sqrt()
    }

    /// Simulated time per trajectory (s).
    pub fn duration(&self) -> f64 {
        self.duration
            .unwrap_or(TRAJECTORY_CELLS / (self.lambda_bs.sqrt() * self.speed))
    }

    /// Time step (s).
    pub fn step(&self) -> f64 {
        self.step
            .unwrap_or(STEP_FRACTION * self.length_scale() / self.speed)
    }

    pub fn trajectory_length(&self) -> f64 {
        self.speed * self.duration()
    }

    /// Edge margin that keeps every neighbour query (up to `M + 2` BSs and
    /// the fixed-region disk) clear of the window boundary.
    pub fn guard(&self) -> f64 {
        let k = (self.m_group + 2) as f64;
        (k.sqrt() + 4.0).max(3.0) * self.length_scale()
    }

    /// Simulation window radius (m).
    pub fn window_radius(&self) -> f64 {
        self.window_radius
            .unwrap_or(self.trajectory_length() + self.guard())
    }
}
