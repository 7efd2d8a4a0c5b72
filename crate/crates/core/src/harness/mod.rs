//! Scenario files, figure sweeps, CSV output and validation reports.
//!
//! This is the only place where thresholds are converted between dB and
//! linear units.

mod config;
mod figures;
mod output;
mod validate;

use std::time::Instant;

pub use config::*;
pub use figures::*;
pub use output::*;
pub use validate::*;

use crate::analytics::{
    ase_cost, coverage_probability, cost_aware_coverage, handover_cost, handover_rate_gcho, optimal_cluster_size,
    overall_cost, signaling_overhead, Scheme,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scenario::ScenarioParams;
use crate::simulator::{coverage_oracle_geometric_counts, coverage_oracle_model_counts, estimate_handover_rates, Policy};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Process exit status for an error: 2 for bad input, 3 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        2
    } else {
        3
    }
}

/// Scheduling and reporting options shared by every runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub exec: Execution,
    /// Wall-clock timings make output non-reproducible; off in bit-exact mode.
    pub record_runtime: bool,
}

impl RunOptions {
    /// `threads == 1` is the bit-exact mode: sequential and no timings.
    pub fn from_threads(threads: usize) -> Self {
        RunOptions {
            exec: Execution::from_threads(threads),
            record_runtime: threads != 1,
        }
    }

    pub fn bit_exact() -> Self {
        Self::from_threads(1)
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            exec: Execution::default(),
            record_runtime: true,
        }
    }
}

pub(crate) struct Stopwatch {
    start: Instant,
    enabled: bool,
}

impl Stopwatch {
    pub(crate) fn start(opts: &RunOptions) -> Self {
        Stopwatch {
            start: Instant::now(),
            enabled: opts.record_runtime,
        }
    }

    pub(crate) fn elapsed_ms(&self) -> Option<f64> {
        self.enabled.then(|| self.start.elapsed().as_secs_f64() * 1e3)
    }
}

/// Binomial 95 % half-width.
pub(crate) fn binomial_ci(p: f64, n: u64) -> f64 {
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Closed-form metrics of one scenario.
pub fn run_analytic(s: &ScenarioParams, opts: &RunOptions) -> Result<Vec<SweepRow>> {
    s.validate()?;
    let clock = Stopwatch::start(opts);
    let (lambda, speed, m) = (s.lambda_bs, s.speed, s.m_group);
    let costs = s.costs()?;
    let row = |metric: &str, v: f64| SweepRow::analytic("lambda_bs", lambda, metric, v);
    let mut rows = Vec::new();

    let h = Scheme::Gcho.handover_rate(speed, lambda, m)?;
    let hs = Scheme::GchoS.handover_rate(speed, lambda, m)?;
    let h1 = handover_rate_gcho(speed, lambda, 1)?;
    rows.push(row("gcho_rate", h));
    rows.push(row("gchos_rate", hs));
    rows.push(row("traditional_rate", h1));
    rows.push(row("rate_reduction", 1.0 - h / h1));
    rows.push(row("signaling_overhead", signaling_overhead(s.mu, s.t_interval, m)?));

    let p = coverage_probability(&s.coverage_params()?)?;
    rows.push(row("coverage", p));
    rows.push(row("ase_stationary", ase_cost(lambda, s.tau_linear(), p)?));
    for (scheme, rate) in [(Scheme::Gcho, h), (Scheme::GchoS, hs)] {
        let name = scheme.name();
        let d = handover_cost(s.t_h, rate)?;
        rows.push(row(&format!("handover_cost_{name}"), d.fraction));
        if d.saturated {
            log::warn!("{name}: handover cost saturated, cost-aware metrics omitted");
        } else {
            let pt = cost_aware_coverage(p, true, d.fraction)?;
            rows.push(row(&format!("cost_aware_coverage_{name}"), pt));
            rows.push(row(&format!("ase_{name}"), ase_cost(lambda, s.tau_linear(), pt)?));
        }
        rows.push(row(&format!("overall_cost_{name}"), overall_cost(scheme, &costs, speed, lambda, m)?));
        let opt = optimal_cluster_size(scheme, &costs, speed, lambda)?;
        rows.push(row(&format!("m_opt_{name}"), opt.continuous));
        rows.push(row(&format!("m_opt_{name}_int"), opt.integer as f64));
    }
    let ms = clock.elapsed_ms();
    Ok(rows.into_iter().map(|r| r.with_runtime(ms)).collect())
}

/// Monte Carlo estimates of one scenario next to their closed forms.
pub fn run_simulate(s: &ScenarioParams, opts: &RunOptions) -> Result<Vec<SweepRow>> {
    s.validate()?;
    let (lambda, speed, m) = (s.lambda_bs, s.speed, s.m_group);
    let mut rows = Vec::new();

    let clock = Stopwatch::start(opts);
    let rates = estimate_handover_rates(s, s.trials, s.seed, opts.exec)?;
    let ms = clock.elapsed_ms();
    let analytic = [
        (Policy::Gcho, Some(Scheme::Gcho.handover_rate(speed, lambda, m)?)),
        (Policy::GchoS, Some(Scheme::GchoS.handover_rate(speed, lambda, m)?)),
        (Policy::Traditional, Some(handover_rate_gcho(speed, lambda, 1)?)),
        (Policy::FixedRegion, None),
    ];
    for (policy, a) in analytic {
        let e = rates.rate(policy);
        rows.push(
            SweepRow::simulated("lambda_bs", lambda, format!("{}_rate", policy.name()), a, e.mean, e.half_width_95, e.trials)
                .with_runtime(ms),
        );
    }
    rows.push(SweepRow {
        ci95: None,
        ..SweepRow::simulated("lambda_bs", lambda, "gchos_over_gcho", Some(0.5), rates.skip_ratio(), 0.0, s.trials)
            .with_runtime(ms)
    });

    let cp = s.coverage_params()?;
    let clock = Stopwatch::start(opts);
    let p = coverage_probability(&cp)?;
    let n = s.coverage_trials;
    let hits = coverage_oracle_model_counts(&cp, &[cp.tau], n, s.seed, opts.exec)?[0];
    let q = hits as f64 / n as f64;
    rows.push(
        SweepRow::simulated("lambda_bs", lambda, "coverage_model", Some(p), q, binomial_ci(q, n), n)
            .with_runtime(clock.elapsed_ms()),
    );
    let clock = Stopwatch::start(opts);
    let hits = coverage_oracle_geometric_counts(s, &[cp.tau], n, s.seed, opts.exec)?[0];
    let g = hits as f64 / n as f64;
    rows.push(
        SweepRow::simulated("lambda_bs", lambda, "coverage_geometric", Some(p), g, binomial_ci(g, n), n)
            .with_runtime(clock.elapsed_ms()),
    );
    log::info!("coverage: analytic {p:.4}, model oracle {q:.4}, full geometry {g:.4}");
    Ok(rows)
}
