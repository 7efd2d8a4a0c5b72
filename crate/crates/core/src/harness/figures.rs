use std::fmt;
use std::str::FromStr;

use super::{binomial_ci, db_to_linear, format_sig, set_field, RunOptions, Stopwatch, SweepRow};
use crate::analytics::{
    ase_cost, cost_aware_coverage, coverage_probability, handover_cost, handover_rate_gcho, optimal_cluster_size,
    overall_cost, CoverageParams, Scheme,
};
use crate::error::{Error, Result};
use crate::scenario::ScenarioParams;
use crate::simulator::{coverage_oracle_model_counts, estimate_handover_rates, HandoverRates, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
    Fig13,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::Fig3,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Fig10,
        Preset::Fig11,
        Preset::Fig12,
        Preset::Fig13,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Fig10 => "fig10",
            Preset::Fig11 => "fig11",
            Preset::Fig12 => "fig12",
            Preset::Fig13 => "fig13",
        }
    }

    /// Density used when the sweep does not cover `lambda_bs` and no override is given.
    fn default_density(self) -> f64 {
        match self {
            Preset::Fig12 => 0.005,
            _ => 0.01,
        }
    }

    /// Whether the preset runs Monte Carlo points at default settings.
    pub fn simulates(self) -> bool {
        matches!(
            self,
            Preset::Fig3 | Preset::Fig5 | Preset::Fig6 | Preset::Fig7 | Preset::Fig8 | Preset::Fig9 | Preset::Fig11
        )
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::Config(format!("unknown preset `{s}` (expected one of {})", known.join(", ")))
            })
    }
}

/// Base scenario of a preset with `key=value` overrides applied in order.
pub fn figure_scenario(preset: Preset, overrides: &[(String, String)]) -> Result<ScenarioParams> {
    let mut s = ScenarioParams::with_density(preset.default_density());
    for (k, v) in overrides {
        set_field(&mut s, k, v)?;
    }
    s.validate()?;
    Ok(s)
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

const TAU_GRID_DB: [f64; 7] = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0];
const SPEED_GRID: [f64; 7] = [1.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
const GROUP_SIZES: [u32; 4] = [1, 3, 6, 9];

fn with<F: FnOnce(&mut ScenarioParams)>(base: &ScenarioParams, f: F) -> Result<ScenarioParams> {
    let mut s = base.clone();
    f(&mut s);
    s.validate()?;
    Ok(s)
}

struct Sim {
    rates: HandoverRates,
    runtime_ms: Option<f64>,
}

fn simulate(s: &ScenarioParams, opts: &RunOptions) -> Result<Sim> {
    let clock = Stopwatch::start(opts);
    let rates = estimate_handover_rates(s, s.trials, s.seed, opts.exec)?;
    Ok(Sim {
        rates,
        runtime_ms: clock.elapsed_ms(),
    })
}

fn rate_row(param: &str, value: f64, metric: String, analytic: Option<f64>, sim: &Sim, policy: Policy, scale: f64) -> SweepRow {
    let e = sim.rates.rate(policy);
    SweepRow::simulated(param, value, metric, analytic, scale * e.mean, scale * e.half_width_95, e.trials)
        .with_runtime(sim.runtime_ms)
}

/// Runs one preset sweep on top of `base`.
pub fn run_figure(preset: Preset, base: &ScenarioParams, opts: &RunOptions) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let mut rows = Vec::new();
    match preset {
        Preset::Fig3 => {
            for lambda in [0.001, 0.01] {
                for d in [10.0, 20.0] {
                    let s = with(base, |s| {
                        s.lambda_bs = lambda;
                        s.d_critical = d;
                    })?;
                    coverage_sweep(&s, &format!("coverage_lambda{}_d{}", format_sig(lambda), format_sig(d)), opts, &mut rows)?;
                }
            }
        }
        Preset::Fig5 => {
            for lambda in log_space(1e-4, 1e-2, 9) {
                for m in GROUP_SIZES {
                    let s = with(base, |s| {
                        s.lambda_bs = lambda;
                        s.m_group = m;
                    })?;
                    let a = handover_rate_gcho(s.speed, lambda, m)?;
                    let sim = simulate(&s, opts)?;
                    rows.push(rate_row("lambda_bs", lambda, format!("gcho_rate_m{m}"), Some(a), &sim, Policy::Gcho, 1.0));
                }
            }
        }
        Preset::Fig6 => {
            for speed in SPEED_GRID {
                for m in GROUP_SIZES {
                    let s = with(base, |s| {
                        s.speed = speed;
                        s.m_group = m;
                    })?;
                    let a = handover_rate_gcho(speed, s.lambda_bs, m)?;
                    let sim = simulate(&s, opts)?;
                    rows.push(rate_row("speed", speed, format!("gcho_rate_m{m}"), Some(a), &sim, Policy::Gcho, 1.0));
                }
            }
        }
        Preset::Fig7 => {
            for m in 1..=12u32 {
                let s = with(base, |s| s.m_group = m)?;
                let t_h = s.t_h;
                let a = handover_cost(t_h, handover_rate_gcho(s.speed, s.lambda_bs, m)?)?.fraction;
                let a1 = handover_cost(t_h, handover_rate_gcho(s.speed, s.lambda_bs, 1)?)?.fraction;
                let sim = simulate(&s, opts)?;
                let v = m as f64;
                rows.push(rate_row("m_group", v, "handover_cost_gcho".into(), Some(a), &sim, Policy::Gcho, t_h));
                rows.push(rate_row("m_group", v, "handover_cost_traditional".into(), Some(a1), &sim, Policy::Traditional, t_h));
            }
        }
        Preset::Fig8 => {
            for lambda in [0.001, 0.01] {
                for speed in SPEED_GRID {
                    let s = with(base, |s| {
                        s.lambda_bs = lambda;
                        s.speed = speed;
                    })?;
                    let a = handover_rate_gcho(speed, lambda, s.m_group)?;
                    let sim = simulate(&s, opts)?;
                    let tag = format_sig(lambda);
                    rows.push(rate_row("speed", speed, format!("gcho_rate_lambda{tag}"), Some(a), &sim, Policy::Gcho, 1.0));
                    rows.push(rate_row(
                        "speed",
                        speed,
                        format!("fr_baseline_disk_rate_lambda{tag}"),
                        None,
                        &sim,
                        Policy::FixedRegion,
                        1.0,
                    ));
                }
            }
        }
        Preset::Fig9 => {
            coverage_sweep(base, "coverage_stationary", opts, &mut rows)?;
            for scheme in [Scheme::Gcho, Scheme::GchoS] {
                let d = handover_cost(base.t_h, scheme.handover_rate(base.speed, base.lambda_bs, base.m_group)?)?;
                for tau_db in TAU_GRID_DB {
                    let p = coverage_probability(&tau_params(base, tau_db)?)?;
                    let metric = format!("coverage_mobile_{}", scheme.name());
                    rows.push(SweepRow::analytic("tau_db", tau_db, metric, cost_aware_coverage(p, true, d.fraction.min(1.0))?));
                }
            }
        }
        Preset::Fig10 => {
            for lambda in [0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05] {
                let s = with(base, |s| s.lambda_bs = lambda)?;
                let clock = Stopwatch::start(opts);
                let p = coverage_probability(&s.coverage_params()?)?;
                let d = handover_cost(s.t_h, handover_rate_gcho(s.speed, lambda, s.m_group)?)?.fraction.min(1.0);
                let tau = s.tau_linear();
                let stationary = ase_cost(lambda, tau, cost_aware_coverage(p, false, d)?)?;
                let mobile = ase_cost(lambda, tau, cost_aware_coverage(p, true, d)?)?;
                let ms = clock.elapsed_ms();
                for (metric, v) in [
                    ("ase_stationary", stationary),
                    ("ase_mobile", mobile),
                    ("ase_reduction", (stationary - mobile) / stationary),
                ] {
                    rows.push(SweepRow::analytic("lambda_bs", lambda, metric, v).with_runtime(ms));
                }
            }
        }
        Preset::Fig11 => {
            for speed in SPEED_GRID {
                let s = with(base, |s| s.speed = speed)?;
                let sim = simulate(&s, opts)?;
                let t_h = s.t_h;
                for (scheme, policy) in [(Scheme::Gcho, Policy::Gcho), (Scheme::GchoS, Policy::GchoS)] {
                    let a = handover_cost(t_h, scheme.handover_rate(speed, s.lambda_bs, s.m_group)?)?.fraction;
                    let metric = format!("handover_cost_{}", scheme.name());
                    rows.push(rate_row("speed", speed, metric, Some(a), &sim, policy, t_h));
                }
                rows.push(SweepRow {
                    ci95: None,
                    ..SweepRow::simulated("speed", speed, "gchos_over_gcho", Some(0.5), sim.rates.skip_ratio(), 0.0, s.trials)
                        .with_runtime(sim.runtime_ms)
                });
            }
        }
        Preset::Fig12 => {
            for lambda in [0.001, 0.005, 0.01] {
                let s = with(base, |s| s.lambda_bs = lambda)?;
                let costs = s.costs()?;
                for m in 1..=12u32 {
                    for scheme in [Scheme::Gcho, Scheme::GchoS] {
                        let metric = format!("overall_cost_{}_lambda{}", scheme.name(), format_sig(lambda));
                        let v = overall_cost(scheme, &costs, s.speed, lambda, m)?;
                        rows.push(SweepRow::analytic("m_group", m as f64, metric, v));
                    }
                }
            }
        }
        Preset::Fig13 => {
            let costs = base.costs()?;
            for speed in [5.0, 10.0, 20.0] {
                for lambda in log_space(1e-4, 1e-2, 9) {
                    for scheme in [Scheme::Gcho, Scheme::GchoS] {
                        let opt = optimal_cluster_size(scheme, &costs, speed, lambda)?;
                        let tag = format!("{}_speed{}", scheme.name(), format_sig(speed));
                        rows.push(SweepRow::analytic("lambda_bs", lambda, format!("m_opt_{tag}"), opt.continuous));
                        rows.push(SweepRow::analytic("lambda_bs", lambda, format!("m_opt_int_{tag}"), opt.integer as f64));
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn tau_params(s: &ScenarioParams, tau_db: f64) -> Result<CoverageParams> {
    CoverageParams::new(db_to_linear(tau_db), s.lambda_bs, s.m_group, s.pathloss()?)
}

/// Analytic coverage over the threshold grid plus the model oracle, all
/// thresholds sharing one batch of draws.
fn coverage_sweep(s: &ScenarioParams, metric: &str, opts: &RunOptions, rows: &mut Vec<SweepRow>) -> Result<()> {
    let clock = Stopwatch::start(opts);
    let taus: Vec<f64> = TAU_GRID_DB.iter().map(|&t| db_to_linear(t)).collect();
    let n = s.coverage_trials;
    let hits = coverage_oracle_model_counts(&s.coverage_params()?, &taus, n, s.seed, opts.exec)?;
    let analytic = TAU_GRID_DB
        .iter()
        .map(|&t| coverage_probability(&tau_params(s, t)?))
        .collect::<Result<Vec<_>>>()?;
    let ms = clock.elapsed_ms();
    for ((&tau_db, &h), &a) in TAU_GRID_DB.iter().zip(&hits).zip(&analytic) {
        let q = h as f64 / n as f64;
        rows.push(SweepRow::simulated("tau_db", tau_db, metric, Some(a), q, binomial_ci(q, n), n).with_runtime(ms));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig4".parse::<Preset>().is_err());
    }

    #[test]
    fn log_grid_hits_decades() {
        let g = log_space(1e-4, 1e-2, 9);
        assert_eq!(g.len(), 9);
        assert!((g[4] - 1e-3).abs() < 1e-15);
        assert!((g[8] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn fig12_gchos_minimum_at_three() {
        let base = figure_scenario(Preset::Fig12, &[]).unwrap();
        let rows = run_figure(Preset::Fig12, &base, &RunOptions::bit_exact()).unwrap();
        let curve: Vec<_> = rows
            .iter()
            .filter(|r| r.metric == "overall_cost_gchos_lambda0.005")
            .map(|r| (r.value, r.analytic.unwrap()))
            .collect();
        let best = curve.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert_eq!(best.0, 3.0);
    }

    #[test]
    fn overrides_apply() {
        let s = figure_scenario(Preset::Fig11, &[("m_group".into(), "5".into())]).unwrap();
        assert_eq!(s.m_group, 5);
        assert!(figure_scenario(Preset::Fig11, &[("bogus".into(), "1".into())]).is_err());
    }
}
