use std::collections::BTreeMap;
use std::io::Write;

use super::{format_sig, set_field, RunOptions};
use crate::analytics::{
    ase_cost, cost_aware_coverage, coverage_probability, handover_cost, handover_rate_gcho,
    k_integral_quadrature, optimal_cluster_size, toeplitz_state, Scheme,
};
use crate::error::{Error, Result};
use crate::scenario::ScenarioParams;
use crate::simulator::{coverage_oracle_model, estimate_handover_rates, HandoverRates};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// `|observed - expected| <= tolerance`.
    Within,
    /// `observed >= expected`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub kind: CheckKind,
}

impl CheckResult {
    pub fn within(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            expected,
            observed,
            tolerance,
            kind: CheckKind::Within,
        }
    }

    pub fn at_least(name: impl Into<String>, expected: f64, observed: f64) -> Self {
        CheckResult {
            name: name.into(),
            expected,
            observed,
            tolerance: 0.0,
            kind: CheckKind::AtLeast,
        }
    }

    pub fn passed(&self) -> bool {
        match self.kind {
            CheckKind::Within => (self.observed - self.expected).abs() <= self.tolerance,
            CheckKind::AtLeast => self.observed >= self.expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["check", "expected", "observed", "tolerance", "status"]).map_err(io)?;
        for c in &self.checks {
            let tol = match c.kind {
                CheckKind::Within => format_sig(c.tolerance),
                CheckKind::AtLeast => "min".to_string(),
            };
            let status = if c.passed() { "PASS" } else { "FAIL" };
            w.write_record([c.name.clone(), format_sig(c.expected), format_sig(c.observed), tol, status.into()])
                .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Names of the checks [`validate`] always runs, in report order.
pub const REGISTERED_CHECKS: &[&str] = &[
    "rate_reduction_m3",
    "rate_reduction_m6",
    "rate_reduction_m9",
    "gchos_over_gcho_analytic",
    "k0_closed_form",
    "toeplitz_routes",
    "coverage_vs_model_oracle",
    "m_opt_ratio",
    "ase_gap_equals_d_cost",
    "sim_gcho_rate_m1",
    "sim_gcho_rate_m3",
    "sim_gcho_rate_m6",
    "sim_gcho_rate_m9",
    "sim_m_slope",
    "sim_lambda_slope",
    "sim_gchos_ratio",
    "sim_fr_separation",
    "sim_policy_dominance",
    "sim_step_convergence",
];

fn named<T>(check: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Numerical { context, detail } => Error::numerical(format!("check {check}: {context}"), detail),
        other if other.is_config() => other,
        other => Error::numerical(format!("check {check}"), other.to_string()),
    })
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

struct SimCache<'a> {
    base: &'a ScenarioParams,
    opts: &'a RunOptions,
    runs: Vec<(ScenarioParams, HandoverRates)>,
}

impl SimCache<'_> {
    fn get(&mut self, check: &str, s: ScenarioParams) -> Result<HandoverRates> {
        if let Some((_, r)) = self.runs.iter().find(|(k, _)| *k == s) {
            return Ok(*r);
        }
        named(check, s.validate())?;
        let r = named(check, estimate_handover_rates(&s, self.base.trials, self.base.seed, self.opts.exec))?;
        self.runs.push((s, r));
        Ok(r)
    }
}

/// Runs every registered check on `scenario`, then compares against a
/// golden `key=value` file if given. Golden keys are either scenario fields
/// (must equal the scenario's value) or check names (observed value must
/// match within that check's tolerance).
pub fn validate(
    scenario: &ScenarioParams,
    golden: Option<&BTreeMap<String, String>>,
    opts: &RunOptions,
) -> Result<ValidationReport> {
    scenario.validate()?;
    let s = scenario;
    let mut checks = Vec::new();

    let h1 = handover_rate_gcho(s.speed, s.lambda_bs, 1)?;
    for (m, want) in [(3u32, 0.423), (6, 0.592), (9, 0.667)] {
        let h = handover_rate_gcho(s.speed, s.lambda_bs, m)?;
        checks.push(CheckResult::within(format!("rate_reduction_m{m}"), want, 1.0 - h / h1, 1e-3));
    }
    let ratio = Scheme::GchoS.handover_rate(s.speed, s.lambda_bs, s.m_group)?
        / Scheme::Gcho.handover_rate(s.speed, s.lambda_bs, s.m_group)?;
    checks.push(CheckResult::within("gchos_over_gcho_analytic", 0.5, ratio, 1e-12));

    let k0 = named("k0_closed_form", k_integral_quadrature(0, 1.0, 4.0, 1e-12))?;
    checks.push(CheckResult::within("k0_closed_form", std::f64::consts::FRAC_PI_4, k0, 1e-8));

    let cp = named("toeplitz_routes", s.coverage_params())?;
    let mut worst: f64 = 0.0;
    for m in 1..=9u32 {
        let p = crate::analytics::CoverageParams { m, ..cp };
        for &r in &[0.25, 0.5, 1.0, 2.0, 4.0] {
            let st = named("toeplitz_routes", toeplitz_state(r * s.length_scale(), &p))?;
            let solved = named("toeplitz_routes", st.matrix_solve(st.a_values[0]))?;
            let tail: f64 = solved.iter().skip(1).sum();
            worst = worst.max((tail - st.tail_sum()).abs());
        }
    }
    checks.push(CheckResult::within("toeplitz_routes", 0.0, worst, 1e-10));

    let p = named("coverage_vs_model_oracle", coverage_probability(&cp))?;
    let q = named("coverage_vs_model_oracle", coverage_oracle_model(&cp, s.coverage_trials, s.seed))?;
    checks.push(CheckResult::within("coverage_vs_model_oracle", p, q, 0.01));

    let costs = s.costs()?;
    let g = optimal_cluster_size(Scheme::Gcho, &costs, s.speed, s.lambda_bs)?;
    let gs = optimal_cluster_size(Scheme::GchoS, &costs, s.speed, s.lambda_bs)?;
    checks.push(CheckResult::within("m_opt_ratio", 4f64.powf(-1.0 / 3.0), gs.continuous / g.continuous, 1e-12));

    let d = handover_cost(s.t_h, handover_rate_gcho(s.speed, s.lambda_bs, s.m_group)?)?.fraction.min(1.0);
    let stationary = ase_cost(s.lambda_bs, s.tau_linear(), cost_aware_coverage(p, false, d)?)?;
    let mobile = ase_cost(s.lambda_bs, s.tau_linear(), cost_aware_coverage(p, true, d)?)?;
    let gap = if stationary > 0.0 { (stationary - mobile) / stationary } else { d };
    checks.push(CheckResult::within("ase_gap_equals_d_cost", d, gap, 1e-12));

    let mut sims = SimCache {
        base: s,
        opts,
        runs: Vec::new(),
    };
    let mut logm = Vec::new();
    let mut logh = Vec::new();
    for m in [1u32, 3, 6, 9] {
        let name = format!("sim_gcho_rate_m{m}");
        let r = sims.get(&name, ScenarioParams { m_group: m, ..s.clone() })?;
        let a = handover_rate_gcho(s.speed, s.lambda_bs, m)?;
        let e = r.gcho().mean;
        checks.push(CheckResult::within(name, a, e, 0.15 * a));
        logm.push((m as f64).ln());
        logh.push(e.ln());
    }
    checks.push(CheckResult::within("sim_m_slope", -0.5, ols_slope(&logm, &logh), 0.07));

    let mut logl = Vec::new();
    let mut logh = Vec::new();
    for lambda in [1e-3, 3e-3, 1e-2] {
        let r = sims.get("sim_lambda_slope", ScenarioParams { lambda_bs: lambda, ..s.clone() })?;
        logl.push(f64::ln(lambda));
        logh.push(r.gcho().mean.ln());
    }
    checks.push(CheckResult::within("sim_lambda_slope", 0.5, ols_slope(&logl, &logh), 0.05));

    let own = sims.get("sim_gchos_ratio", s.clone())?;
    checks.push(CheckResult::within("sim_gchos_ratio", 0.5, own.skip_ratio(), 0.05));
    let (fr, gc) = (own.fr(), own.gcho());
    let separation = (fr.mean - gc.mean) / fr.half_width_95.max(gc.half_width_95);
    checks.push(CheckResult::at_least("sim_fr_separation", 3.0, separation));
    checks.push(CheckResult::within(
        "sim_policy_dominance",
        0.0,
        own.tally.dominance_violations as f64,
        0.0,
    ));
    let half = sims.get(
        "sim_step_convergence",
        ScenarioParams {
            step: Some(0.5 * s.step()),
            ..s.clone()
        },
    )?;
    let change = (half.tally.sum[0] as f64 - own.tally.sum[0] as f64).abs() / own.tally.sum[0].max(1) as f64;
    checks.push(CheckResult::within("sim_step_convergence", 0.0, change, 0.01));

    debug_assert_eq!(
        checks.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(),
        REGISTERED_CHECKS
    );

    if let Some(golden) = golden {
        checks.extend(golden_checks(s, golden, &checks)?);
    }
    Ok(ValidationReport { checks })
}

fn golden_checks(
    s: &ScenarioParams,
    golden: &BTreeMap<String, String>,
    computed: &[CheckResult],
) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (key, value) in golden {
        let want: f64 = value
            .parse()
            .map_err(|_| Error::Config(format!("golden `{key}`: cannot parse `{value}` as a number")))?;
        if let Some(c) = computed.iter().find(|c| c.name == *key) {
            let tol = match c.kind {
                CheckKind::Within => c.tolerance,
                CheckKind::AtLeast => 0.0,
            };
            out.push(CheckResult::within(format!("golden_{key}"), want, c.observed, tol));
        } else {
            // scenario field: parse through the config path for identical rounding
            let mut probe = s.clone();
            set_field(&mut probe, key, value)
                .map_err(|_| Error::Config(format!("golden file: unknown key `{key}`")))?;
            let actual = field_value(s, key);
            let recorded = field_value(&probe, key);
            out.push(CheckResult::within(format!("golden_param_{key}"), recorded, actual, 0.0));
        }
    }
    Ok(out)
}

fn field_value(s: &ScenarioParams, key: &str) -> f64 {
    match key {
        "lambda_bs" => s.lambda_bs,
        "eta1" => s.eta1,
        "eta2" => s.eta2,
        "d_critical" => s.d_critical,
        "speed" => s.speed,
        "m_group" => s.m_group as f64,
        "tau_db" => s.tau_db,
        "t_h" => s.t_h,
        "mu" => s.mu,
        "t_interval" => s.t_interval,
        "s1" => s.s1,
        "s2" => s.s2,
        "trials" => s.trials as f64,
        "coverage_trials" => s.coverage_trials as f64,
        "seed" => s.seed as f64,
        "window_radius" => s.window_radius(),
        "step" => s.step(),
        "duration" => s.duration(),
        _ => f64::NAN,
    }
}
