use std::f64::consts::PI;

use rand_distr::{Distribution, Exp1};

use crate::analytics::{CoverageParams, ServingDistanceLaw};
use crate::channel::{sir_exact, PathLossParams};
use crate::error::{ensure_positive, Error, Result};
use crate::exec::Execution;
use crate::geometry::{sample_ppp, Window};
use crate::rng::{derive_seed, stream, StreamRng};
use crate::scenario::ScenarioParams;

/// Expected number of interferers drawn explicitly per model trial; the rest
/// of the plane contributes its mean.
const EXPLICIT_INTERFERERS: f64 = 256.0;

/// One SIR draw under the edge-UE model: `R` from the serving-distance law,
/// `M` cooperators at distance `R` on the LoS branch, PPP interferers beyond
/// `R` on the NLoS branch, unit-mean exponential fading everywhere.
#[inline]
fn exp1(rng: &mut StreamRng) -> f64 {
    Exp1.sample(rng)
}

fn model_sir(rng: &mut StreamRng, lambda: f64, m: u32, law: ServingDistanceLaw, pl: &PathLossParams) -> f64 {
    let pl_lambda = PI * lambda;
    let shape_draw: f64 = (0..law.gamma_shape()).map(|_| exp1(rng)).sum::<f64>();
    let r2 = shape_draw / pl_lambda;
    let fading: f64 = (0..m).map(|_| exp1(rng)).sum::<f64>();
    let signal = fading * r2.powf(-0.5 * pl.eta1());

    // Interferers in order of distance: pi lambda (r_k² - R²) is a unit-rate
    // Poisson process.
    let eta2 = pl.eta2();
    let quartic = eta2 == 4.0;
    let mut arrival = 0.0;
    let mut sum = 0.0;
    let mut w2 = r2;
    while arrival < EXPLICIT_INTERFERERS {
        arrival += exp1(rng);
        w2 = r2 + arrival / pl_lambda;
        let h = exp1(rng);
        sum += h * if quartic { 1.0 / (w2 * w2) } else { w2.powf(-0.5 * eta2) };
    }
    // E[sum over r > r_t of r^-eta2] = 2 pi lambda r_t^(2-eta2) / (eta2 - 2)
    let tail = 2.0 * pl_lambda * w2.powf(1.0 - 0.5 * eta2) / (eta2 - 2.0);
    let interference = pl.continuity() * (sum + tail);
    signal / interference
}

/// Trials in which the model SIR exceeds each threshold in `taus`.
pub fn coverage_oracle_model_counts(
    params: &CoverageParams,
    taus: &[f64],
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<u64>> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    for &t in taus {
        if !(t >= 0.0) {
            return Err(Error::param("tau", format!("must be >= 0, got {t}")));
        }
    }
    let law = params.distance_law();
    let pl = params.pathloss;
    let n = taus.len();
    Ok(exec.map_reduce(
        trials,
        vec![0u64; n],
        |i| {
            let mut rng = stream(derive_seed(seed, i));
            let sir = model_sir(&mut rng, params.lambda, params.m, law, &pl);
            taus.iter().map(|&t| (sir > t) as u64).collect()
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    ))
}

/// Coverage fraction at each threshold in `taus`, all from the same draws.
pub fn coverage_oracle_model_curve(
    params: &CoverageParams,
    taus: &[f64],
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    let counts = coverage_oracle_model_counts(params, taus, trials, seed, exec)?;
    Ok(counts.iter().map(|&c| c as f64 / trials as f64).collect())
}

/// Brute-force estimate of `P(SIR > tau)` under the analytic model's own
/// assumptions, independent of the quadrature path.
pub fn coverage_oracle_model(params: &CoverageParams, trials: u64, seed: u64) -> Result<f64> {
    coverage_oracle_model_curve(params, &[params.tau], trials, seed, Execution::default()).map(|v| v[0])
}

/// Window radius for the geometric oracle, in units of `1/sqrt(pi lambda)`.
const GEOMETRIC_WINDOW: f64 = 12.0;

/// Trials in which the full-geometry SIR exceeds each threshold: UE at the
/// window centre, the `M` nearest BSs cooperate on their own path-loss branch.
pub fn coverage_oracle_geometric_counts(
    scenario: &ScenarioParams,
    taus: &[f64],
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<u64>> {
    ensure_positive("lambda_bs", scenario.lambda_bs)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    let pl = scenario.pathloss()?;
    let m = scenario.m_group as usize;
    let window = Window::centered(GEOMETRIC_WINDOW * scenario.length_scale())?;
    let n = taus.len();
    exec.try_map_reduce(
        trials,
        vec![0u64; n],
        |i| {
            let trial_seed = derive_seed(seed, i);
            let dep = sample_ppp(scenario.lambda_bs, window, derive_seed(trial_seed, 0))?;
            let s = sir_exact(&dep, window.center(), m, &pl, derive_seed(trial_seed, 1))?;
            Ok::<_, Error>(taus.iter().map(|&t| (s.sir > t) as u64).collect())
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )
}

/// Empirical coverage under the full geometry at the scenario's threshold.
pub fn coverage_oracle_geometric(scenario: &ScenarioParams, trials: u64, seed: u64) -> Result<f64> {
    let c = coverage_oracle_geometric_counts(scenario, &[scenario.tau_linear()], trials, seed, Execution::default())?;
    Ok(c[0] as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(tau: f64) -> CoverageParams {
        CoverageParams::new(tau, 0.01, 3, PathLossParams::new(2.0, 4.0, 10.0).unwrap()).unwrap()
    }

    #[test]
    fn tiny_threshold_is_always_covered() {
        assert!(coverage_oracle_model(&params(1e-6), 20_000, 4).unwrap() > 0.999);
    }

    #[test]
    fn oracle_is_deterministic() {
        let a = coverage_oracle_model(&params(1.0), 5_000, 11).unwrap();
        let b = coverage_oracle_model(&params(1.0), 5_000, 11).unwrap();
        assert_eq!(a, b);
        let seq = coverage_oracle_model_curve(&params(1.0), &[1.0], 5_000, 11, Execution::Sequential).unwrap();
        assert_eq!(seq[0], a);
    }

    #[test]
    fn curve_decreases_in_threshold() {
        let taus: Vec<f64> = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
            .iter()
            .map(|db: &f64| 10f64.powf(db / 10.0))
            .collect();
        let c = coverage_oracle_model_curve(&params(1.0), &taus, 20_000, 2, Execution::default()).unwrap();
        assert!(c.windows(2).all(|w| w[1] <= w[0]));
        assert!(c[0] > c[6]);
    }

    #[test]
    fn geometric_oracle_is_deterministic() {
        let s = ScenarioParams::with_density(0.01);
        let a = coverage_oracle_geometric(&s, 300, 5).unwrap();
        assert_eq!(a, coverage_oracle_geometric(&s, 300, 5).unwrap());
        assert!((0.0..=1.0).contains(&a));
    }
}
