//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any criterion fails.
//!
//! Run alone with `cargo test -p udngc-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use udngc_core::analytics::{
    ase_cost, cost_aware_coverage, coverage_probability, handover_cost, handover_rate_gcho, handover_rate_gchos,
    k_integral, optimal_cluster_size, overall_cost, toeplitz_state, CostParams, CoverageParams, Scheme,
};
use udngc_core::channel::PathLossParams;
use udngc_core::harness::{db_to_linear, rows_to_string, run_simulate, RunOptions};
use udngc_core::simulator::{coverage_oracle_model_curve, estimate_handover_rates, HandoverRates};
use udngc_core::{Execution, ScenarioParams};

struct Outcome {
    passed: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Outcome {
            passed,
            summary: summary.into(),
            notes: Vec::new(),
        }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn sim(lambda: f64, speed: f64, m: u32, trials: u64, seed: u64) -> HandoverRates {
    let s = ScenarioParams {
        speed,
        m_group: m,
        ..ScenarioParams::with_density(lambda)
    };
    estimate_handover_rates(&s, trials, seed, Execution::default()).expect("simulation runs")
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Exact mean crossing rate of order-`k` Voronoi boundaries for a straight
/// path at unit speed: `8 sqrt(lambda) Gamma(k + 1/2) / (pi^(3/2) Gamma(k))`.
fn order_k_crossing_rate(speed: f64, lambda: f64, k: u32) -> f64 {
    let mut ratio = PI.sqrt() / 2.0; // Gamma(3/2) / Gamma(1)
    for j in 1..k {
        ratio *= (j as f64 + 0.5) / j as f64;
    }
    8.0 * speed * lambda.sqrt() * ratio / PI.powf(1.5)
}

fn criterion_1() -> Outcome {
    let h1 = handover_rate_gcho(10.0, 0.001, 1).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, want) in [(3u32, 42.3), (6, 59.2), (9, 66.7)] {
        let got = 100.0 * (1.0 - handover_rate_gcho(10.0, 0.001, m).unwrap() / h1);
        ok &= (got - want).abs() <= 0.1;
        parts.push(format!("M={m}: {got:.2}% (want {want}%)"));
    }
    Outcome::new(ok, format!("rate reductions {}", parts.join(", ")))
}

fn criterion_2() -> Outcome {
    let ratio = handover_rate_gchos(10.0, 0.01, 3).unwrap() / handover_rate_gcho(10.0, 0.01, 3).unwrap();
    let trials = 10_000;
    let r = sim(0.01, 10.0, 3, trials, 2);
    let empirical = r.skip_ratio();
    let ok = ratio == 0.5 && (0.45..=0.55).contains(&empirical);
    Outcome::new(
        ok,
        format!("analytic H*/H = {ratio}, simulated executed ratio {empirical:.4} over {trials} trials (want [0.45, 0.55])"),
    )
    .note(format!(
        "per-trial dominance violations (GCHO-S > GCHO): {}",
        r.tally.dominance_violations
    ))
}

fn criterion_3() -> Outcome {
    let trials = 2_000;
    let (lambda, speed) = (0.01, 10.0);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    let (mut lm, mut lh) = (Vec::new(), Vec::new());
    for m in [1u32, 3, 6, 9] {
        let r = sim(lambda, speed, m, trials, 3);
        let est = r.gcho();
        let closed = handover_rate_gcho(speed, lambda, m).unwrap();
        let rel = est.mean / closed - 1.0;
        ok &= rel.abs() <= 0.15;
        parts.push(format!("M={m}: {:.4} vs {closed:.4} ({:+.1}%)", est.mean, 100.0 * rel));
        let exact = order_k_crossing_rate(speed, lambda, m);
        notes.push(format!(
            "M={m}: simulated {:.4} +- {:.4}, exact order-{m} Voronoi crossing rate {exact:.4} ({:+.2}%)",
            est.mean,
            est.half_width_95,
            100.0 * (est.mean / exact - 1.0)
        ));
        lm.push((m as f64).ln());
        lh.push(est.mean.ln());
    }
    let m_slope = slope(&lm, &lh);
    ok &= (m_slope + 0.5).abs() <= 0.07;

    let (mut ll, mut lh) = (Vec::new(), Vec::new());
    for l in [1e-3, 3e-3, 1e-2] {
        let r = sim(l, speed, 3, trials, 4);
        ll.push(f64::ln(l));
        lh.push(r.gcho().mean.ln());
    }
    let l_slope = slope(&ll, &lh);
    ok &= (l_slope - 0.5).abs() <= 0.05;
    let mut out = Outcome::new(
        ok,
        format!(
            "{}; lambda slope {l_slope:.4} (want 0.5 +- 0.05); M slope {m_slope:.4} (want -0.5 +- 0.07)",
            parts.join(", ")
        ),
    );
    for n in notes {
        out = out.note(n);
    }
    out.note("handover = change of the M-nearest set; its rate follows the order-M crossing law, which grows with M")
}

fn criterion_4() -> Outcome {
    let taus_db = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0];
    let taus: Vec<f64> = taus_db.iter().map(|&t| db_to_linear(t)).collect();
    let trials = 1_000_000;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut analytic = Vec::new();
    for (i, lambda) in [0.001, 0.01].into_iter().enumerate() {
        for (j, d) in [10.0, 20.0].into_iter().enumerate() {
            let pl = PathLossParams::new(2.0, 4.0, d).unwrap();
            let base = CoverageParams::new(1.0, lambda, 3, pl).unwrap();
            let oracle = coverage_oracle_model_curve(&base, &taus, trials, 40 + (2 * i + j) as u64, Execution::default())
                .unwrap();
            let curve: Vec<f64> = taus
                .iter()
                .map(|&t| coverage_probability(&CoverageParams { tau: t, ..base }).unwrap())
                .collect();
            for (a, o) in curve.iter().zip(&oracle) {
                worst = worst.max((a - o).abs());
            }
            ok &= curve.windows(2).all(|w| w[1] < w[0]);
            analytic.push(((lambda, d), curve));
        }
    }
    ok &= worst <= 0.01;
    let at = |l: f64, d: f64| &analytic.iter().find(|((a, b), _)| *a == l && *b == d).unwrap().1;
    let mut order_ok = true;
    for k in 0..taus.len() {
        for l in [0.001, 0.01] {
            order_ok &= at(l, 20.0)[k] < at(l, 10.0)[k];
        }
        for d in [10.0, 20.0] {
            order_ok &= at(0.01, d)[k] < at(0.001, d)[k];
        }
    }
    ok &= order_ok;
    Outcome::new(
        ok,
        format!("max |analytic - oracle| = {worst:.5} over 28 points at 1e6 trials (want <= 0.01); orderings in tau, D, lambda hold: {order_ok}"),
    )
    .note(format!(
        "p(0 dB, lambda=0.01, D=10) = {:.5}",
        at(0.01, 10.0)[2]
    ))
}

fn criterion_5() -> Outcome {
    let mut k_err: f64 = 0.0;
    for theta in [0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        let q = udngc_core::analytics::k_integral_quadrature(0, theta, 4.0, 1e-12).unwrap();
        k_err = k_err.max((q - (PI / 2.0 - f64::atan(theta))).abs());
        k_err = k_err.max((k_integral(0, theta, 4.0, 1e-10).unwrap() - (PI / 2.0 - f64::atan(theta))).abs());
    }
    let mut route_err: f64 = 0.0;
    for m in 1..=9u32 {
        for lambda in [0.001, 0.01] {
            for tau_db in [-10.0, 0.0, 20.0] {
                let p = CoverageParams::new(db_to_linear(tau_db), lambda, m, PathLossParams::new(2.0, 4.0, 10.0).unwrap())
                    .unwrap();
                for r in [0.5, 2.0, 8.0, 30.0] {
                    let st = toeplitz_state(r, &p).unwrap();
                    let solved = st.matrix_solve(st.a_values[0]).unwrap();
                    let tail: f64 = solved.iter().skip(1).sum();
                    route_err = route_err.max((tail - st.tail_sum()).abs());
                }
            }
        }
    }
    Outcome::new(
        k_err <= 1e-8 && route_err <= 1e-10,
        format!("k_0 vs pi/2 - atan: {k_err:.2e} (want <= 1e-8); matrix vs recursion A_(M-1), M <= 9: {route_err:.2e} (want <= 1e-10)"),
    )
}

fn criterion_6() -> Outcome {
    let c = CostParams::new(0.3, 0.3, 0.01 * 0.005, 1.0, 0.005).unwrap();
    let g = optimal_cluster_size(Scheme::Gcho, &c, 10.0, 0.005).unwrap();
    let s = optimal_cluster_size(Scheme::GchoS, &c, 10.0, 0.005).unwrap();
    let ratio = s.continuous / g.continuous;
    let exhaustive = (1..=20u32)
        .min_by(|&a, &b| {
            overall_cost(Scheme::GchoS, &c, 10.0, 0.005, a)
                .unwrap()
                .total_cmp(&overall_cost(Scheme::GchoS, &c, 10.0, 0.005, b).unwrap())
        })
        .unwrap();
    let ok = (ratio - 4f64.powf(-1.0 / 3.0)).abs() <= 1e-14 && s.integer == 3 && exhaustive == 3;
    Outcome::new(
        ok,
        format!(
            "M**/M* = {ratio:.15} (4^(-1/3) = {:.15}); M* = {:.3}, M** = {:.3}; integer optimum {} (exhaustive over 1..=20: {exhaustive})",
            4f64.powf(-1.0 / 3.0),
            g.continuous,
            s.continuous,
            s.integer
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (lambda, read) in [(0.002, 8.3), (0.01, 21.43)] {
        let p = coverage_probability(
            &CoverageParams::new(1.0, lambda, 3, PathLossParams::new(2.0, 4.0, 10.0).unwrap()).unwrap(),
        )
        .unwrap();
        let d = handover_cost(0.3, handover_rate_gcho(10.0, lambda, 3).unwrap()).unwrap().fraction;
        let stationary = ase_cost(lambda, 1.0, cost_aware_coverage(p, false, d).unwrap()).unwrap();
        let mobile = ase_cost(lambda, 1.0, cost_aware_coverage(p, true, d).unwrap()).unwrap();
        let gap = (stationary - mobile) / stationary;
        ok &= (gap - d).abs() <= 1e-15;
        ok &= (100.0 * gap - read).abs() <= 2.5;
        parts.push(format!("lambda={lambda}: gap {:.2}% = d_cost {:.2}% (figure {read}%)", 100.0 * gap, 100.0 * d));
    }
    Outcome::new(ok, parts.join(", "))
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut min_sep = f64::INFINITY;
    let mut parts = Vec::new();
    for lambda in [0.001, 0.01] {
        for speed in [5.0, 10.0, 20.0] {
            let r = sim(lambda, speed, 3, 1_000, 8);
            let (fr, g) = (r.fr(), r.gcho());
            let sep = (fr.mean - g.mean) / fr.half_width_95.hypot(g.half_width_95);
            min_sep = min_sep.min(sep);
            ok &= fr.mean > g.mean && sep >= 3.0;
            parts.push(format!("({lambda}, {speed}): FR {:.3} vs GCHO {:.3}", fr.mean, g.mean));
        }
    }
    Outcome::new(
        ok,
        format!("fixed-region baseline above GCHO everywhere, min separation {min_sep:.1} combined CI half-widths (want >= 3)"),
    )
    .note(parts.join("; "))
}

fn criterion_9() -> Outcome {
    let s = ScenarioParams {
        trials: 100,
        coverage_trials: 20_000,
        seed: 17,
        ..ScenarioParams::with_density(0.01)
    };
    let run = || rows_to_string(&run_simulate(&s, &RunOptions::bit_exact()).unwrap()).unwrap();
    let (a, b) = (run(), run());
    Outcome::new(
        a == b && !a.is_empty(),
        format!("two single-threaded simulate runs with seed 17: {} bytes, identical: {}", a.len(), a == b),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "handover-rate reductions", criterion_1),
        (2, "GCHO-S halving", criterion_2),
        (3, "simulation vs closed-form GCHO rate", criterion_3),
        (4, "coverage probability vs model oracle", criterion_4),
        (5, "k-integral and Toeplitz internals", criterion_5),
        (6, "optimal cluster size", criterion_6),
        (7, "ASE mobility gap", criterion_7),
        (8, "fixed-region baseline exceeds GCHO", criterion_8),
        (9, "determinism", criterion_9),
    ];
    // Coarse filter: `cargo test --test acceptance -- 4` runs criterion 4 only.
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {n} ({name}): {} [{:.1} s]",
            o.summary,
            t.elapsed().as_secs_f64()
        );
        for note in &o.notes {
            println!("     {note}");
        }
        failed += (!o.passed) as u32;
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
