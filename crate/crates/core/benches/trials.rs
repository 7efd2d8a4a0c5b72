use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use udngc_core::analytics::CoverageParams;
use udngc_core::channel::PathLossParams;
use udngc_core::simulator::{coverage_oracle_model_counts, estimate_handover_rates};
use udngc_core::{Execution, ScenarioParams};

fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Execution::Parallel));
    }
    v
}

fn handover_trials(c: &mut Criterion) {
    let s = ScenarioParams::with_density(0.01);
    let mut g = c.benchmark_group("handover_trials");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 32), &exec, |b, &exec| {
            b.iter(|| estimate_handover_rates(&s, 32, 7, exec).unwrap())
        });
    }
    g.finish();
}

fn coverage_oracle(c: &mut Criterion) {
    let p = CoverageParams::new(1.0, 0.01, 3, PathLossParams::new(2.0, 4.0, 10.0).unwrap()).unwrap();
    let taus = [0.1, 1.0, 10.0];
    let mut g = c.benchmark_group("coverage_oracle");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 20_000), &exec, |b, &exec| {
            b.iter(|| coverage_oracle_model_counts(&p, &taus, 20_000, 7, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, handover_trials, coverage_oracle);
criterion_main!(benches);
