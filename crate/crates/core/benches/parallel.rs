use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphon_ldp::dynamics::{simulate, CouplingSpec, SimConfig};
use graphon_ldp::graphon::{inf_one_norm, KernelSpec, NormMode, SignedStepKernel, StepGraphon};
use graphon_ldp::ldp::{estimate_rare_event, BallEvent, EventMetric};
use graphon_ldp::random_graphs::{sample_w_random, GridFunction};
use graphon_ldp::{exec, seed};
use rand::Rng;

/// Runs `f` once on the rayon pool and once forced sequential.
fn both<F: Fn() + Sync>(c: &mut Criterion, group: &str, size: usize, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("parallel", size), &size, |b, _| b.iter(&f));
    g.bench_with_input(BenchmarkId::new("sequential", size), &size, |b, _| b.iter(|| exec::sequential(&f)));
    g.finish();
}

fn exact_norm(c: &mut Criterion) {
    let mut rng = seed::rng(1);
    for n in [14, 18] {
        let k = SignedStepKernel::new(n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        both(c, "exact_inf_one_norm", n, || {
            inf_one_norm(&k, NormMode::Exact).unwrap();
        });
    }
}

fn sampler(c: &mut Criterion) {
    for n in [256, 1024] {
        let w = KernelSpec::Product.project(n).unwrap();
        both(c, "sample_w_random", n, || {
            sample_w_random(&w, 7, false).unwrap();
        });
    }
}

fn rk4(c: &mut Criterion) {
    let cfg = SimConfig::new(0.5, 0.005, 10);
    for n in [128, 512] {
        let w = sample_w_random(&KernelSpec::Product.project(n).unwrap(), 3, false).unwrap().embed(false);
        let g = GridFunction::from_fn(&|x| x, n).unwrap();
        both(c, "simulate_kuramoto", n, || {
            simulate(&w, &g, None, CouplingSpec::kuramoto(), cfg).unwrap();
        });
    }
}

fn rare_event(c: &mut Criterion) {
    let w = StepGraphon::constant(1, 0.5).unwrap();
    let target = StepGraphon::constant(1, 0.8).unwrap();
    let event = BallEvent::new(target, 0.1, EventMetric::Cut, NormMode::Heuristic { restarts: 4, seed: 0 }).unwrap();
    both(c, "rare_event_replicas", 16, || {
        estimate_rare_event(&w, &event, 16, 2_000, 11).unwrap();
    });
}

criterion_group!(benches, exact_norm, sampler, rk4, rare_event);
criterion_main!(benches);
