use graphon_ldp::dynamics::{simulate, CouplingSpec, Observable, SimConfig};
use graphon_ldp::graphon::{NormMode, Permutation, QuotientMode, StepGraphon};
use graphon_ldp::ldp::{
    bernoulli_relative_entropy, bernstein_bound, dynamical_rate_search, ell, empirical_tail, estimate_probability,
    estimate_rare_event, exact_event_probability, h, rate_quotient, upsilon, BallEvent, BinaryProcess, DynRateSearch,
    EventMetric, RateMode, Witness,
};
use graphon_ldp::random_graphs::GridFunction;
use graphon_ldp::seed;
use proptest::prelude::*;
use rand::Rng;

fn c(n: usize, v: f64) -> StepGraphon {
    StepGraphon::constant(n, v).unwrap()
}

fn random_graphon(n: usize, rng: &mut impl Rng) -> StepGraphon {
    StepGraphon::dense(n, (0..n * n).map(|_| rng.gen_range(0.01..0.99)).collect()).unwrap()
}

#[test]
fn upsilon_nonnegative_and_identifying() {
    let mut rng = seed::rng(1);
    for t in 0..500 {
        let n = rng.gen_range(1..=16);
        let w = random_graphon(n, &mut rng);
        let v = match t % 3 {
            0 => w.clone(),
            1 => {
                let mut vals = w.values().to_vec();
                let k = rng.gen_range(0..n * n);
                vals[k] = (vals[k] + 0.05).min(1.0);
                StepGraphon::dense(n, vals).unwrap()
            }
            _ => random_graphon(n, &mut rng),
        };
        let u = upsilon(&v, &w).unwrap().value;
        assert!(u >= 0.0);
        assert_eq!(u == 0.0, v == w);
    }
}

#[test]
fn upsilon_is_permutation_invariant() {
    let mut rng = seed::rng(2);
    for _ in 0..50 {
        let n = rng.gen_range(1..=10);
        let (v, w) = (random_graphon(n, &mut rng), random_graphon(n, &mut rng));
        let sigma = Permutation::random(n, &mut rng);
        let a = upsilon(&v, &w).unwrap().value;
        let b = upsilon(&v.permuted(&sigma).unwrap(), &w.permuted(&sigma).unwrap()).unwrap().value;
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn quotient_rate_matches_factorial_enumeration() {
    let mut rng = seed::rng(3);
    let perms3 = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for _ in 0..20 {
        let (v, w) = (random_graphon(3, &mut rng), random_graphon(3, &mut rng));
        let brute = perms3
            .iter()
            .map(|p| {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        s += bernoulli_relative_entropy(v.get(p[i], p[j]), w.get(i, j));
                    }
                }
                s / 9.0
            })
            .fold(f64::INFINITY, f64::min);
        let r = rate_quotient(&v, &w, QuotientMode::Exact).unwrap();
        assert!((r.value - brute).abs() < 1e-14);
        assert_eq!(r.mode, RateMode::Exact);
        let Some(Witness::Permutation(sigma)) = r.witness else { panic!("missing witness") };
        assert_eq!(upsilon(&v.permuted(&sigma).unwrap(), &w).unwrap().value, r.value);
    }
    let big = random_graphon(9, &mut rng);
    assert!(rate_quotient(&big, &big, QuotientMode::Exact).is_err());
    let h = rate_quotient(&big, &big, QuotientMode::Heuristic { sweeps: 3, seed: 0 }).unwrap();
    assert_eq!(h.mode, RateMode::HeuristicUpper);
    assert_eq!(h.value, 0.0);
}

#[test]
fn ell_properties() {
    assert_eq!(ell(1.0), 0.0);
    assert_eq!(ell(0.0), 1.0);
    let grid: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
    for w in grid.windows(3) {
        assert!(ell(w[0]) >= 0.0);
        assert!(ell(w[0]) + ell(w[2]) >= 2.0 * ell(w[1]) - 1e-12);
    }
}

#[test]
fn h_properties() {
    let grid: Vec<f64> = (1..=2000).map(|k| k as f64 * 1e-3).collect();
    for w in grid.windows(3) {
        assert!(h(w[0]) > 0.0);
        assert!(h(w[0]) + h(w[2]) >= 2.0 * h(w[1]) - 1e-15);
    }
    for k in 1..=1000 {
        let u = k as f64 * 1e-4;
        assert!((h(u) / (u * u / 2.0) - 1.0).abs() <= 0.1);
    }
}

#[test]
fn bernstein_bound_holds_for_iid_halves() {
    let bound = bernstein_bound(1_000, 1.0, 0.1).unwrap();
    assert!((bound - (-1_000.0 * h(0.1)).exp()).abs() < 1e-18);
    let tail = empirical_tail(BinaryProcess::Iid { p: 0.5 }, 1_000, &[0.1], 100_000, 12);
    assert!(tail[0] <= bound);
}

#[test]
fn exact_event_probability_examples() {
    let w = StepGraphon::dense(2, vec![0.3, 0.6, 0.2, 0.9]).unwrap();
    assert!((exact_event_probability(&w, |_| Ok(true)).unwrap() - 1.0).abs() < 1e-15);
    let half = c(3, 0.5);
    let p = exact_event_probability(&half, |g| Ok(g.edge_count() % 3 == 0)).unwrap();
    let count = (0u32..512).filter(|m| m.count_ones() % 3 == 0).count();
    assert_eq!(p, count as f64 / 512.0);
    let complete = exact_event_probability(&c(3, 0.7), |g| Ok(g.edge_count() == 9)).unwrap();
    assert!((complete - 0.7f64.powi(9)).abs() < 1e-15);
}

#[test]
fn rare_event_estimator_examples() {
    let w = c(2, 0.5);
    let sure = BallEvent::new(w.clone(), 10.0, EventMetric::InfOne, NormMode::Exact).unwrap();
    let e = estimate_rare_event(&w, &sure, 4, 200, 1).unwrap();
    assert_eq!(e.p_hat, 1.0);
    assert_eq!(e.log_p_per_n2, 0.0);

    let heuristic = NormMode::Heuristic { restarts: 4, seed: 0 };
    let point = BallEvent::new(c(1, 1.0), 0.0, EventMetric::InfOne, heuristic).unwrap();
    let e = estimate_rare_event(&w, &point, 2, 10_000, 2).unwrap();
    let exact = exact_event_probability(&c(2, 0.5), |g| point.contains(g)).unwrap();
    assert_eq!(exact, 1.0 / 16.0);
    assert!((e.p_hat - exact).abs() <= 3.0 * e.std_err + 1e-12);

    let ball = BallEvent::new(c(1, 1.0), 0.1, EventMetric::InfOne, heuristic).unwrap();
    let e = estimate_rare_event(&w, &ball, 3, 10_000, 3).unwrap();
    let exact = exact_event_probability(&c(3, 0.5), |g| ball.contains(g)).unwrap();
    assert!((e.p_hat - exact).abs() <= 3.0 * e.std_err + 1e-12);
    assert!(e.log_p_per_n2 > 0.0);

    let never = estimate_probability(&c(2, 0.5), &c(2, 0.5), 100, 4, |_| Ok(false)).unwrap();
    assert_eq!(never.p_hat, 0.0);
}

/// At n <= 3 the frozen heuristic predicate agrees with the exact one on
/// every outcome.
#[test]
fn heuristic_predicate_is_exact_at_tiny_sizes() {
    let heuristic = NormMode::Heuristic { restarts: 4, seed: 0 };
    let target = StepGraphon::dense(3, vec![0.9, 0.1, 0.5, 0.2, 0.8, 0.4, 0.6, 0.3, 0.7]).unwrap();
    for metric in [EventMetric::InfOne, EventMetric::Cut] {
        let a = BallEvent::new(target.clone(), 0.2, metric, heuristic).unwrap();
        let b = BallEvent::new(target.clone(), 0.2, metric, NormMode::Exact).unwrap();
        let pa = exact_event_probability(&c(3, 0.5), |g| a.contains(g)).unwrap();
        let pb = exact_event_probability(&c(3, 0.5), |g| b.contains(g)).unwrap();
        assert_eq!(pa, pb);
    }
}

struct Instance {
    w: StepGraphon,
    g: GridFunction,
    coupling: CouplingSpec,
    sim: SimConfig,
    target: f64,
}

fn instance() -> Instance {
    let w = c(1, 0.5);
    let g = GridFunction::from_fn(&|x| 0.3 * x, 8).unwrap();
    let coupling = CouplingSpec::kuramoto();
    let sim = SimConfig::new(1.0, 0.005, 200);
    let typical = simulate(&w.refine(8).unwrap(), &g, None, coupling, sim).unwrap();
    let target = Observable::OrderParameter.eval(&typical) + 0.004;
    Instance { w, g, coupling, sim, target }
}

fn run(inst: &Instance, penalty: f64) -> graphon_ldp::ldp::DynRateResult {
    let search = DynRateSearch { resolution: 1, sim_resolution: 8, penalty, ..Default::default() };
    dynamical_rate_search(&inst.w, &inst.g, None, inst.coupling, inst.sim, Observable::OrderParameter, inst.target, search)
        .unwrap()
}

#[test]
fn dynamical_search_matches_grid_scan() {
    let inst = instance();
    let penalty = 1e4;
    let res = run(&inst, penalty);
    assert!(res.converged);
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=980 {
        let v = 0.01 + k as f64 * 1e-3;
        let vg = c(1, v);
        let traj = simulate(&vg.refine(8).unwrap(), &inst.g, None, inst.coupling, inst.sim).unwrap();
        let cost = upsilon(&vg, &inst.w).unwrap().value
            + penalty * (Observable::OrderParameter.eval(&traj) - inst.target).powi(2);
        if cost < best.0 {
            best = (cost, v);
        }
    }
    assert!(res.cost <= best.0 + 1e-9, "search {} grid {}", res.cost, best.0);
    assert!((res.best_v.get(0, 0) - best.1).abs() <= 2e-3);
}

#[test]
fn penalty_ladder_raises_the_entropy_term() {
    let inst = instance();
    let ups: Vec<f64> = [1.0, 10.0, 100.0, 1e3, 1e4].iter().map(|&l| run(&inst, l).upsilon).collect();
    assert!(ups.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{ups:?}");
    assert!(ups[4] > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn upsilon_dominates_pointwise_pinsker(v in 0.0f64..=1.0, w in 0.001f64..=0.999) {
        let kl = bernoulli_relative_entropy(v, w);
        prop_assert!(kl >= 2.0 * (v - w).powi(2) - 1e-12);
    }
}
