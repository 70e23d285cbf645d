use graphon_ldp::graphon::StepGraphon;
use graphon_ldp::random_graphs::{
    log_likelihood_ratio, make_initial_condition, make_parameters, sample_sparse, sample_tilted, sample_w_random,
    AdjacencyGraph, FiniteLaw, InitialKind, Profile,
};
use graphon_ldp::{exec, seed};
use rand::Rng;

fn c(n: usize, v: f64) -> StepGraphon {
    StepGraphon::constant(n, v).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn degenerate_kernels() {
    for seed in 0..5 {
        let full = sample_w_random(&c(6, 1.0), seed, false).unwrap();
        assert_eq!(full.edge_count(), 36);
        assert_eq!(sample_w_random(&c(6, 0.0), seed, true).unwrap().edge_count(), 0);
    }
    let full = sample_w_random(&c(3, 1.0), 0, true).unwrap();
    assert_eq!(full.embed(false), c(3, 1.0));
    assert_eq!(sample_w_random(&c(3, 0.0), 0, true).unwrap().embed(false), c(3, 0.0));
}

#[test]
fn edge_count_mean() {
    let w = c(64, 0.5);
    let counts: Vec<f64> = exec::map_range(10_000, |s| sample_w_random(&w, s as u64, true).unwrap().edge_count() as f64);
    let (m, se) = mean_and_se(&counts);
    assert!((m - 2048.0).abs() <= 3.0 * se, "mean {m} se {se}");
}

#[test]
fn undirected_samples_are_symmetric_with_loops_drawn() {
    let g = sample_w_random(&c(30, 0.5), 11, false).unwrap();
    assert!(!g.directed());
    for i in 0..30 {
        for j in 0..30 {
            assert_eq!(g.get(i, j), g.get(j, i));
        }
    }
    assert!((0..30).any(|i| g.get(i, i)));
}

#[test]
fn sparse_sampler() {
    let w = StepGraphon::dense(3, vec![0.2, 0.9, 0.4, 0.5, 0.1, 0.7, 0.3, 0.3, 0.8]).unwrap();
    let a = sample_sparse(&w, 1.0, 42).unwrap();
    let b = sample_w_random(&w, 42, true).unwrap();
    assert_eq!(a.bits(), b.bits());
    assert!(sample_sparse(&StepGraphon::new(2, vec![3.0; 4], 3.0).unwrap(), 0.5, 1).is_err());
    assert!(sample_sparse(&w, 0.0, 1).is_err());

    let n = 100;
    let alpha = (n as f64).powf(-0.4);
    let full = c(n, 1.0);
    let degrees: Vec<f64> = (0..1_000)
        .map(|s| {
            let g = sample_sparse(&full, alpha, s).unwrap();
            g.edge_count() as f64 / n as f64
        })
        .collect();
    let (m, se) = mean_and_se(&degrees);
    assert!((m - 100f64.powf(0.6)).abs() <= 3.0 * se, "mean degree {m} se {se}");
}

#[test]
fn sparse_embedding_rescales() {
    let g = sample_sparse(&c(4, 1.0), 0.25, 3).unwrap();
    let e = g.embed(true);
    assert_eq!(e.bound(), 4.0);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(e.get(i, j), if g.get(i, j) { 4.0 } else { 0.0 });
        }
    }
}

#[test]
fn tilted_sampler_examples() {
    let w = StepGraphon::dense(2, vec![0.3, 0.6, 0.2, 0.9]).unwrap();
    for s in 0..20 {
        assert_eq!(sample_tilted(&w, &w, s).unwrap().log_weight, 0.0);
    }
    let t = sample_tilted(&c(2, 1.0), &c(2, 0.5), 5).unwrap();
    assert_eq!(t.graph.edge_count(), 4);
    assert!((t.log_weight + 4.0 * 2f64.ln()).abs() < 1e-14);
}

/// Reweighted tilted probability equals the base probability outcome by
/// outcome, hence for every event.
#[test]
fn importance_weights_are_exact() {
    let mut rng = seed::rng(8);
    for n in 1..=3 {
        let v = StepGraphon::dense(n, (0..n * n).map(|_| rng.gen_range(0.05..0.95)).collect()).unwrap();
        let w = StepGraphon::dense(n, (0..n * n).map(|_| rng.gen_range(0.05..0.95)).collect()).unwrap();
        let mut total = 0.0;
        for mask in 0u32..1 << (n * n) {
            let bits: Vec<u8> = (0..n * n).map(|k| (mask >> k & 1) as u8).collect();
            let prob = |g: &StepGraphon| -> f64 {
                bits.iter().zip(g.values()).map(|(&b, &p)| if b == 1 { p } else { 1.0 - p }).product()
            };
            let reweighted = prob(&v) * log_likelihood_ratio(&bits, &v, &w).exp();
            assert!((reweighted - prob(&w)).abs() <= 1e-12);
            total += reweighted;
        }
        assert!((total - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn uniform_outcomes_pass_chi_square() {
    let w = c(2, 0.5);
    let mut counts = [0usize; 16];
    for s in 0..100_000u64 {
        let g = sample_w_random(&w, s, true).unwrap();
        let code = g.bits().iter().enumerate().fold(0, |acc, (k, &b)| acc | (b as usize) << k);
        counts[code] += 1;
    }
    let expected = 100_000.0 / 16.0;
    let chi2: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    // 15 degrees of freedom, 0.1% critical value
    assert!(chi2 < 37.70, "chi-square {chi2}");
}

#[test]
fn samples_ignore_worker_count() {
    let w = StepGraphon::dense(3, vec![0.2, 0.9, 0.4, 0.5, 0.1, 0.7, 0.3, 0.3, 0.8]).unwrap();
    let big = graphon_ldp::graphon::project_step(&w, 150).unwrap();
    let base = sample_w_random(&big, 99, false).unwrap();
    let seq = exec::sequential(|| sample_w_random(&big, 99, false).unwrap());
    let three = exec::with_threads(3, || sample_w_random(&big, 99, false).unwrap()).unwrap();
    assert_eq!(base, seq);
    assert_eq!(base, three);
}

#[test]
fn adjacency_csv_roundtrip() {
    let g = sample_sparse(&c(7, 0.8), 0.5, 21).unwrap();
    let back = AdjacencyGraph::from_csv(&g.to_csv()).unwrap();
    assert_eq!(back.bits(), g.bits());
    assert_eq!(back.alpha(), 0.5);
    assert_eq!(back.seed(), 21);
}

#[test]
fn initial_conditions() {
    for n in [1, 3, 10] {
        let ic = make_initial_condition(&InitialKind::Deterministic(Profile::Constant(0.4)), n).unwrap();
        assert!(ic.coarse.values().iter().all(|&v| (v - 0.4).abs() < 1e-15));
    }
    for n in [4, 16, 64] {
        for s in 0..10 {
            let m = 3.0;
            let ic = make_initial_condition(&InitialKind::Lipschitz { lipschitz: m, seed: s }, n).unwrap();
            assert!(ic.fine.l2_distance(&ic.coarse) <= m / n as f64);
        }
    }
    let law = FiniteLaw::uniform(vec![-1.0, 1.0]).unwrap();
    for s in 0..20 {
        let gaps: Vec<f64> = [16, 32, 64, 128]
            .iter()
            .map(|&n| {
                let kind = InitialKind::Convolved { law: law.clone(), rho: 0.1, seed: s };
                let ic = make_initial_condition(&kind, n).unwrap();
                ic.fine.l2_distance(&ic.coarse)
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "seed {s}: {gaps:?}");
    }
}

#[test]
fn node_parameters() {
    let point = make_parameters(&FiniteLaw::point(0.7).unwrap(), 12, 0.1, 3).unwrap();
    assert!(point.values().iter().all(|&v| (v - 0.7).abs() < 1e-12));
    let law = FiniteLaw::uniform(vec![-1.0, 1.0]).unwrap();
    let n = 64;
    let xi = make_parameters(&law, n, 0.1, 5).unwrap();
    // the convolution preserves the mean of the n^2 draws, whose SE is 1/n
    assert!(xi.mean().abs() <= 3.0 / n as f64);
    assert_eq!(xi, make_parameters(&law, n, 0.1, 5).unwrap());
}
