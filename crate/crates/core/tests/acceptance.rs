//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p graphon-ldp-core --test acceptance`.

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use graphon_ldp::dynamics::{simulate, solve_continuum, trajectory_distance, CouplingSpec, Interaction, Intrinsic, SimConfig};
use graphon_ldp::graphon::{
    cut_norm, d_inf_one, inf_one_norm, project_step, KernelSpec, NormMode, Permutation, SignedStepKernel, StepGraphon,
};
use graphon_ldp::ldp::{
    bernstein_bound, empirical_tail, estimate_rare_event, exact_event_probability, exact_tilted_expectation,
    legendre_rate, sparse_rate, upsilon, BallEvent, BinaryProcess, EventMetric,
};
use graphon_ldp::random_graphs::{make_parameters, sample_sparse, sample_w_random, FiniteLaw, GridFunction};
use graphon_ldp::staircase::{pushforward_blocks, staircase_bijection, staircase_convergence, DiscreteCoupling};
use graphon_ldp::{exec, seed};
use rand::Rng;

const EPS: f64 = 1e-12;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn nonincreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}

fn random_signed(n: usize, rng: &mut impl Rng) -> SignedStepKernel {
    SignedStepKernel::new(n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn random_dense(n: usize, rng: &mut impl Rng) -> StepGraphon {
    StepGraphon::dense(n, (0..n * n).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

fn c(n: usize, v: f64) -> StepGraphon {
    StepGraphon::constant(n, v).unwrap()
}

fn norm_sandwich() -> Verdict {
    let mut rng = seed::rng(101);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let k = random_signed(n, &mut rng);
        let cut = cut_norm(&k, NormMode::Exact).unwrap();
        let inf = inf_one_norm(&k, NormMode::Exact).unwrap();
        worst = worst.max(cut - inf).max(inf - 4.0 * cut);
    }
    let f = StepGraphon::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let g = StepGraphon::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let tight = f.difference(&g).unwrap();
    let ratio = inf_one_norm(&tight, NormMode::Exact).unwrap() / cut_norm(&tight, NormMode::Exact).unwrap();
    verdict(worst <= EPS && ratio == 4.0, format!("max violation {worst:e}, tight pair ratio {ratio}"))
}

fn projection_contractivity() -> Verdict {
    let mut rng = seed::rng(102);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let (u, v) = (random_dense(8, &mut rng), random_dense(8, &mut rng));
        let fine = d_inf_one(&u, &v, NormMode::Exact).unwrap();
        for n in [1, 2, 4] {
            let coarse = d_inf_one(&project_step(&u, n).unwrap(), &project_step(&v, n).unwrap(), NormMode::Exact).unwrap();
            worst = worst.max(coarse - 4.0 * fine);
        }
    }
    verdict(worst <= 0.0, format!("max of coarse - 4 fine = {worst:e}"))
}

fn rate_exactness() -> Verdict {
    let mut rng = seed::rng(103);
    let w = random_dense(7, &mut rng);
    let same = upsilon(&w, &w).unwrap().value;
    let ln2 = 2f64.ln();
    let ups = upsilon(&c(1, 1.0), &c(1, 0.5)).unwrap().value;
    let ell2 = sparse_rate(&c(1, 2.0), &c(1, 1.0)).unwrap().value;
    let leg = legendre_rate(&FiniteLaw::bernoulli(0.5).unwrap(), 1.0);
    let pass = same == 0.0 && (ups - ln2).abs() <= 1e-12 && (ell2 - (2.0 * ln2 - 1.0)).abs() <= 1e-12 && (leg - ln2).abs() <= 1e-8;
    verdict(pass, format!("ups(W,W)={same}, ups(1,1/2)-ln2={:e}, l(2) err={:e}, L(1) err={:e}", ups - ln2, ell2 - (2.0 * ln2 - 1.0), leg - ln2))
}

fn bernstein() -> Verdict {
    let processes = [
        ("iid", BinaryProcess::Iid { p: 0.5 }),
        ("markov", BinaryProcess::Markov { after_zero: 0.3, after_one: 0.7 }),
        ("adaptive", BinaryProcess::Adaptive { base: 0.5, gain: 0.8 }),
    ];
    let deltas = [0.05, 0.1, 0.2];
    let mut pass = true;
    let mut tightest = f64::INFINITY;
    for (k, (_, p)) in processes.iter().enumerate() {
        for n in [100, 1_000] {
            let tails = empirical_tail(*p, n, &deltas, 100_000, 400 + 10 * k as u64 + n as u64);
            for (d, t) in deltas.iter().zip(tails) {
                let b = bernstein_bound(n, 1.0, *d).unwrap();
                pass &= t <= b;
                tightest = tightest.min(b - t);
            }
        }
    }
    verdict(pass, format!("smallest bound - tail margin {tightest:e} over 18 cells"))
}

fn within_3se(p_hat: f64, se: f64, exact: f64) -> bool {
    (p_hat - exact).abs() <= (3.0 * se).max(EPS)
}

fn importance_sampling_oracle() -> Verdict {
    let heuristic = NormMode::Heuristic { restarts: 8, seed: 5 };
    let mut failures = Vec::new();
    let mut worst_weight = 0.0f64;
    let mut checked = 0;
    for n in [2usize, 3] {
        let mut rng = seed::rng(500 + n as u64);
        let structured = StepGraphon::dense(n, (0..n * n).map(|k| 0.25 + 0.5 * ((k % (n + 1)) as f64 / n as f64)).collect()).unwrap();
        let random = StepGraphon::dense(n, (0..n * n).map(|_| rng.gen_range(0.1..0.9)).collect()).unwrap();
        let point_radius = if n == 2 { 0.0 } else { 0.1 };
        let events = [
            (c(n, 0.5), BallEvent::new(c(n, 1.0), point_radius, EventMetric::InfOne, heuristic).unwrap()),
            (c(n, 0.5), BallEvent::new(c(n, 0.8), 0.3, EventMetric::InfOne, heuristic).unwrap()),
            (c(n, 0.5), BallEvent::new(c(n, 0.8), 0.15, EventMetric::Cut, heuristic).unwrap()),
            (c(n, 0.5), BallEvent::new(c(n, 0.3), 0.35, EventMetric::InfOne, heuristic).unwrap()),
            (c(n, 0.5), BallEvent::new(structured.clone(), 0.3, EventMetric::InfOne, heuristic).unwrap()),
            (c(n, 0.5), BallEvent::new(random.clone(), 0.25, EventMetric::Cut, heuristic).unwrap()),
            (random.clone(), BallEvent::new(c(n, 0.6), 0.4, EventMetric::InfOne, heuristic).unwrap()),
            (random.clone(), BallEvent::new(structured.clone(), 0.2, EventMetric::Cut, heuristic).unwrap()),
            (c(n, 0.3), BallEvent::new(c(n, 0.7), 0.45, EventMetric::InfOne, heuristic).unwrap()),
            (c(n, 0.3), BallEvent::new(random.clone(), 0.1, EventMetric::Cut, NormMode::Exact).unwrap()),
        ];
        for (k, (w, event)) in events.iter().enumerate() {
            let exact = exact_event_probability(w, |g| event.contains(g)).unwrap();
            let est = estimate_rare_event(w, event, n, 10_000, 600 + 20 * n as u64 + k as u64).unwrap();
            checked += 1;
            if !within_3se(est.p_hat, est.std_err, exact) {
                failures.push(format!("n={n} event {k}: p_hat {:e} exact {exact:e} se {:e}", est.p_hat, est.std_err));
            }
            let total = exact_tilted_expectation(&event.target, w, |_| Ok(true)).unwrap();
            let full_support = event.target.values().iter().all(|&v| v > 0.0 && v < 1.0);
            if full_support {
                worst_weight = worst_weight.max((total - 1.0).abs());
            }
        }
    }
    let pass = failures.is_empty() && worst_weight <= EPS;
    let detail = if failures.is_empty() {
        format!("{checked} events within 3 SE, weight integral error {worst_weight:e}")
    } else {
        failures.join("; ")
    };
    verdict(pass, detail)
}

fn ldp_trend() -> Verdict {
    let w = c(1, 0.5);
    let target = c(1, 0.8);
    let rate = 0.8 * 1.6f64.ln() + 0.2 * 0.4f64.ln();
    let frozen = NormMode::Heuristic { restarts: 8, seed: 11 };
    let event = BallEvent::new(target.clone(), 0.05, EventMetric::InfOne, frozen).unwrap();
    let mut rates = Vec::new();
    let mut hits = Vec::new();
    for n in [8, 16, 24] {
        let e = estimate_rare_event(&w, &event, n, 100_000, 700 + n as u64).unwrap();
        rates.push(e.log_p_per_n2);
        hits.push(e.hits);
    }
    let gaps: Vec<f64> = rates.iter().map(|r| (r - rate).abs()).collect();
    let pass = rates.iter().all(|r| r.is_finite()) && nonincreasing(&gaps) && gaps[2] <= 0.25 * rate;

    // same ladder with the cut-norm ball, reported for context only
    let cut_event = BallEvent { metric: EventMetric::Cut, ..event };
    let cut_rates: Vec<f64> = [8, 16, 24]
        .iter()
        .map(|&n| estimate_rare_event(&w, &cut_event, n, 100_000, 800 + n as u64).unwrap().log_p_per_n2)
        .collect();
    verdict(
        pass,
        format!(
            "target {rate:.5}; inf-one ball rates {rates:?} (hits {hits:?}); cut ball rates {:?}",
            cut_rates.iter().map(|r| (r * 1e5).round() / 1e5).collect::<Vec<_>>()
        ),
    )
}

fn lln_ladders() -> Verdict {
    let w = KernelSpec::Product;
    let ladder = [32usize, 64, 128, 256];
    let mode = NormMode::Heuristic { restarts: 4, seed: 13 };
    let mut dense = Vec::new();
    let mut sparse = Vec::new();
    for &n in &ladder {
        let wn = w.project(n).unwrap();
        let alpha = (n as f64).powf(-0.4);
        let d: Vec<(f64, f64)> = (0..50u64)
            .map(|s| {
                let g = sample_w_random(&wn, seed::derive(900 + n as u64, s), false).unwrap();
                let sp = sample_sparse(&wn, alpha, seed::derive(950 + n as u64, s)).unwrap();
                (
                    d_inf_one(&g.embed(false), &wn, mode).unwrap(),
                    d_inf_one(&sp.embed(true), &wn, mode).unwrap(),
                )
            })
            .collect();
        dense.push(median(d.iter().map(|x| x.0).collect()));
        sparse.push(median(d.iter().map(|x| x.1).collect()));
    }
    verdict(nonincreasing(&dense) && nonincreasing(&sparse), format!("dense medians {dense:.4?}, sparse medians {sparse:.4?}"))
}

fn dynamics_oracle() -> Verdict {
    let err = |dt: f64| {
        let w = c(2, 1.0);
        let g = GridFunction::new(vec![1.0, 0.0]).unwrap();
        let steps = (1.0 / dt).round() as usize;
        let coupling = CouplingSpec::new(Intrinsic::Zero, Interaction::Linear);
        let tr = simulate(&w, &g, None, coupling, SimConfig::new(1.0, dt, steps)).unwrap();
        let e = (-1.0f64).exp();
        let u = tr.final_state().values();
        (u[0] - (0.5 + e / 2.0)).abs().max((u[1] - (0.5 - e / 2.0)).abs())
    };
    let fine = err(1e-3);
    let (e1, e2, e3) = (err(0.05), err(0.025), err(0.0125));
    let ratios = [e1 / e2, e2 / e3];
    let pass = fine <= 1e-9 && ratios.iter().all(|&r| r >= 7.2);
    verdict(pass, format!("error at dt=1e-3 {fine:e}, halving ratios {ratios:.2?}"))
}

fn continuum_lln() -> Verdict {
    let cfg = SimConfig::new(2.0, 0.005, 40);
    let coupling = CouplingSpec::kuramoto();
    let reference = solve_continuum(&KernelSpec::Product, &|x| x, None, coupling, 1024, cfg).unwrap();
    let mut medians = Vec::new();
    for n in [64usize, 128, 256, 512] {
        let wn = KernelSpec::Product.project(n).unwrap();
        let g = GridFunction::from_fn(&|x| x, n).unwrap();
        let d: Vec<f64> = (0..20u64)
            .map(|s| {
                let graph = sample_w_random(&wn, seed::derive(1_000 + n as u64, s), false).unwrap();
                let tr = simulate(&graph.embed(false), &g, None, coupling, cfg).unwrap();
                trajectory_distance(&tr, &reference).unwrap()
            })
            .collect();
        medians.push(median(d));
    }
    verdict(nonincreasing(&medians), format!("median distances {medians:.5?}"))
}

/// Random smooth-ish graphon and initial profile, and a perturbed copy.
fn perturbed_pair(n: usize, rng: &mut impl Rng) -> (StepGraphon, GridFunction, StepGraphon, GridFunction) {
    let (a, b, phase) = (rng.gen_range(0.2..0.8), rng.gen_range(0.05..0.2), rng.gen_range(0.0..1.0));
    let u = StepGraphon::dense(
        n,
        (0..n * n)
            .map(|k| {
                let (x, y) = ((k / n) as f64 / n as f64, (k % n) as f64 / n as f64);
                a + b * (2.0 * std::f64::consts::PI * (x + y + phase)).sin()
            })
            .collect(),
    )
    .unwrap();
    let eps = rng.gen_range(0.01..0.15);
    let block = rng.gen_range(1..=n / 4);
    let v = StepGraphon::dense(
        n,
        u.values()
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let bump = if (k / n) < block && (k % n) < block { eps * 4.0 } else { 0.0 };
                (x + eps * rng.gen_range(-1.0..1.0) + bump).clamp(0.0, 1.0)
            })
            .collect(),
    )
    .unwrap();
    let shift = rng.gen_range(0.0..0.3);
    let g = GridFunction::from_fn(&|x| x * x, n).unwrap();
    let h = GridFunction::new(g.values().iter().map(|x| x + shift * rng.gen_range(0.0..1.0)).collect()).unwrap();
    (u, g, v, h)
}

fn continuity_ratio() -> Verdict {
    let n = 128;
    let cfg = SimConfig::new(1.0, 0.005, 20);
    let coupling = CouplingSpec::kuramoto();
    let mode = NormMode::Heuristic { restarts: 8, seed: 17 };
    let batch = |s: u64| -> f64 {
        let mut rng = seed::rng(s);
        let pairs: Vec<_> = (0..50).map(|_| perturbed_pair(n, &mut rng)).collect();
        exec::map_range(pairs.len(), |k| {
            let (u, g, v, h) = &pairs[k];
            let a = simulate(u, g, None, coupling, cfg).unwrap();
            let b = simulate(v, h, None, coupling, cfg).unwrap();
            let denom = d_inf_one(u, v, mode).unwrap() + g.l2_distance(h);
            trajectory_distance(&a, &b).unwrap() / denom
        })
        .into_iter()
        .fold(0.0, f64::max)
    };
    let (m1, m2) = (batch(1_100), batch(1_200));
    let pass = m1.is_finite() && m2.is_finite() && m1 / m2 <= 2.0 && m2 / m1 <= 2.0;
    verdict(pass, format!("batch maxima {m1:.4} and {m2:.4}"))
}

fn staircase() -> Verdict {
    let mut rng = seed::rng(1_300);
    let mut worst_mass = 0.0f64;
    let mut built = 0;
    for s in 0..200u64 {
        let k = rng.gen_range(1..=32);
        let nu = DiscreteCoupling::random(k, 1_300 + s).unwrap();
        // construction itself asserts both tilings to 1e-12
        let theta = staircase_bijection(&nu).unwrap();
        built += 1;
        let blocks = pushforward_blocks(&theta, k).unwrap();
        for (b, m) in blocks.iter().zip(nu.masses()) {
            worst_mass = worst_mass.max((b - m).abs());
        }
    }
    let mut monotone = 0;
    for s in 0..50u64 {
        let nu = DiscreteCoupling::random(32, 1_600 + s).unwrap();
        if nonincreasing(&staircase_convergence(&nu, &[2, 4, 8, 16, 32]).unwrap()) {
            monotone += 1;
        }
    }
    verdict(
        built == 200 && worst_mass <= EPS && monotone == 50,
        format!("{built} tilings valid, mass error {worst_mass:e}, {monotone}/50 monotone refinement ladders"),
    )
}

fn equivariance() -> Verdict {
    let n = 32;
    let cfg = SimConfig::new(1.0, 0.005, 20);
    let coupling = CouplingSpec::new(Intrinsic::Frequency(0.5), Interaction::Kuramoto);
    let w = sample_w_random(&KernelSpec::Product.project(n).unwrap(), 1_400, false).unwrap().embed(false);
    let mut rng = seed::rng(1_401);
    let g = GridFunction::new((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap();
    let xi = make_parameters(&FiniteLaw::uniform(vec![-0.5, 0.5]).unwrap(), n, 0.1, 1_402).unwrap();
    let base = simulate(&w, &g, Some(&xi), coupling, cfg).unwrap();
    let mut exact = 0;
    for _ in 0..20 {
        let sigma = Permutation::random(n, &mut rng);
        let moved = simulate(
            &w.permuted(&sigma).unwrap(),
            &g.permuted(&sigma).unwrap(),
            Some(&xi.permuted(&sigma).unwrap()),
            coupling,
            cfg,
        )
        .unwrap();
        if moved.states == base.permuted(&sigma).unwrap().states {
            exact += 1;
        }
    }
    verdict(exact == 20, format!("{exact}/20 permutations reproduced bit for bit"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("norm sandwich", norm_sandwich),
        ("projection contractivity", projection_contractivity),
        ("rate-function exactness", rate_exactness),
        ("bernstein tail bound", bernstein),
        ("importance-sampling oracle", importance_sampling_oracle),
        ("ldp trend", ldp_trend),
        ("lln in cut distance", lln_ladders),
        ("dynamics oracle", dynamics_oracle),
        ("continuum-limit lln", continuum_lln),
        ("continuity bound", continuity_ratio),
        ("staircase construction", staircase),
        ("permutation equivariance", equivariance),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let v = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<28} {} ({:.1}s) {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
