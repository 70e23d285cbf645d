//! One function per subcommand. Ladder points are evaluated in parallel and
//! written in ladder order.

use graphon_ldp::dynamics::{
    a_priori_bound_check, simulate as integrate, solve_continuum, trajectory_distance, BoundCheck, Observable,
    Trajectory,
};
use graphon_ldp::graphon::{cut_norm, d_inf_one, inf_one_norm, io, NormMode, QuotientMode, StepGraphon};
use graphon_ldp::ldp::{
    dynamical_rate_search, estimate_rare_event, exact_event_probability, legendre_rate, rate_quotient, sparse_rate,
    upsilon, BallEvent, DynRateSearch, RateReport, EXACT_EVENT_LIMIT,
};
use graphon_ldp::random_graphs::{
    make_initial_condition, make_parameters, sample_sparse, sample_w_random, AdjacencyGraph, FiniteLaw, GridFunction,
    InitialKind,
};
use graphon_ldp::staircase::{pushforward_blocks, staircase_bijection, staircase_convergence, DiscreteCoupling};
use graphon_ldp::{exec, seed};
use rand::Rng;
use serde::Serialize;

use crate::config::{DynamicsBlock, ExperimentConfig, GraphSource};
use crate::error::CliError;
use crate::output::Output;

type Result<T> = std::result::Result<T, CliError>;

/// Evaluates `f` on every `(n, seed)` pair of the ladder, in ladder order.
fn ladder<T: Send>(ns: &[usize], seeds: &[u64], f: impl Fn(usize, u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let points: Vec<(usize, u64)> = ns.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    exec::map_range(points.len(), |k| f(points[k].0, points[k].1)).into_iter().collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    count: usize,
    median: f64,
    mean: f64,
    min: f64,
    max: f64,
}

fn summarize(ns: &[usize], values: impl Fn(usize) -> Vec<f64>) -> Vec<Summary> {
    ns.iter()
        .map(|&n| {
            let v = values(n);
            Summary {
                n,
                count: v.len(),
                median: median(v.clone()),
                mean: v.iter().sum::<f64>() / v.len() as f64,
                min: v.iter().copied().fold(f64::INFINITY, f64::min),
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

fn trend(summary: &[Summary]) -> bool {
    summary.windows(2).all(|w| w[1].median <= w[0].median)
}

fn graph_for(w: &StepGraphon, n: usize, s: u64, cfg: &ExperimentConfig) -> Result<AdjacencyGraph> {
    Ok(match cfg.sparse_exponent {
        Some(a) => sample_sparse(w, (n as f64).powf(-a), s)?,
        None => sample_w_random(w, s, cfg.directed)?,
    })
}

pub fn sample(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        seed: u64,
        directed: bool,
        alpha: f64,
        edges: usize,
        density: f64,
    }
    let kernel = cfg.kernel_spec()?;
    let graphs = ladder(&cfg.resolutions, &cfg.seeds, |n, s| graph_for(&kernel.project(n)?, n, s, cfg))?;
    let mut rows = Vec::new();
    for g in &graphs {
        out.text(&format!("graphs/n{}_seed{}.csv", g.n(), g.seed()), &g.to_csv())?;
        rows.push(Row {
            n: g.n(),
            seed: g.seed(),
            directed: g.directed(),
            alpha: g.alpha(),
            edges: g.edge_count(),
            density: g.edge_count() as f64 / (g.n() * g.n()) as f64,
        });
    }
    out.record_seeds("graphs", cfg.seeds.iter().copied());
    out.csv("sample.csv", &rows)
}

pub fn norms(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        cut_exact: Option<f64>,
        inf_one_exact: Option<f64>,
        ratio_exact: Option<f64>,
        cut_heuristic: f64,
        inf_one_heuristic: f64,
        ratio_heuristic: Option<f64>,
    }
    let ratio = |inf: f64, cut: f64| (cut > 0.0).then(|| inf / cut);
    let (u, v) = (cfg.kernel_spec()?, cfg.compare_spec()?);
    let heuristic = cfg.norm.heuristic();
    let rows = exec::map_range(cfg.resolutions.len(), |k| -> Result<Row> {
        let n = cfg.resolutions[k];
        let diff = u.project(n)?.difference(&v.project(n)?)?;
        let (cut_exact, inf_one_exact) = if n <= cfg.norm.exact_limit {
            (Some(cut_norm(&diff, NormMode::Exact)?), Some(inf_one_norm(&diff, NormMode::Exact)?))
        } else {
            (None, None)
        };
        let (ch, ih) = (cut_norm(&diff, heuristic)?, inf_one_norm(&diff, heuristic)?);
        Ok(Row {
            n,
            cut_exact,
            inf_one_exact,
            ratio_exact: inf_one_exact.zip(cut_exact).and_then(|(i, c)| ratio(i, c)),
            cut_heuristic: ch,
            inf_one_heuristic: ih,
            ratio_heuristic: ratio(ih, ch),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    out.record_seeds("norm_heuristic", [cfg.norm.seed]);
    out.csv("norms.csv", &rows)
}

#[derive(Serialize)]
struct DistanceRow {
    n: usize,
    seed: u64,
    alpha: f64,
    exact: bool,
    distance: f64,
}

fn lln_ladder(cfg: &ExperimentConfig, out: &mut Output, name: &str) -> Result<bool> {
    let kernel = cfg.kernel_spec()?;
    let rows = ladder(&cfg.resolutions, &cfg.seeds, |n, s| {
        let wn = kernel.project(n)?;
        let g = graph_for(&wn, n, s, cfg)?;
        let mode = cfg.norm.mode(n);
        Ok(DistanceRow {
            n,
            seed: s,
            alpha: g.alpha(),
            exact: mode.is_exact(),
            distance: d_inf_one(&g.embed(cfg.sparse_exponent.is_some()), &wn, mode)?,
        })
    })?;
    let summary = summarize(&cfg.resolutions, |n| rows.iter().filter(|r| r.n == n).map(|r| r.distance).collect());
    out.record_seeds("graphs", cfg.seeds.iter().copied());
    out.record_seeds("norm_heuristic", [cfg.norm.seed]);
    out.csv(&format!("{name}.csv"), &rows)?;
    out.csv(&format!("{name}_summary.csv"), &summary)?;
    if cfg.plot {
        let pts = summary.iter().map(|s| (s.n as f64, s.median)).collect();
        out.svg(&format!("{name}.svg"), "n", "median inf-one distance", &[("median", pts)])?;
    }
    Ok(trend(&summary))
}

pub fn lln(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let ok = lln_ladder(cfg, out, "lln")?;
    println!("median distance nonincreasing: {ok}");
    Ok(())
}

pub fn sparse_lln(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let ok = lln_ladder(cfg, out, "sparse_lln")?;
    println!("median distance nonincreasing: {ok}");
    Ok(())
}

fn initial(d: &DynamicsBlock, n: usize) -> Result<GridFunction> {
    Ok(make_initial_condition(&InitialKind::Deterministic(d.profile()), n)?.coarse)
}

fn parameters(d: &DynamicsBlock, n: usize) -> Result<Option<GridFunction>> {
    match (&d.parameters, d.coupling.f.needs_parameters()) {
        (Some(p), _) => {
            let law: FiniteLaw = p.law.parse()?;
            Ok(Some(make_parameters(&law, n, p.rho, p.seed)?))
        }
        (None, false) => Ok(None),
        (None, true) => Err(CliError::Config(format!("coupling {} needs dynamics.parameters", d.coupling.id()))),
    }
}

fn record_dynamics_seeds(d: &DynamicsBlock, out: &mut Output) {
    if let Some(p) = &d.parameters {
        out.record_seeds("parameters", [p.seed]);
    }
}

pub fn simulate(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        seed: Option<u64>,
        final_time: f64,
        order_parameter: f64,
        terminal_mean: f64,
        terminal_l2: f64,
        bound_check: &'static str,
    }
    let kernel = cfg.kernel_spec()?;
    let d = cfg.dynamics()?;
    let seeds: Vec<Option<u64>> = match d.graph {
        GraphSource::Kernel => vec![None],
        GraphSource::Sampled => cfg.seeds.iter().map(|&s| Some(s)).collect(),
    };
    let wrap = d.coupling.d.is_periodic();
    let points: Vec<(usize, Option<u64>)> = cfg.resolutions.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let runs = exec::map_range(points.len(), |k| -> Result<(Trajectory, GridFunction)> {
        let (n, s) = points[k];
        let wn = kernel.project(n)?;
        let w = match s {
            Some(s) => graph_for(&wn, n, s, cfg)?.embed(cfg.sparse_exponent.is_some()),
            None => wn,
        };
        let g = initial(d, n)?;
        let tr = integrate(&w, &g, parameters(d, n)?.as_ref(), d.coupling, d.sim())?;
        Ok((tr, g))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for ((n, s), (tr, g)) in points.iter().zip(&runs) {
        let tag = s.map_or("kernel".to_string(), |s| format!("seed{s}"));
        out.text(&format!("trajectories/n{n}_{tag}.csv"), &tr.to_csv(wrap))?;
        rows.push(Row {
            n: *n,
            seed: *s,
            final_time: tr.final_time(),
            order_parameter: Observable::OrderParameter.eval(tr),
            terminal_mean: Observable::TerminalMean.eval(tr),
            terminal_l2: Observable::TerminalL2.eval(tr),
            bound_check: match a_priori_bound_check(tr, d.coupling, g) {
                BoundCheck::Holds => "holds",
                BoundCheck::Violated { .. } => "violated",
                BoundCheck::Exempt => "exempt",
            },
        });
    }
    if d.graph == GraphSource::Sampled {
        out.record_seeds("graphs", cfg.seeds.iter().copied());
    }
    record_dynamics_seeds(d, out);
    out.csv("simulate.csv", &rows)
}

pub fn continuum(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        seed: u64,
        reference: usize,
        distance: f64,
    }
    let kernel = cfg.kernel_spec()?;
    let d = cfg.dynamics()?;
    let m = d.reference.expect("validated");
    let profile = d.profile();
    let reference = solve_continuum(&kernel, &|x| profile.eval(x), None, d.coupling, m, d.sim())?;
    let rows = ladder(&cfg.resolutions, &cfg.seeds, |n, s| {
        let wn = kernel.project(n)?;
        let w = graph_for(&wn, n, s, cfg)?.embed(cfg.sparse_exponent.is_some());
        let tr = integrate(&w, &initial(d, n)?, None, d.coupling, d.sim())?;
        Ok(Row { n, seed: s, reference: m, distance: trajectory_distance(&tr, &reference)? })
    })?;
    let summary = summarize(&cfg.resolutions, |n| rows.iter().filter(|r| r.n == n).map(|r| r.distance).collect());
    out.record_seeds("graphs", cfg.seeds.iter().copied());
    out.csv("continuum.csv", &rows)?;
    out.csv("continuum_summary.csv", &summary)?;
    if cfg.plot {
        let pts = summary.iter().map(|s| (s.n as f64, s.median)).collect();
        out.svg("continuum.svg", "n", "median L2 trajectory distance", &[("median", pts)])?;
    }
    println!("median distance nonincreasing: {}", trend(&summary));
    Ok(())
}

pub fn continuity(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        batch: u64,
        pair: usize,
        trajectory_distance: f64,
        input_distance: f64,
        ratio: f64,
    }
    #[derive(Serialize)]
    struct BatchMax {
        n: usize,
        batch: u64,
        max_ratio: f64,
    }
    let kernel = cfg.kernel_spec()?;
    let d = cfg.dynamics()?;
    let pairs = cfg.replicas()?;
    let eps_max = d.perturbation.expect("validated");
    let points: Vec<(usize, u64, usize)> = cfg
        .resolutions
        .iter()
        .flat_map(|&n| cfg.seeds.iter().flat_map(move |&b| (0..pairs).map(move |p| (n, b, p))))
        .collect();
    let rows = exec::map_range(points.len(), |k| -> Result<Row> {
        let (n, b, p) = points[k];
        let mut rng = seed::rng(seed::derive(b, p as u64));
        let u = kernel.project(n)?;
        let eps = rng.gen_range(0.0..eps_max);
        let v = StepGraphon::dense(
            n,
            u.values().iter().map(|x| (x + eps * rng.gen_range(-1.0..1.0)).clamp(0.0, 1.0)).collect(),
        )?;
        let g = initial(d, n)?;
        let shift = rng.gen_range(0.0..eps_max);
        let h = GridFunction::new(g.values().iter().map(|x| x + shift * rng.gen_range(-1.0..1.0)).collect())?;
        let xi = parameters(d, n)?;
        let a = integrate(&u, &g, xi.as_ref(), d.coupling, d.sim())?;
        let bb = integrate(&v, &h, xi.as_ref(), d.coupling, d.sim())?;
        let num = trajectory_distance(&a, &bb)?;
        let den = d_inf_one(&u, &v, cfg.norm.mode(n))? + g.l2_distance(&h);
        Ok(Row { n, batch: b, pair: p, trajectory_distance: num, input_distance: den, ratio: num / den })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let maxima: Vec<BatchMax> = cfg
        .resolutions
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&b| (n, b)))
        .map(|(n, b)| BatchMax {
            n,
            batch: b,
            max_ratio: rows.iter().filter(|r| r.n == n && r.batch == b).map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    out.record_seeds("batches", cfg.seeds.iter().copied());
    out.record_seeds("norm_heuristic", [cfg.norm.seed]);
    record_dynamics_seeds(d, out);
    out.csv("continuity.csv", &rows)?;
    out.csv("continuity_maxima.csv", &maxima)?;
    for &n in &cfg.resolutions {
        let m: Vec<f64> = maxima.iter().filter(|r| r.n == n).map(|r| r.max_ratio).collect();
        let (lo, hi) = (m.iter().copied().fold(f64::INFINITY, f64::min), m.iter().copied().fold(0.0, f64::max));
        println!("n = {n}: batch maxima spread factor {:.4}", hi / lo);
    }
    Ok(())
}

pub fn ldp_mc(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        seed: u64,
        replicas: usize,
        p_hat: f64,
        std_err: f64,
        log_p_per_n2: f64,
        hits: usize,
        upsilon: f64,
        p_exact: Option<f64>,
        within_3se: Option<bool>,
    }
    let (kernel, target) = (cfg.kernel_spec()?, cfg.target_spec()?);
    let l = cfg.ldp()?;
    let delta = l.delta.expect("validated");
    let replicas = cfg.replicas()?;
    let rows = ladder(&cfg.resolutions, &cfg.seeds, |n, s| {
        let (wn, vn) = (kernel.project(n)?, target.project(n)?);
        let event = BallEvent::new(vn.clone(), delta, l.metric, cfg.norm.mode(n))?;
        let est = estimate_rare_event(&wn, &event, n, replicas, s)?;
        let p_exact = if n <= EXACT_EVENT_LIMIT {
            Some(exact_event_probability(&wn, |g| event.contains(g))?)
        } else {
            None
        };
        Ok(Row {
            n,
            seed: s,
            replicas,
            p_hat: est.p_hat,
            std_err: est.std_err,
            log_p_per_n2: est.log_p_per_n2,
            hits: est.hits,
            upsilon: upsilon(&vn, &wn)?.value,
            p_exact,
            within_3se: p_exact.map(|p| (est.p_hat - p).abs() <= (3.0 * est.std_err).max(1e-12)),
        })
    })?;
    out.record_seeds("replicas", cfg.seeds.iter().copied());
    out.record_seeds("norm_heuristic", [cfg.norm.seed]);
    out.csv("ldp_mc.csv", &rows)?;
    if cfg.plot {
        let pts = |f: fn(&Row) -> f64| cfg.resolutions.iter().map(|&n| (n as f64, median(rows.iter().filter(|r| r.n == n).map(f).collect()))).collect();
        out.svg("ldp_mc.svg", "n", "-(1/n^2) log p_hat", &[("estimate", pts(|r| r.log_p_per_n2)), ("upsilon", pts(|r| r.upsilon))])?;
    }
    Ok(())
}

pub fn rate(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        upsilon: f64,
        quotient_rate: f64,
        quotient_mode: String,
        sparse_rate: f64,
    }
    #[derive(Serialize)]
    struct LegendreRow {
        b: f64,
        rate: f64,
    }
    const EXACT_QUOTIENT_LIMIT: usize = 8;
    let (w, v) = (cfg.kernel_spec()?, cfg.target_spec()?);
    let rows = exec::map_range(cfg.resolutions.len(), |k| -> Result<Row> {
        let n = cfg.resolutions[k];
        let (wn, vn) = (w.project(n)?, v.project(n)?);
        let mode = if n <= EXACT_QUOTIENT_LIMIT {
            QuotientMode::Exact
        } else {
            QuotientMode::Heuristic { sweeps: cfg.norm.restarts, seed: cfg.norm.seed }
        };
        let q: RateReport = rate_quotient(&vn, &wn, mode)?;
        Ok(Row {
            n,
            upsilon: upsilon(&vn, &wn)?.value,
            quotient_rate: q.value,
            quotient_mode: serde_json::to_value(q.mode).expect("mode serializes").as_str().unwrap_or_default().to_string(),
            sparse_rate: sparse_rate(&vn, &wn)?.value,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    out.csv("rate.csv", &rows)?;
    let l = cfg.ldp()?;
    if let Some(law) = &l.law {
        let law: FiniteLaw = law.parse()?;
        let table: Vec<LegendreRow> = l.legendre_points.iter().map(|&b| LegendreRow { b, rate: legendre_rate(&law, b) }).collect();
        out.csv("legendre.csv", &table)?;
    }
    if cfg.resolutions.iter().any(|&n| n > EXACT_QUOTIENT_LIMIT) {
        out.record_seeds("quotient_heuristic", [cfg.norm.seed]);
    }
    Ok(())
}

pub fn staircase(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        source: String,
        level: usize,
        weak_distance: f64,
    }
    #[derive(Serialize)]
    struct Check {
        source: String,
        k: usize,
        segments: usize,
        max_mass_error: f64,
        monotone: bool,
    }
    let block = cfg.staircase.as_ref().expect("validated");
    let couplings: Vec<(String, DiscreteCoupling)> = match (&block.coupling, block.k) {
        (Some(p), _) => vec![("file".to_string(), DiscreteCoupling::read(p)?)],
        (None, Some(k)) => cfg
            .seeds
            .iter()
            .map(|&s| Ok((format!("seed{s}"), DiscreteCoupling::random(k, s)?)))
            .collect::<Result<_>>()?,
        (None, None) => unreachable!("validated"),
    };
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (source, nu) in &couplings {
        let theta = staircase_bijection(nu)?;
        let blocks = pushforward_blocks(&theta, nu.k())?;
        let err = blocks.iter().zip(nu.masses()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dist = staircase_convergence(nu, &cfg.resolutions)?;
        checks.push(Check {
            source: source.clone(),
            k: nu.k(),
            segments: theta.segments().len(),
            max_mass_error: err,
            monotone: dist.windows(2).all(|w| w[1] <= w[0]),
        });
        rows.extend(cfg.resolutions.iter().zip(&dist).map(|(&level, &d)| Row { source: source.clone(), level, weak_distance: d }));
        out.text(&format!("bijections/{source}.csv"), &theta.to_csv())?;
    }
    if block.coupling.is_none() {
        out.record_seeds("couplings", cfg.seeds.iter().copied());
    }
    out.csv("staircase.csv", &rows)?;
    out.csv("staircase_checks.csv", &checks)?;
    if cfg.plot {
        let series: Vec<(&str, Vec<(f64, f64)>)> = couplings
            .iter()
            .map(|(s, _)| {
                (s.as_str(), rows.iter().filter(|r| &r.source == s).map(|r| (r.level as f64, r.weak_distance)).collect())
            })
            .collect();
        out.svg("staircase.svg", "blocks", "weak distance", &series)?;
    }
    Ok(())
}

pub fn dynrate(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        lambda: f64,
        upsilon: f64,
        observable: f64,
        target: f64,
        cost: f64,
        iterations: usize,
        converged: bool,
    }
    let kernel = cfg.kernel_spec()?;
    let d = cfg.dynamics()?;
    let l = cfg.ldp()?;
    let base: DynRateSearch = l.search.unwrap_or_default();
    let (observable, target) = (l.observable.expect("validated"), l.observable_target.expect("validated"));
    let m = base.sim_resolution;
    let w = kernel.project(m)?;
    let g = initial(d, m)?;
    let xi = parameters(d, m)?;
    let results = exec::map_range(l.lambdas.len(), |k| {
        let search = DynRateSearch { penalty: l.lambdas[k], ..base };
        dynamical_rate_search(&w, &g, xi.as_ref(), d.coupling, d.sim(), observable, target, search)
    })
    .into_iter()
    .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (k, (lambda, r)) in l.lambdas.iter().zip(&results).enumerate() {
        out.text(&format!("dynrate/lambda{k}_graphon.csv"), &io::graphon_to_csv(&r.best_v))?;
        rows.push(Row {
            lambda: *lambda,
            upsilon: r.upsilon,
            observable: r.observable,
            target,
            cost: r.cost,
            iterations: r.iterations,
            converged: r.converged,
        });
    }
    out.record_seeds("search", [base.seed]);
    record_dynamics_seeds(d, out);
    out.csv("dynrate.csv", &rows)?;
    if cfg.plot {
        let pts = rows.iter().map(|r| (r.lambda.log10(), r.upsilon)).collect();
        out.svg("dynrate.svg", "log10 lambda", "upsilon of minimizer", &[("upsilon", pts)])?;
    }
    Ok(())
}

