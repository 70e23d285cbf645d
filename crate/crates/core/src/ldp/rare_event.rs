//! Importance-sampling estimates of rare-event probabilities for directed
//! W-random graphs, and exhaustive enumeration for tiny resolutions.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graphon::{cut_norm, inf_one_norm, NormMode, StepGraphon};
use crate::random_graphs::{log_likelihood_ratio, sample_tilted, AdjacencyGraph};
use crate::sum::{exact_sum, ExactSum};
use crate::{exec, seed};

/// Largest resolution accepted by [`exact_event_probability`].
pub const EXACT_EVENT_LIMIT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventMetric {
    InfOne,
    Cut,
}

/// The ball `{G : ||G - V||_metric <= radius}` around a target graphon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallEvent {
    pub target: StepGraphon,
    pub radius: f64,
    pub metric: EventMetric,
    pub norm_mode: NormMode,
}

impl BallEvent {
    pub fn new(target: StepGraphon, radius: f64, metric: EventMetric, norm_mode: NormMode) -> Result<Self> {
        if !target.is_dense() {
            return invalid("event target must be a dense graphon");
        }
        if !(radius >= 0.0) {
            return invalid(format!("event radius must be nonnegative, got {radius}"));
        }
        Ok(Self { target, radius, metric, norm_mode })
    }

    /// Distance from the embedded graph to the target, on the graph's grid.
    pub fn distance(&self, g: &AdjacencyGraph) -> Result<f64> {
        let target = if self.target.resolution() == g.n() {
            self.target.clone()
        } else {
            crate::graphon::project_step(&self.target, g.n())?
        };
        let diff = g.embed(false).difference(&target)?;
        match self.metric {
            EventMetric::InfOne => inf_one_norm(&diff, self.norm_mode),
            EventMetric::Cut => cut_norm(&diff, self.norm_mode),
        }
    }

    pub fn contains(&self, g: &AdjacencyGraph) -> Result<bool> {
        Ok(self.distance(g)? <= self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RareEventEstimate {
    pub p_hat: f64,
    /// `-(1/n^2) log p_hat`; `inf` when no replica hit the event.
    #[serde(with = "super::report::inf_as_string")]
    pub log_p_per_n2: f64,
    pub std_err: f64,
    pub replicas: usize,
    pub event: BallEvent,
    /// Set when the raw estimate exceeded 1 and was clipped.
    #[serde(skip)]
    pub clipped: bool,
    /// Number of samples that landed in the event.
    #[serde(skip)]
    pub hits: usize,
}

/// Weighted Monte Carlo estimate: mean, standard error, hits, clipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub hits: usize,
    pub clipped: bool,
}

/// Estimates `P_W(G in A)` at resolution `n` by sampling from `V` and
/// reweighting; `V = W` gives plain Monte Carlo.
pub fn estimate_probability<P>(
    w: &StepGraphon,
    v: &StepGraphon,
    replicas: usize,
    seed: u64,
    predicate: P,
) -> Result<WeightedEstimate>
where
    P: Fn(&AdjacencyGraph) -> Result<bool> + Sync + Send,
{
    if replicas < 2 {
        return invalid("need at least two replicas");
    }
    let samples = exec::map_range(replicas, |r| -> Result<f64> {
        let s = sample_tilted(v, w, seed::derive(seed, r as u64))?;
        Ok(if predicate(&s.graph)? { s.log_weight.exp() } else { 0.0 })
    });
    let weights = samples.into_iter().collect::<Result<Vec<f64>>>()?;
    let hits = weights.iter().filter(|&&x| x > 0.0).count();
    let mean = exact_sum(weights.iter().copied()) / replicas as f64;
    let var = exact_sum(weights.iter().map(|x| (x - mean).powi(2)))
        / (replicas - 1) as f64;
    let clipped = mean > 1.0;
    Ok(WeightedEstimate {
        p_hat: mean.min(1.0),
        std_err: (var / replicas as f64).sqrt(),
        hits,
        clipped,
    })
}

/// Estimates `P(G_n^W in ball)` with samples tilted toward the ball center.
///
/// `w` and the event target are projected to resolution `n`.
pub fn estimate_rare_event(
    w: &StepGraphon,
    event: &BallEvent,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<RareEventEstimate> {
    if !w.is_dense() {
        return invalid("W must be a dense graphon");
    }
    let project = |g: &StepGraphon| crate::graphon::project_step(g, n);
    let (wn, vn) = (project(w)?, project(&event.target)?);
    let local = BallEvent { target: vn.clone(), ..event.clone() };
    if n <= EXACT_EVENT_LIMIT && !local.norm_mode.is_exact() {
        verify_against_exact(&local)?;
    }
    let est = estimate_probability(&wn, &vn, replicas, seed, |g| local.contains(g))?;
    Ok(RareEventEstimate {
        p_hat: est.p_hat,
        log_p_per_n2: 0.0 - est.p_hat.ln() / (n * n) as f64,
        std_err: est.std_err,
        replicas,
        event: event.clone(),
        clipped: est.clipped,
        hits: est.hits,
    })
}

/// Checks that the frozen heuristic predicate agrees with the exact one on
/// every outcome at the target's resolution.
fn verify_against_exact(event: &BallEvent) -> Result<()> {
    let exact = BallEvent { norm_mode: NormMode::Exact, ..event.clone() };
    enumerate(event.target.resolution(), |g| {
        if event.contains(g)? != exact.contains(g)? {
            return Err(Error::Consistency(format!(
                "heuristic norm configuration {:?} disagrees with the exact norm on a {}-node outcome",
                event.norm_mode,
                g.n()
            )));
        }
        Ok(())
    })
}

fn enumerate<F>(n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&AdjacencyGraph) -> Result<()>,
{
    if n > EXACT_EVENT_LIMIT {
        return Err(Error::TooLargeForExact {
            what: "exhaustive event enumeration",
            n,
            limit: EXACT_EVENT_LIMIT,
        });
    }
    let cells = n * n;
    for mask in 0u32..(1u32 << cells) {
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|i| (0..n).map(|j| ((mask >> (i * n + j)) & 1) as u8).collect())
            .collect();
        visit(&AdjacencyGraph::from_rows(&rows)?)?;
    }
    Ok(())
}

fn pattern_probability(bits: &[u8], w: &StepGraphon) -> f64 {
    bits.iter()
        .zip(w.values())
        .map(|(&x, &p)| if x == 1 { p } else { 1.0 - p })
        .product()
}

/// `P_W(G in A)` by summing over all `2^(n^2)` directed patterns (n <= 3).
pub fn exact_event_probability<P>(w: &StepGraphon, predicate: P) -> Result<f64>
where
    P: Fn(&AdjacencyGraph) -> Result<bool>,
{
    if !w.is_dense() {
        return invalid("W must be a dense graphon");
    }
    let mut acc = ExactSum::new();
    enumerate(w.resolution(), |g| {
        if predicate(g)? {
            acc.add(pattern_probability(g.bits(), w));
        }
        Ok(())
    })?;
    Ok(acc.value())
}

/// `E_V[exp(log dW/dV) 1_A]` by exhaustive enumeration (n <= 3).
///
/// Equals [`exact_event_probability`] whenever `W` is absolutely continuous
/// with respect to `V` on `A`.
pub fn exact_tilted_expectation<P>(v: &StepGraphon, w: &StepGraphon, predicate: P) -> Result<f64>
where
    P: Fn(&AdjacencyGraph) -> Result<bool>,
{
    if v.resolution() != w.resolution() {
        return Err(Error::ResolutionMismatch(v.resolution(), w.resolution()));
    }
    let mut acc = ExactSum::new();
    enumerate(w.resolution(), |g| {
        if predicate(g)? {
            let p = pattern_probability(g.bits(), v);
            if p > 0.0 {
                acc.add(p * log_likelihood_ratio(g.bits(), v, w).exp());
            }
        }
        Ok(())
    })?;
    Ok(acc.value())
}
