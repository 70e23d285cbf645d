//! Seeded samplers for W-random graphs.
//!
//! Row `i` of a sample draws from its own ChaCha stream `(seed, i)`, so rows
//! can be filled by any number of workers and the bits never change. Every
//! ordered pair, self-pairs included, is an independent Bernoulli draw.

use rand::Rng;

use super::adjacency::AdjacencyGraph;
use crate::error::{invalid, Result};
use crate::graphon::StepGraphon;
use crate::{exec, seed};

fn sample_bits(probs: &[f64], n: usize, seed: u64, directed: bool) -> Vec<u8> {
    let mut bits = vec![0u8; n * n];
    exec::for_each_row(&mut bits, n, |i, row| {
        let mut rng = seed::stream_rng(seed, i as u64);
        let start = if directed { 0 } else { i };
        for j in start..n {
            let u: f64 = rng.gen();
            row[j] = (u < probs[i * n + j]) as u8;
        }
    });
    if !directed {
        for i in 0..n {
            for j in 0..i {
                bits[i * n + j] = bits[j * n + i];
            }
        }
    }
    bits
}

fn require_kernel(w: &StepGraphon) -> Result<()> {
    if w.bound() != 1.0 {
        return invalid(format!("sampling kernel must have bound 1, got {}", w.bound()));
    }
    Ok(())
}

/// Independent `Bernoulli(W_ij)` entries; undirected samples draw the upper
/// triangle (diagonal included) and mirror it.
pub fn sample_w_random(w: &StepGraphon, seed: u64, directed: bool) -> Result<AdjacencyGraph> {
    require_kernel(w)?;
    let n = w.resolution();
    let bits = sample_bits(w.values(), n, seed, directed);
    Ok(AdjacencyGraph::from_parts(n, bits, directed, 1.0, seed, format!("W^{n}")))
}

/// Directed `Bernoulli(alpha W_ij)` entries.
pub fn sample_sparse(w: &StepGraphon, alpha: f64, seed: u64) -> Result<AdjacencyGraph> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("density {alpha} outside (0, 1]"));
    }
    if alpha * w.max_value() > 1.0 {
        return invalid(format!(
            "alpha * W reaches {} > 1, not a probability",
            alpha * w.max_value()
        ));
    }
    let n = w.resolution();
    let probs: Vec<f64> = w.values().iter().map(|v| alpha * v).collect();
    let bits = sample_bits(&probs, n, seed, true);
    Ok(AdjacencyGraph::from_parts(n, bits, true, alpha, seed, format!("alpha W^{n}")))
}

/// A sample from the tilted product measure and its likelihood ratio.
#[derive(Debug, Clone)]
pub struct TiltedSample {
    pub graph: AdjacencyGraph,
    /// `log d(mu_W)/d(mu_V)` at the sample; `-inf` where `W` gives the drawn
    /// pattern zero probability.
    pub log_weight: f64,
}

/// Log-likelihood ratio of a directed 0/1 pattern under `W` versus `V`.
pub fn log_likelihood_ratio(bits: &[u8], v: &StepGraphon, w: &StepGraphon) -> f64 {
    bits.iter()
        .zip(v.values().iter().zip(w.values()))
        .map(|(&x, (&vv, &ww))| {
            if x == 1 {
                ww.ln() - vv.ln()
            } else {
                (1.0 - ww).ln() - (1.0 - vv).ln()
            }
        })
        .sum()
}

/// Directed sample with `Bernoulli(V_ij)` entries, weighted for estimating
/// probabilities under the `W` measure.
pub fn sample_tilted(v: &StepGraphon, w: &StepGraphon, seed: u64) -> Result<TiltedSample> {
    require_kernel(v)?;
    require_kernel(w)?;
    if v.resolution() != w.resolution() {
        return Err(crate::Error::ResolutionMismatch(v.resolution(), w.resolution()));
    }
    let n = v.resolution();
    let bits = sample_bits(v.values(), n, seed, true);
    let log_weight = log_likelihood_ratio(&bits, v, w);
    let graph = AdjacencyGraph::from_parts(n, bits, true, 1.0, seed, format!("V^{n}"));
    Ok(TiltedSample { graph, log_weight })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_kernels() {
        let one = StepGraphon::constant(7, 1.0).unwrap();
        let zero = StepGraphon::constant(7, 0.0).unwrap();
        for s in 0..5 {
            assert_eq!(sample_w_random(&one, s, true).unwrap().edge_count(), 49);
            assert_eq!(sample_w_random(&zero, s, false).unwrap().edge_count(), 0);
        }
    }

    #[test]
    fn undirected_samples_are_symmetric() {
        let w = StepGraphon::constant(9, 0.5).unwrap();
        let g = sample_w_random(&w, 4, false).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let w = crate::graphon::KernelSpec::Product.project(40).unwrap();
        let a = sample_w_random(&w, 11, true).unwrap();
        let b = exec::sequential(|| sample_w_random(&w, 11, true).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, sample_w_random(&w, 12, true).unwrap());
    }

    #[test]
    fn sparse_rejects_invalid_probabilities() {
        let w = StepGraphon::constant(3, 1.0).unwrap();
        assert!(sample_sparse(&w, 1.0, 1).is_ok());
        let big = StepGraphon::new(3, vec![2.0; 9], 2.0).unwrap();
        assert!(sample_sparse(&big, 0.6, 1).is_err());
        assert!(sample_sparse(&w, 0.0, 1).is_err());
        let dense = sample_w_random(&w, 5, true).unwrap();
        assert_eq!(sample_sparse(&w, 1.0, 5).unwrap().bits(), dense.bits());
    }

    #[test]
    fn tilted_weights() {
        let w = StepGraphon::constant(2, 0.5).unwrap();
        let one = StepGraphon::constant(2, 1.0).unwrap();
        let s = sample_tilted(&one, &w, 3).unwrap();
        assert_eq!(s.graph.edge_count(), 4);
        assert!((s.log_weight + 4.0 * 2f64.ln()).abs() < 1e-15);
        let same = sample_tilted(&w, &w, 3).unwrap();
        assert_eq!(same.log_weight, 0.0);
        let zero = StepGraphon::constant(2, 0.0).unwrap();
        let s = sample_tilted(&w, &zero, 8).unwrap();
        assert_eq!(s.log_weight == f64::NEG_INFINITY, s.graph.edge_count() > 0);
    }
}
