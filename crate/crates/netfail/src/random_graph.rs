//! Erdős–Rényi G(n, p) generation and the connectivity-threshold
//! experiment at p = c ln(n) / n.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{indexed_uniform, substream_seed};

/// G(n, p): each of the n(n-1)/2 pairs is an edge independently with
/// probability p. Each pair gets its own counter-based draw, so the result
/// does not depend on iteration order.
pub fn gnp(n: usize, p: f64, rng_seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut pairs = Vec::new();
    let mut index = 0u64;
    for u in 0..n {
        for v in (u + 1)..n {
            if indexed_uniform(rng_seed, index) < p {
                pairs.push((u, v));
            }
            index += 1;
        }
    }
    Graph::from_edge_list(n, &pairs)
}

/// The paper's critical connection probability c ln(n) / n, clamped to 1.
/// The connectivity bound is claimed for c > 3; smaller c is outside the
/// theorem's regime (the experiment still runs there as a control).
pub fn critical_p(n: usize, c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "threshold needs n >= 2, got {n}"
        )));
    }
    if c <= 0.0 {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    Ok((c * (n as f64).ln() / n as f64).min(1.0))
}

pub fn below_theorem_regime(c: f64) -> bool {
    c <= 3.0
}

/// Result of a connectivity-threshold run. The pass flag compares the
/// empirical connection frequency against the asymptotic bound 1 - 1/n
/// minus three standard errors of sampling slack.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub trials: usize,
    pub connected_count: usize,
    pub empirical_probability: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn threshold_experiment(
    n: usize,
    c: f64,
    trials: usize,
    rng_seed: u64,
) -> Result<ThresholdReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let p = critical_p(n, c)?;
    let connected_count = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let g = gnp(n, p, substream_seed(rng_seed, trial as u64))
                .expect("p validated above");
            usize::from(g.is_connected())
        })
        .sum();
    let empirical_probability = connected_count as f64 / trials as f64;
    let bound = 1.0 - 1.0 / n as f64;
    let q = 1.0 / n as f64;
    let slack = 3.0 * (q * (1.0 - q) / trials as f64).sqrt();
    Ok(ThresholdReport {
        n,
        c,
        p,
        trials,
        connected_count,
        empirical_probability,
        bound,
        pass: empirical_probability >= bound - slack,
    })
}
