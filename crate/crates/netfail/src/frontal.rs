//! Reliability reinforcement through a large random frontal layer: two
//! input sets X (size r) and Y (size k) wired at random to a frontal set A
//! of N vertices. A frontal vertex is active when it links to at least one
//! vertex on each side; the active set realizes the connection X -> A -> Y.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::substream_seed;

/// Bit-packed N x cols incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Incidence {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl Incidence {
    fn generate(rows: usize, cols: usize, p: f64, rng: &mut ChaCha8Rng) -> Incidence {
        let words_per_row = cols.div_ceil(64).max(1);
        let mut inc = Incidence {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        };
        for i in 0..rows {
            inc.redraw_row(i, p, rng);
        }
        inc
    }

    fn redraw_row(&mut self, row: usize, p: f64, rng: &mut ChaCha8Rng) {
        let start = row * self.words_per_row;
        self.words[start..start + self.words_per_row].fill(0);
        for j in 0..self.cols {
            if rng.gen::<f64>() < p {
                self.words[start + j / 64] |= 1 << (j % 64);
            }
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    fn row_any(&self, i: usize) -> bool {
        let start = i * self.words_per_row;
        self.words[start..start + self.words_per_row]
            .iter()
            .any(|&w| w != 0)
    }

    #[cfg(test)]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Random frontal system: incidence of the N frontal vertices with X and Y.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontalSystem {
    n_frontal: usize,
    r: usize,
    k: usize,
    p: f64,
    x_links: Incidence,
    y_links: Incidence,
}

fn check_domains(n_frontal: usize, r: usize, k: usize, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if n_frontal == 0 || r == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "frontal system sizes must be >= 1".into(),
        ));
    }
    Ok(())
}

impl FrontalSystem {
    /// Independent Bernoulli(p) incidences; deterministic per seed.
    pub fn generate(n_frontal: usize, r: usize, k: usize, p: f64, rng_seed: u64) -> Result<Self> {
        check_domains(n_frontal, r, k, p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let x_links = Incidence::generate(n_frontal, r, p, &mut rng);
        let y_links = Incidence::generate(n_frontal, k, p, &mut rng);
        Ok(FrontalSystem {
            n_frontal,
            r,
            k,
            p,
            x_links,
            y_links,
        })
    }

    pub fn n_frontal(&self) -> usize {
        self.n_frontal
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn x_link(&self, frontal: usize, x: usize) -> bool {
        self.x_links.get(frontal, x)
    }

    pub fn y_link(&self, frontal: usize, y: usize) -> bool {
        self.y_links.get(frontal, y)
    }

    pub fn x_link_count(&self) -> usize {
        self.x_links.ones()
    }

    /// Frontal vertices with at least one x-link and at least one y-link.
    pub fn active_set(&self) -> Vec<usize> {
        (0..self.n_frontal)
            .filter(|&i| self.x_links.row_any(i) && self.y_links.row_any(i))
            .collect()
    }

    pub fn active_count(&self) -> usize {
        (0..self.n_frontal)
            .filter(|&i| self.x_links.row_any(i) && self.y_links.row_any(i))
            .count()
    }

    /// Redraw only the incidence rows of the damaged frontal vertices, at
    /// the system's original p; every other row is untouched bit for bit.
    /// Each damaged row gets its own substream of `rng_seed`.
    pub fn regenerate_after_damage(&self, damaged: &[usize], rng_seed: u64) -> Result<Self> {
        let mut out = self.clone();
        for &v in damaged {
            if v >= self.n_frontal {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n_frontal,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(rng_seed, v as u64));
            out.x_links.redraw_row(v, self.p, &mut rng);
            out.y_links.redraw_row(v, self.p, &mut rng);
        }
        Ok(out)
    }
}

/// Probability that a frontal vertex connects to at least one vertex of X
/// and at least one of Y: (1 - (1-p)^r)(1 - (1-p)^k), evaluated through
/// log1p/expm1 so small p does not lose precision.
pub fn connection_probability(p: f64, r: usize, k: usize) -> Result<f64> {
    check_domains(1, r, k, p)?;
    if p == 1.0 {
        return Ok(1.0);
    }
    let log_miss = (-p).ln_1p();
    let hit = |m: usize| -((m as f64 * log_miss).exp_m1());
    Ok(hit(r) * hit(k))
}

/// Small-p leading order rk p^2; valid as p -> 0 with r, k fixed.
pub fn connection_probability_approx(p: f64, r: usize, k: usize) -> f64 {
    (r * k) as f64 * p * p
}

/// Working connection probability (N r)^{-1/2}, clamped to 1.
pub fn default_p(n_frontal: usize, r: usize) -> Result<f64> {
    if n_frontal == 0 || r == 0 {
        return Err(Error::InvalidParameter(
            "default_p needs positive sizes".into(),
        ));
    }
    Ok((1.0 / ((n_frontal * r) as f64).sqrt()).min(1.0))
}

/// Closed-form activation statistics of the frontal layer. With
/// p = default_p the expected active count approaches k as N grows.
#[derive(Debug, Clone, Serialize)]
pub struct ActivationStats {
    pub p_c: f64,
    pub expected_active: f64,
    pub variance: f64,
}

pub fn activation_stats(n_frontal: usize, p: f64, r: usize, k: usize) -> Result<ActivationStats> {
    check_domains(n_frontal, r, k, p)?;
    let p_c = connection_probability(p, r, k)?;
    Ok(ActivationStats {
        p_c,
        expected_active: n_frontal as f64 * p_c,
        variance: n_frontal as f64 * p_c * (1.0 - p_c),
    })
}

/// Expected overlap N p_c^2 of two independently generated active sets.
/// A derived extension, not a closed form from the source material; with
/// p = default_p it is about k^2 / N.
pub fn overlap_estimate(n_frontal: usize, r: usize, k: usize, p: f64) -> Result<f64> {
    let p_c = connection_probability(p, r, k)?;
    Ok(n_frontal as f64 * p_c * p_c)
}

/// Sample mean and variance of the active-set size over independent
/// generations, with standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloStats {
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: f64,
}

pub fn monte_carlo_stats(
    n_frontal: usize,
    r: usize,
    k: usize,
    p: f64,
    trials: usize,
    rng_seed: u64,
) -> Result<MonteCarloStats> {
    check_domains(n_frontal, r, k, p)?;
    if trials < 2 {
        return Err(Error::InvalidParameter("trials must be >= 2".into()));
    }
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            FrontalSystem::generate(n_frontal, r, k, p, substream_seed(rng_seed, trial as u64))
                .expect("domains validated above")
                .active_count()
        })
        .collect();
    Ok(stats_from_counts(&counts))
}

/// Sample statistics of pre-collected active-set counts.
pub fn stats_from_counts(counts: &[usize]) -> MonteCarloStats {
    let trials = counts.len();
    let mean = counts.iter().sum::<usize>() as f64 / trials as f64;
    let variance = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (trials as f64 - 1.0);
    MonteCarloStats {
        trials,
        mean,
        variance,
        mean_stderr: (variance / trials as f64).sqrt(),
    }
}
