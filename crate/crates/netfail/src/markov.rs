//! Probabilistic damage dynamics: continuous-time evolution pi(t) = pi(0) e^{At},
//! discrete chain stepping, ergodic-class detection, the dominant damage
//! rate, stochastic SI epidemic simulation, and the exact configuration-space
//! chain it is cross-checked against.
//!
//! Two readings of the state vector coexist: the exact chain evolves a
//! distribution over whole-network damage configurations (rigorous, small n),
//! while general matrix evolution also accepts per-vertex mean-field
//! marginals supplied by the caller. `StateSemantics` records which one a
//! vector carries.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::matrix::Matrix;
use crate::rng::substream_seed;
use crate::spectral;

const SUM_TOL: f64 = 1e-9;
const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateSemantics {
    /// Probability distribution over network states; entries sum to 1.
    Distribution,
    /// Independent per-vertex damage marginals; no sum constraint.
    Marginal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    probabilities: Vec<f64>,
    semantics: StateSemantics,
}

impl StateVector {
    /// A distribution; tiny negative roundoff (>= -1e-9) is clamped to zero,
    /// anything worse is an error, and the sum must be 1 within 1e-9.
    pub fn distribution(probabilities: Vec<f64>) -> Result<StateVector> {
        let cleaned = clamp_probabilities(probabilities)?;
        let sum: f64 = cleaned.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotDistribution(sum));
        }
        Ok(StateVector {
            probabilities: cleaned,
            semantics: StateSemantics::Distribution,
        })
    }

    /// Per-vertex marginals in [0, 1]; no sum constraint.
    pub fn marginal(probabilities: Vec<f64>) -> Result<StateVector> {
        let cleaned = clamp_probabilities(probabilities)?;
        Ok(StateVector {
            probabilities: cleaned,
            semantics: StateSemantics::Marginal,
        })
    }

    pub fn point_mass(n: usize, state: usize) -> StateVector {
        let mut p = vec![0.0; n];
        p[state] = 1.0;
        StateVector {
            probabilities: p,
            semantics: StateSemantics::Distribution,
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn semantics(&self) -> StateSemantics {
        self.semantics
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

fn clamp_probabilities(mut p: Vec<f64>) -> Result<Vec<f64>> {
    for x in &mut p {
        if *x < -SUM_TOL {
            return Err(Error::NegativeProbability { value: *x });
        }
        if *x < CLAMP_TOL && *x < 0.0 {
            *x = 0.0;
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateKind {
    /// Off-diagonal >= 0, rows sum to zero; evolution preserves the simplex.
    Generator,
    /// No validation; used for mean-field adjacency-rate dynamics.
    General,
}

#[derive(Debug, Clone)]
pub struct RateMatrix {
    matrix: Matrix,
    kind: RateKind,
}

impl RateMatrix {
    pub fn generator(matrix: Matrix) -> Result<RateMatrix> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        for i in 0..matrix.rows() {
            let mut sum = 0.0;
            for j in 0..matrix.cols() {
                let a = matrix[(i, j)];
                if i != j && a < -SUM_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "generator off-diagonal ({i},{j}) = {a} is negative"
                    )));
                }
                sum += a;
            }
            if sum.abs() > SUM_TOL * matrix.max_abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "generator row {i} sums to {sum}"
                )));
            }
        }
        Ok(RateMatrix {
            matrix,
            kind: RateKind::Generator,
        })
    }

    pub fn general(matrix: Matrix) -> Result<RateMatrix> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        Ok(RateMatrix {
            matrix,
            kind: RateKind::General,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> RateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Row-stochastic transition matrix of a discrete chain.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    matrix: Matrix,
}

impl TransitionMatrix {
    pub fn new(matrix: Matrix) -> Result<TransitionMatrix> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        for i in 0..matrix.rows() {
            let mut sum = 0.0;
            for j in 0..matrix.cols() {
                let p = matrix[(i, j)];
                if !(-SUM_TOL..=1.0 + SUM_TOL).contains(&p) {
                    return Err(Error::InvalidProbability(p));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(Error::NotStochastic { row: i, sum });
            }
        }
        Ok(TransitionMatrix { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// pi(t) = pi(0) e^{At}. For a generator the output is validated as a
/// distribution (simplex preservation up to roundoff).
pub fn evolve_continuous(pi0: &StateVector, a: &RateMatrix, t: f64) -> Result<StateVector> {
    if pi0.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: pi0.len(),
            right: a.dim(),
        });
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("negative time {t}")));
    }
    let exp = spectral::matrix_exponential(a.matrix(), t)?;
    let out = exp.row_vec_mul(pi0.probabilities());
    match (a.kind(), pi0.semantics()) {
        (RateKind::Generator, StateSemantics::Distribution) => StateVector::distribution(out),
        _ => Ok(StateVector {
            probabilities: out,
            semantics: pi0.semantics(),
        }),
    }
}

/// pi P^steps by repeated vector-matrix products.
pub fn evolve_discrete(pi0: &StateVector, p: &TransitionMatrix, steps: usize) -> Result<StateVector> {
    if pi0.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            left: pi0.len(),
            right: p.dim(),
        });
    }
    let mut current = pi0.probabilities().to_vec();
    for _ in 0..steps {
        current = p.matrix().row_vec_mul(&current);
    }
    match pi0.semantics() {
        StateSemantics::Distribution => StateVector::distribution(current),
        StateSemantics::Marginal => StateVector::marginal(current),
    }
}

/// Partition into recurrent (ergodic) classes and the transient remainder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErgodicClasses {
    /// Closed communicating classes, sorted by smallest member.
    pub recurrent: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
}

/// Strongly connected components of the positive-entry digraph; components
/// with no outgoing condensation edge are the ergodic classes, the rest are
/// transient. These classes are the domains of guaranteed final damage.
pub fn ergodic_classes(p: &TransitionMatrix) -> ErgodicClasses {
    let n = p.dim();
    let m = p.matrix();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| m[(i, j)] > 0.0).collect())
        .collect();
    let comp = tarjan_scc(&succ);
    let n_comps = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut closed = vec![true; n_comps];
    for (i, next) in succ.iter().enumerate() {
        for &j in next {
            if comp[i] != comp[j] {
                closed[comp[i]] = false;
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comps];
    for (i, &c) in comp.iter().enumerate() {
        members[c].push(i);
    }
    let mut recurrent = Vec::new();
    let mut transient = Vec::new();
    for (c, mut verts) in members.into_iter().enumerate() {
        verts.sort_unstable();
        if closed[c] {
            recurrent.push(verts);
        } else {
            transient.extend(verts);
        }
    }
    recurrent.sort_by_key(|c| c[0]);
    transient.sort_unstable();
    ErgodicClasses {
        recurrent,
        transient,
    }
}

fn tarjan_scc(succ: &[Vec<usize>]) -> Vec<usize> {
    // Iterative Tarjan to survive deep chains.
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut n_comps = 0usize;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call_stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut child)) = call_stack.last_mut() {
            if *child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < succ[v].len() {
                let w = succ[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = n_comps;
                        if w == v {
                            break;
                        }
                    }
                    n_comps += 1;
                }
                call_stack.pop();
                if let Some(&mut (parent, _)) = call_stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    comp
}

/// Dominant eigenvalue of the rate/adjacency matrix: the paper's average
/// connection count per vertex, governing the early damage-growth rate.
pub fn damage_rate(m: &Matrix) -> Result<f64> {
    spectral::dominant_eigenvalue(m, 1e-10, 100_000)
}

/// Per-edge transmission rates: one uniform value or an explicit map keyed
/// by unordered vertex pairs.
#[derive(Debug, Clone)]
pub enum EdgeRates {
    Uniform(f64),
    PerEdge(HashMap<(VertexId, VertexId), f64>),
}

impl EdgeRates {
    fn rate(&self, u: VertexId, v: VertexId) -> f64 {
        match self {
            EdgeRates::Uniform(r) => *r,
            EdgeRates::PerEdge(map) => *map.get(&(u.min(v), u.max(v))).unwrap_or(&0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = match self {
            EdgeRates::Uniform(r) => (!r.is_finite() || *r < 0.0).then_some(*r),
            EdgeRates::PerEdge(map) => map
                .values()
                .find(|r| !r.is_finite() || **r < 0.0)
                .copied(),
        };
        match bad {
            Some(r) => Err(Error::InvalidParameter(format!("invalid rate {r}"))),
            None => Ok(()),
        }
    }
}

/// Monte-Carlo per-vertex damage probability estimates at the sample times.
#[derive(Debug, Clone, Serialize)]
pub struct EpidemicOutcome {
    pub trials: usize,
    pub times: Vec<f64>,
    /// vertex_probabilities[time_index][vertex]
    pub vertex_probabilities: Vec<Vec<f64>>,
    pub standard_errors: Vec<Vec<f64>>,
}

/// Continuous-time SI process with exponential clocks on each
/// susceptible-damaged edge, simulated by the Gillespie direct method.
/// Trial `i` always draws from substream (rng_seed, i), so estimates are
/// identical for any trial partitioning or thread count.
pub fn simulate_epidemic(
    g: &Graph,
    rates: &EdgeRates,
    seeds: &[VertexId],
    horizon: f64,
    sample_times: &[f64],
    trials: usize,
    rng_seed: u64,
) -> Result<EpidemicOutcome> {
    rates.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    for &s in seeds {
        if s >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: s, n: g.n() });
        }
    }
    if sample_times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParameter("sample times must be >= 0".into()));
    }
    let n = g.n();
    let nt = sample_times.len();

    let counts = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let infection = run_si_trial(g, rates, seeds, horizon, substream_seed(rng_seed, trial as u64));
            let mut local = vec![vec![0u64; n]; nt];
            for (ti, &t) in sample_times.iter().enumerate() {
                for (v, &inf) in infection.iter().enumerate() {
                    if inf <= t {
                        local[ti][v] += 1;
                    }
                }
            }
            local
        })
        .reduce(
            || vec![vec![0u64; n]; nt],
            |mut acc, local| {
                for (a, l) in acc.iter_mut().zip(local) {
                    for (x, y) in a.iter_mut().zip(l) {
                        *x += y;
                    }
                }
                acc
            },
        );

    let vertex_probabilities: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / trials as f64).collect())
        .collect();
    let standard_errors = vertex_probabilities
        .iter()
        .map(|row| {
            row.iter()
                .map(|&p| (p * (1.0 - p) / trials as f64).sqrt())
                .collect()
        })
        .collect();
    Ok(EpidemicOutcome {
        trials,
        times: sample_times.to_vec(),
        vertex_probabilities,
        standard_errors,
    })
}

fn run_si_trial(
    g: &Graph,
    rates: &EdgeRates,
    seeds: &[VertexId],
    horizon: f64,
    seed: u64,
) -> Vec<f64> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut infection = vec![f64::INFINITY; n];
    let mut damaged = vec![false; n];
    for &s in seeds {
        infection[s] = 0.0;
        damaged[s] = true;
    }
    let mut t = 0.0;
    loop {
        // Active transmission channels and their rates.
        let mut channels: Vec<(VertexId, f64)> = Vec::new();
        let mut total = 0.0;
        for v in 0..n {
            if damaged[v] {
                continue;
            }
            let r: f64 = g
                .neighbors(v)
                .iter()
                .filter(|&&u| damaged[u])
                .map(|&u| rates.rate(u, v))
                .sum();
            if r > 0.0 {
                channels.push((v, r));
                total += r;
            }
        }
        if total == 0.0 {
            break;
        }
        t += -rng.gen::<f64>().ln() / total;
        if t > horizon {
            break;
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = channels[channels.len() - 1].0;
        for &(v, r) in &channels {
            if pick < r {
                chosen = v;
                break;
            }
            pick -= r;
        }
        damaged[chosen] = true;
        infection[chosen] = t;
    }
    infection
}

pub const EXACT_CHAIN_LIMIT: usize = 14;

/// Exact configuration-space chain: one state per damage configuration
/// S with seeds ⊆ S, transition S -> S ∪ {v} at rate Σ rate(u, v) over
/// damaged neighbors u of v.
#[derive(Debug, Clone)]
pub struct ExactChain {
    states: Vec<u64>,
    state_index: HashMap<u64, usize>,
    generator: RateMatrix,
    initial: StateVector,
    n_vertices: usize,
}

impl ExactChain {
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn generator(&self) -> &RateMatrix {
        &self.generator
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_of(&self, mask: u64) -> Option<usize> {
        self.state_index.get(&mask).copied()
    }

    pub fn evolve(&self, t: f64) -> Result<StateVector> {
        evolve_continuous(&self.initial, &self.generator, t)
    }

    /// Per-vertex damage marginals of a state distribution. Sums over many
    /// states can overshoot 1 by a few ulps, so the result is clamped to
    /// [0, 1].
    pub fn vertex_marginals(&self, pi: &StateVector) -> Vec<f64> {
        let mut marg = vec![0.0; self.n_vertices];
        for (state, &mask) in self.states.iter().enumerate() {
            let p = pi.probabilities()[state];
            if p == 0.0 {
                continue;
            }
            for (v, m) in marg.iter_mut().enumerate() {
                if mask >> v & 1 == 1 {
                    *m += p;
                }
            }
        }
        for m in &mut marg {
            *m = m.clamp(0.0, 1.0);
        }
        marg
    }

    /// Probability mass on the fully damaged configuration.
    pub fn fully_damaged_probability(&self, pi: &StateVector) -> f64 {
        let full = (1u64 << self.n_vertices) - 1;
        self.state_of(full)
            .map_or(0.0, |i| pi.probabilities()[i])
    }
}

pub fn exact_state_chain(
    g: &Graph,
    rates: &EdgeRates,
    seeds: &[VertexId],
    limit: usize,
) -> Result<ExactChain> {
    rates.validate()?;
    let n = g.n();
    if n > limit || n > 63 {
        return Err(Error::TooLarge { n, limit });
    }
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut seed_mask = 0u64;
    for &s in seeds {
        if s >= n {
            return Err(Error::VertexOutOfRange { vertex: s, n });
        }
        seed_mask |= 1 << s;
    }

    // All supersets of the seed mask, ascending.
    let free = ((1u64 << n) - 1) & !seed_mask;
    let mut states = Vec::new();
    let mut sub = 0u64;
    loop {
        states.push(seed_mask | sub);
        if sub == free {
            break;
        }
        sub = (sub.wrapping_sub(free)) & free;
    }
    states.sort_unstable();
    let state_index: HashMap<u64, usize> =
        states.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    let k = states.len();
    let mut q = Matrix::zeros(k, k);
    for (i, &mask) in states.iter().enumerate() {
        for v in 0..n {
            if mask >> v & 1 == 1 {
                continue;
            }
            let rate: f64 = g
                .neighbors(v)
                .iter()
                .filter(|&&u| mask >> u & 1 == 1)
                .map(|&u| rates.rate(u, v))
                .sum();
            if rate > 0.0 {
                let j = state_index[&(mask | 1 << v)];
                q[(i, j)] += rate;
                q[(i, i)] -= rate;
            }
        }
    }
    let generator = RateMatrix::generator(q)?;
    let initial = StateVector::point_mass(k, state_index[&seed_mask]);
    Ok(ExactChain {
        states,
        state_index,
        generator,
        initial,
        n_vertices: n,
    })
}
