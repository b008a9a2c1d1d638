//! Deterministic cascade damage: exact walk counts, boolean-semiring
//! reachability of the cumulative matrix T(t) = I + C + ... + C^t, and the
//! min/max total-damage times read off its rows.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Boolean matrix with bit-packed rows; products run in the boolean
/// semiring (OR of AND).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        let mut m = BitMatrix {
            n,
            words_per_row,
            bits: vec![0; n * words_per_row],
        };
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words_per_row + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn row_all_true(&self, i: usize) -> bool {
        let full = self.n / 64;
        let row = self.row(i);
        if row[..full].iter().any(|&w| w != u64::MAX) {
            return false;
        }
        let rem = self.n % 64;
        rem == 0 || row[full] == (1u64 << rem) - 1
    }

    /// self := self OR (self ⊗ adjacency) for one more cascade step.
    /// Returns true when any bit changed.
    fn expand_by(&mut self, g: &Graph) -> bool {
        let mut changed = false;
        for i in 0..self.n {
            let mut acc = self.row(i).to_vec();
            for j in 0..self.n {
                if self.get(i, j) {
                    for &v in g.neighbors(j) {
                        acc[v / 64] |= 1 << (v % 64);
                    }
                }
            }
            let start = i * self.words_per_row;
            for (k, w) in acc.into_iter().enumerate() {
                if self.bits[start + k] != w {
                    self.bits[start + k] = w;
                    changed = true;
                }
            }
        }
        changed
    }
}

/// Nonzero pattern of T(t): entry (i, j) set iff some walk of length <= t
/// joins i and j, i.e. j is damaged within t steps of a cascade started at i.
#[derive(Debug, Clone)]
pub struct ReachabilityMatrix {
    pub t: usize,
    pub reach: BitMatrix,
}

impl ReachabilityMatrix {
    pub fn is_reachable(&self, i: VertexId, j: VertexId) -> bool {
        self.reach.get(i, j)
    }
}

/// Entry (i, j) counts walks of length exactly t. Counts grow like
/// λ_max^t, so they are kept in arbitrary precision.
pub fn walk_count_matrix(g: &Graph, t: usize) -> Vec<Vec<BigUint>> {
    let n = g.n();
    let zero = BigUint::from(0u32);
    let one = BigUint::from(1u32);
    let mut current: Vec<Vec<BigUint>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    for _ in 0..t {
        let next: Vec<Vec<BigUint>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| g.neighbors(j).iter().map(|&k| &current[i][k]).sum())
                    .collect()
            })
            .collect();
        current = next;
    }
    current
}

/// Boolean-semiring evaluation of the nonzero pattern of I + C + ... + C^t,
/// with early exit once the pattern saturates.
pub fn cumulative_matrix(g: &Graph, t: usize) -> ReachabilityMatrix {
    let mut reach = BitMatrix::identity(g.n());
    for _ in 0..t {
        if !reach.expand_by(g) {
            break;
        }
    }
    ReachabilityMatrix { t, reach }
}

/// Steps until the row of T(t) for `source` is entirely nonzero, i.e. until
/// the cascade started there has damaged every vertex. `None` when some
/// vertex is never reached.
pub fn damage_time(g: &Graph, source: VertexId) -> Result<Option<usize>> {
    if source >= g.n() {
        return Err(Error::VertexOutOfRange {
            vertex: source,
            n: g.n(),
        });
    }
    let times = row_saturation_times(g);
    Ok(times[source])
}

/// First step at which each row of T(t) becomes entirely nonzero.
fn row_saturation_times(g: &Graph) -> Vec<Option<usize>> {
    let n = g.n();
    let mut times = vec![None; n];
    let mut reach = BitMatrix::identity(n);
    let mut step = 0usize;
    loop {
        for (i, slot) in times.iter_mut().enumerate() {
            if slot.is_none() && reach.row_all_true(i) {
                *slot = Some(step);
            }
        }
        if !reach.expand_by(g) {
            break;
        }
        step += 1;
    }
    times
}

/// The row that saturates first: (t_min, lowest-index vertex attaining it).
/// t_min equals the graph radius.
pub fn min_damage_time(g: &Graph) -> Result<(usize, VertexId)> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let times = row_saturation_times(g);
    let (argmin, t_min) = times
        .iter()
        .enumerate()
        .map(|(i, t)| (i, t.expect("connected graph saturates")))
        .min_by_key(|&(i, t)| (t, i))
        .expect("non-empty graph");
    Ok((t_min, argmin))
}

/// The row that saturates last: (t_max, lowest-index vertex attaining it).
/// t_max equals the graph diameter.
pub fn max_damage_time(g: &Graph) -> Result<(usize, VertexId)> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let times = row_saturation_times(g);
    let mut best: Option<(usize, usize)> = None;
    for (i, t) in times.iter().enumerate() {
        let t = t.expect("connected graph saturates");
        match best {
            Some((bt, _)) if t <= bt => {}
            _ => best = Some((t, i)),
        }
    }
    let (t_max, argmax) = best.expect("non-empty graph");
    Ok((t_max, argmax))
}

/// Per-step sets of newly damaged vertices from the given seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DamageTimeline {
    pub seeds: Vec<VertexId>,
    /// waves[s] = vertices first damaged at step s; waves[0] = seeds.
    pub waves: Vec<Vec<VertexId>>,
}

impl DamageTimeline {
    /// Index of the last non-empty wave.
    pub fn total_time(&self) -> usize {
        self.waves.len() - 1
    }

    pub fn damaged_count(&self) -> usize {
        self.waves.iter().map(Vec::len).sum()
    }
}

/// Frontier expansion from the seed set: waves[s] holds the vertices at
/// set-distance s. Vertices in other components never appear.
pub fn simulate_cascade(g: &Graph, seeds: &[VertexId]) -> Result<DamageTimeline> {
    let dist = g.bfs_distances_multi(seeds)?;
    let mut seeds: Vec<_> = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    let max_d = dist.iter().flatten().copied().max().unwrap_or(0);
    let mut waves = vec![Vec::new(); max_d + 1];
    for (v, d) in dist.iter().enumerate() {
        if let Some(d) = d {
            waves[*d].push(v);
        }
    }
    Ok(DamageTimeline { seeds, waves })
}
