//! Protection planning: spanning-tree enumeration and sampling, per-tree
//! minimax damage times, the minimax tree/center selection, and the impact
//! of taking a protected vertex out of the cascade graph.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cascade::{max_damage_time, min_damage_time};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::substream_seed;

/// Default cap on exact spanning-tree enumeration.
pub const DEFAULT_TREE_CAP: usize = 100_000;

/// A spanning tree of some parent graph, with its pairwise hop times,
/// radius, and center precomputed.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    tree: Graph,
    index: usize,
    pairwise_times: Vec<Vec<usize>>,
    radius: usize,
    center: VertexId,
}

impl SpanningTree {
    /// Wrap a tree graph; fails unless it is connected with n-1 edges.
    pub fn new(tree: Graph, index: usize) -> Result<SpanningTree> {
        let n = tree.n();
        if n == 0 || tree.edge_count() != n - 1 || !tree.is_connected() {
            return Err(Error::InvalidParameter(
                "not a spanning tree (need n-1 edges and connectivity)".into(),
            ));
        }
        let mut pairwise_times = Vec::with_capacity(n);
        for v in 0..n {
            let dist: Vec<usize> = tree
                .bfs_distances(v)?
                .into_iter()
                .map(|d| d.expect("tree is connected"))
                .collect();
            pairwise_times.push(dist);
        }
        let (center, radius) = (0..n)
            .map(|v| (v, *pairwise_times[v].iter().max().unwrap()))
            .min_by_key(|&(v, ecc)| (ecc, v))
            .expect("non-empty tree");
        Ok(SpanningTree {
            tree,
            index,
            pairwise_times,
            radius,
            center,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.tree
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Hop distance between i and j within the tree (t_ij).
    pub fn pairwise_time(&self, i: VertexId, j: VertexId) -> usize {
        self.pairwise_times[i][j]
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn center(&self) -> VertexId {
        self.center
    }
}

/// min over i of max over j of t_ij: the tree radius, attained at its
/// center (lowest index on ties).
pub fn tree_minimax_time(tree: &SpanningTree) -> (usize, VertexId) {
    (tree.radius, tree.center)
}

// Union-find with rollback; no path compression so unions undo cleanly.
struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    merges: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            merges: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Returns false when u and v were already joined.
    fn union(&mut self, u: usize, v: usize) -> bool {
        let (mut ru, mut rv) = (self.find(u), self.find(v));
        if ru == rv {
            return false;
        }
        if self.size[ru] < self.size[rv] {
            std::mem::swap(&mut ru, &mut rv);
        }
        self.parent[rv] = ru;
        self.size[ru] += self.size[rv];
        self.merges.push(rv);
        true
    }

    fn rollback(&mut self) {
        let rv = self.merges.pop().expect("rollback without union");
        let ru = self.parent[rv];
        self.parent[rv] = rv;
        self.size[ru] -= self.size[rv];
    }
}

/// Visit every spanning tree of `g` exactly once, as sorted edge lists, in
/// lexicographic edge-set order. The callback may stop the walk by
/// returning an error.
fn for_each_spanning_tree(
    g: &Graph,
    mut visit: impl FnMut(&[(VertexId, VertexId)]) -> Result<()>,
) -> Result<()> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n <= 1 {
        return visit(&[]);
    }
    let edges = g.edges();

    fn rec(
        edges: &[(VertexId, VertexId)],
        idx: usize,
        n: usize,
        dsu: &mut Dsu,
        chosen: &mut Vec<(VertexId, VertexId)>,
        visit: &mut impl FnMut(&[(VertexId, VertexId)]) -> Result<()>,
    ) -> Result<()> {
        if chosen.len() == n - 1 {
            return visit(chosen);
        }
        if idx == edges.len() {
            return Ok(());
        }
        // Prune: the remaining edges must still be able to finish the tree.
        let needed = n - 1 - chosen.len();
        if edges.len() - idx < needed {
            return Ok(());
        }
        let mut probe = 0;
        for &(u, v) in &edges[idx..] {
            if dsu.union(u, v) {
                probe += 1;
            }
        }
        for _ in 0..probe {
            dsu.rollback();
        }
        if probe < needed {
            return Ok(());
        }

        let (u, v) = edges[idx];
        if dsu.union(u, v) {
            chosen.push((u, v));
            rec(edges, idx + 1, n, dsu, chosen, visit)?;
            chosen.pop();
            dsu.rollback();
        }
        rec(edges, idx + 1, n, dsu, chosen, visit)
    }

    let mut dsu = Dsu::new(n);
    let mut chosen = Vec::with_capacity(n - 1);
    rec(edges, 0, n, &mut dsu, &mut chosen, &mut visit)
}

/// All spanning trees of a connected graph, in deterministic lexicographic
/// order; errors once more than `cap` trees have been found.
pub fn enumerate_spanning_trees(g: &Graph, cap: usize) -> Result<Vec<SpanningTree>> {
    let mut trees = Vec::new();
    for_each_spanning_tree(g, |edges| {
        if trees.len() >= cap {
            return Err(Error::CapExceeded { cap });
        }
        let tree = Graph::from_edge_list(g.n(), edges)?;
        trees.push(SpanningTree::new(tree, trees.len())?);
        Ok(())
    })?;
    Ok(trees)
}

/// Kirchhoff matrix-tree count: determinant of a Laplacian cofactor. Used
/// as an independent cross-check of the enumerator.
pub fn count_spanning_trees(g: &Graph) -> Result<u64> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "spanning-tree count needs n >= 2".into(),
        ));
    }
    // Cofactor deleting the last row/column of L = D - A.
    let m = n - 1;
    let mut lap = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        lap[i][i] = g.degree(i) as f64;
    }
    for &(u, v) in g.edges() {
        if u < m && v < m {
            lap[u][v] -= 1.0;
            lap[v][u] -= 1.0;
        }
    }
    let det = determinant(&mut lap);
    let rounded = det.round();
    if (det - rounded).abs() > 1e-6 * rounded.abs().max(1.0) || rounded < 0.5 {
        return Err(Error::InvalidParameter(format!(
            "Kirchhoff determinant {det} does not round to a positive integer"
        )));
    }
    Ok(rounded as u64)
}

fn determinant(a: &mut [Vec<f64>]) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    det
}

/// Uniform random spanning tree by loop-erased random walk (Wilson's
/// algorithm). Deterministic for a fixed seed.
pub fn random_spanning_tree(g: &Graph, rng_seed: u64) -> Result<SpanningTree> {
    let tree = random_spanning_tree_edges(g, rng_seed)?;
    SpanningTree::new(tree, 0)
}

fn random_spanning_tree_edges(g: &Graph, rng_seed: u64) -> Result<Graph> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n <= 1 {
        return Ok(Graph::empty(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[0] = true;
    for start in 1..n {
        let mut u = start;
        while !in_tree[u] {
            let nbrs = g.neighbors(u);
            next[u] = nbrs[rng.gen_range(0..nbrs.len())];
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u];
        }
    }
    let pairs: Vec<_> = (1..n).map(|v| (v, next[v])).collect();
    Graph::from_edge_list(n, &pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    Exact,
    Sampled,
}

/// Outcome of the minimax tree selection: the steadiest spanning tree, its
/// radius, and the center to protect.
#[derive(Debug, Clone)]
pub struct ProtectionPlan {
    pub chosen_tree: SpanningTree,
    pub t_tilde: usize,
    pub protected_vertex: VertexId,
    pub mode: SelectionMode,
    pub trees_examined: usize,
    /// Sampled scans only lower-bound the true maximum.
    pub is_lower_bound: bool,
}

/// Pick the spanning tree maximizing its own radius. Exact mode scans all
/// trees (error beyond `budget`); sampled mode scans `budget` uniform
/// random trees and labels the result a lower bound. Ties keep the first
/// tree in scan order.
pub fn select_protection_tree(
    g: &Graph,
    mode: SelectionMode,
    budget: usize,
    rng_seed: u64,
) -> Result<ProtectionPlan> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut best: Option<SpanningTree> = None;
    let mut examined = 0usize;
    match mode {
        SelectionMode::Exact => {
            for_each_spanning_tree(g, |edges| {
                if examined >= budget {
                    return Err(Error::CapExceeded { cap: budget });
                }
                let tree = SpanningTree::new(Graph::from_edge_list(g.n(), edges)?, examined)?;
                examined += 1;
                if best.as_ref().map_or(true, |b| tree.radius > b.radius) {
                    best = Some(tree);
                }
                Ok(())
            })?;
        }
        SelectionMode::Sampled => {
            for trial in 0..budget {
                let edges = random_spanning_tree_edges(g, substream_seed(rng_seed, trial as u64))?;
                let tree = SpanningTree::new(edges, trial)?;
                examined += 1;
                if best.as_ref().map_or(true, |b| tree.radius > b.radius) {
                    best = Some(tree);
                }
            }
        }
    }
    let chosen = best.ok_or(Error::InvalidParameter("no spanning tree found".into()))?;
    Ok(ProtectionPlan {
        t_tilde: chosen.radius,
        protected_vertex: chosen.center,
        mode,
        trees_examined: examined,
        is_lower_bound: mode == SelectionMode::Sampled,
        chosen_tree: chosen,
    })
}

/// Remove a protected vertex (and its incident edges) from the cascade
/// graph. Indices are compacted; the returned vector maps new ids back to
/// the original ones.
pub fn protect_vertex(g: &Graph, v: VertexId) -> Result<(Graph, Vec<VertexId>)> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let old_ids: Vec<VertexId> = (0..g.n()).filter(|&u| u != v).collect();
    let new_id = |u: VertexId| if u < v { u } else { u - 1 };
    let pairs: Vec<_> = g
        .edges()
        .iter()
        .filter(|&&(a, b)| a != v && b != v)
        .map(|&(a, b)| (new_id(a), new_id(b)))
        .collect();
    Ok((Graph::from_edge_list(g.n() - 1, &pairs)?, old_ids))
}

#[derive(Debug, Clone, Serialize)]
pub struct DamageBounds {
    pub t_min: usize,
    pub argmin: VertexId,
    pub t_max: usize,
    pub argmax: VertexId,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentImpact {
    /// Original vertex ids of the surviving component.
    pub vertices: Vec<VertexId>,
    pub t_min: usize,
    pub t_max: usize,
}

/// Cascade metrics before and after removing vertex `removed`.
#[derive(Debug, Clone, Serialize)]
pub struct ProtectionImpact {
    pub removed: VertexId,
    /// None when the original graph is disconnected.
    pub before: Option<DamageBounds>,
    pub components: Vec<ComponentImpact>,
    pub disconnects: bool,
}

/// Recompute min/max damage times per connected component of the graph
/// with `v` removed. Singleton components report damage time 0.
pub fn protection_impact(g: &Graph, v: VertexId) -> Result<ProtectionImpact> {
    let before = if g.is_connected() && g.n() >= 1 {
        let (t_min, argmin) = min_damage_time(g)?;
        let (t_max, argmax) = max_damage_time(g)?;
        Some(DamageBounds {
            t_min,
            argmin,
            t_max,
            argmax,
        })
    } else {
        None
    };
    let components_before = g.components().len();
    let (reduced, old_ids) = protect_vertex(g, v)?;
    let mut components = Vec::new();
    for comp in reduced.components() {
        let local: std::collections::HashMap<VertexId, usize> = comp
            .iter()
            .enumerate()
            .map(|(local, &node)| (node, local))
            .collect();
        let pairs: Vec<_> = reduced
            .edges()
            .iter()
            .filter(|&&(a, b)| local.contains_key(&a) && local.contains_key(&b))
            .map(|&(a, b)| (local[&a], local[&b]))
            .collect();
        let sub = Graph::from_edge_list(comp.len(), &pairs)?;
        let (t_min, _) = min_damage_time(&sub)?;
        let (t_max, _) = max_damage_time(&sub)?;
        components.push(ComponentImpact {
            vertices: comp.iter().map(|&u| old_ids[u]).collect(),
            t_min,
            t_max,
        });
    }
    Ok(ProtectionImpact {
        removed: v,
        before,
        disconnects: components.len() > components_before,
        components,
    })
}
