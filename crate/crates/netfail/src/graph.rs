//! Undirected simple graphs: construction, traversal, and the structural
//! transformations used by the damage scenarios (fictitious super-source,
//! line graph).

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub type VertexId = usize;

/// Undirected simple graph. The adjacency list is the source of truth;
/// the dense 0/1 matrix view is materialized on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<VertexId>>,
    edges: Vec<(VertexId, VertexId)>,
}

impl Graph {
    /// Build a graph from an edge list. Duplicate edges collapse, self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edge_list(n: usize, pairs: &[(VertexId, VertexId)]) -> Result<Graph> {
        let mut set = BTreeSet::new();
        for &(u, v) in pairs {
            if u >= n {
                return Err(Error::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, adj, edges })
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as sorted (u, v) pairs with u < v; lexicographic order.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Symmetric 0/1 adjacency matrix with zero diagonal.
    pub fn adjacency_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            m[(u, v)] = 1.0;
            m[(v, u)] = 1.0;
        }
        m
    }

    /// Hop distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: VertexId) -> Result<Vec<Option<usize>>> {
        if source >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: source,
                n: self.n,
            });
        }
        Ok(self.multi_source_bfs(&[source]))
    }

    fn multi_source_bfs(&self, sources: &[VertexId]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Distances from a set of vertices treated as one source layer.
    pub fn bfs_distances_multi(&self, sources: &[VertexId]) -> Result<Vec<Option<usize>>> {
        for &s in sources {
            if s >= self.n {
                return Err(Error::VertexOutOfRange { vertex: s, n: self.n });
            }
        }
        if sources.is_empty() {
            return Err(Error::EmptySeeds);
        }
        Ok(self.multi_source_bfs(sources))
    }

    /// Largest finite BFS distance from `source`, or `None` when some vertex
    /// is unreachable.
    pub fn eccentricity(&self, source: VertexId) -> Result<Option<usize>> {
        let dist = self.bfs_distances(source)?;
        let mut ecc = 0;
        for d in dist {
            match d {
                Some(d) => ecc = ecc.max(d),
                None => return Ok(None),
            }
        }
        Ok(Some(ecc))
    }

    /// Add a fictitious vertex wired to every seed, so a multi-seed scenario
    /// becomes a single-seed one shifted by one step. Returns the new graph
    /// and the id of the added vertex (always `n`).
    pub fn add_super_source(&self, seeds: &[VertexId]) -> Result<(Graph, VertexId)> {
        if seeds.is_empty() {
            return Err(Error::EmptySeeds);
        }
        let new_id = self.n;
        let mut pairs = self.edges.clone();
        for &s in seeds {
            if s >= self.n {
                return Err(Error::VertexOutOfRange { vertex: s, n: self.n });
            }
            pairs.push((s, new_id));
        }
        let g = Graph::from_edge_list(self.n + 1, &pairs)?;
        Ok((g, new_id))
    }

    /// Line graph: one vertex per edge, adjacent when the edges share an
    /// endpoint. Vertex numbering follows the lexicographic edge order of
    /// `edges()`, so results are reproducible.
    pub fn line_graph(&self) -> Graph {
        let m = self.edges.len();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (idx, &(u, v)) in self.edges.iter().enumerate() {
            incident[u].push(idx);
            incident[v].push(idx);
        }
        let mut pairs = Vec::new();
        for list in &incident {
            for (a, &e1) in list.iter().enumerate() {
                for &e2 in &list[a + 1..] {
                    pairs.push((e1, e2));
                }
            }
        }
        Graph::from_edge_list(m, &pairs).expect("line-graph indices are in range")
    }

    /// Connectivity predicate. Empty and single-vertex graphs count as
    /// connected by convention.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let dist = self.multi_source_bfs(&[0]);
        dist.iter().all(Option::is_some)
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    // Common topologies used throughout the scenario catalog.

    /// Path 0-1-...-(n-1).
    pub fn path(n: usize) -> Graph {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &pairs).unwrap()
    }

    /// Cycle on n >= 3 vertices.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edge_list(n, &pairs).unwrap()
    }

    /// Complete graph K_n.
    pub fn complete(n: usize) -> Graph {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                pairs.push((u, v));
            }
        }
        Graph::from_edge_list(n, &pairs).unwrap()
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let pairs: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edge_list(leaves + 1, &pairs).unwrap()
    }

    /// Wheel: hub 0 plus a ring 1..=ring_len.
    pub fn wheel(ring_len: usize) -> Graph {
        assert!(ring_len >= 3, "wheel ring needs at least 3 vertices");
        let mut pairs: Vec<_> = (1..=ring_len).map(|i| (0, i)).collect();
        for i in 1..=ring_len {
            let next = if i == ring_len { 1 } else { i + 1 };
            pairs.push((i, next));
        }
        Graph::from_edge_list(ring_len + 1, &pairs).unwrap()
    }
}
