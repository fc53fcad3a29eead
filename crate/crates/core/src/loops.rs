//! Shortest systems of loops.
//!
//! A shortest system of loops is a Z₂ basis of the cycle space whose sorted
//! length-sequence is lexicographically minimal. Cycle bases over Z₂ form a
//! matroid, so scanning a candidate set that contains a minimum basis in
//! non-decreasing length order and keeping every independent cycle finds one.
//! The candidates are Horton cycles: for each root `r` and each edge `(x, y)`
//! off the shortest-path tree of `r`, the cycle `sp(r,x) + (x,y) + sp(y,r)`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::LoopError;
use crate::graph::{all_pairs_distances, normalize, DistanceOracle, MetricGraph};

/// Bit vector over Z₂.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Z2Vector {
    words: Vec<u64>,
    len: usize,
}

impl Z2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Z2Vector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

/// Row-echelon set of Z₂ vectors. Each row has a distinct pivot (its lowest
/// set bit) that no later row contains.
#[derive(Debug, Clone, Default)]
pub struct Z2Basis {
    rows: Vec<(usize, Z2Vector)>,
}

impl Z2Basis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &Z2Vector) -> Z2Vector {
        let mut r = v.clone();
        for (pivot, row) in &self.rows {
            if r.get(*pivot) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn is_independent(&self, v: &Z2Vector) -> bool {
        !self.reduce(v).is_zero()
    }

    /// Adds `v` when it is independent of the current rows. Returns whether it
    /// was added.
    pub fn add(&mut self, v: &Z2Vector) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            Some(pivot) => {
                self.rows.push((pivot, r));
                true
            }
            None => false,
        }
    }
}

/// A simple cycle of the graph it was computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    /// Edge indices, ascending.
    pub edges: Vec<usize>,
    /// Closed walk as vertex indices, starting at the smallest vertex; the
    /// first vertex is not repeated at the end.
    pub walk: Vec<usize>,
    pub length: f64,
    pub z2: Z2Vector,
}

impl Loop {
    /// Builds a loop from an edge set. The edges must form one simple cycle.
    pub fn from_edges(g: &MetricGraph, mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        let length = edges.iter().map(|&e| g.edge(e).length).sum();
        let walk = cycle_walk(g, &edges);
        let z2 = Z2Vector::from_indices(g.edge_count(), edges.iter().copied());
        Self {
            edges,
            walk,
            length,
            z2,
        }
    }

    fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        self.length
            .total_cmp(&other.length)
            .then_with(|| self.edges.cmp(&other.edges))
    }
}

fn cycle_walk(g: &MetricGraph, edges: &[usize]) -> Vec<usize> {
    let Some(start) = edges
        .iter()
        .flat_map(|&e| [g.edge(e).u, g.edge(e).v])
        .min()
    else {
        return Vec::new();
    };
    let mut unused: Vec<usize> = edges.to_vec();
    let mut walk = vec![start];
    let mut at = start;
    // smallest unused edge at the current vertex
    while let Some(pos) = unused
        .iter()
        .position(|&e| g.edge(e).u == at || g.edge(e).v == at)
    {
        let e = unused.remove(pos);
        at = g.edge(e).other(at);
        if at == start {
            break;
        }
        walk.push(at);
    }
    walk
}

/// Horton candidate cycles of a simple graph, deduplicated and sorted by
/// `(length, edge indices)`.
pub fn candidate_cycles(g: &MetricGraph, oracle: &DistanceOracle) -> Vec<Loop> {
    assert!(g.is_simple(), "candidate_cycles expects a simple graph");
    let mut sets: Vec<Vec<usize>> = (0..g.vertex_count())
        .into_par_iter()
        .flat_map_iter(|root| root_candidates(g, oracle, root))
        .collect();
    sets.sort_unstable();
    sets.dedup();
    let mut loops: Vec<Loop> = sets.into_iter().map(|s| Loop::from_edges(g, s)).collect();
    loops.sort_by(Loop::cmp_key);
    loops
}

fn root_candidates(g: &MetricGraph, oracle: &DistanceOracle, root: usize) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let dist = oracle.row(root);
    let mut tree_edge = vec![false; g.edge_count()];
    for v in 0..n {
        if let Some(e) = oracle.pred_edge(root, v) {
            tree_edge[e] = true;
        }
    }
    // branch[v]: first vertex after the root on the tree path to v
    let mut order: Vec<usize> = (0..n).filter(|&v| dist[v].is_finite()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]));
    let mut branch = vec![usize::MAX; n];
    for &v in &order {
        if v == root {
            continue;
        }
        let parent = g.edge(oracle.pred_edge(root, v).expect("reachable vertex has a parent")).other(v);
        branch[v] = if parent == root { v } else { branch[parent] };
    }

    let mut out = Vec::new();
    for (ei, e) in g.edges().iter().enumerate() {
        if tree_edge[ei] || !dist[e.u].is_finite() {
            continue;
        }
        let simple = e.u == root || e.v == root || branch[e.u] != branch[e.v];
        if !simple {
            continue;
        }
        let mut set = oracle.path_edges(g, root, e.u).expect("reachable");
        set.extend(oracle.path_edges(g, root, e.v).expect("reachable"));
        set.push(ei);
        set.sort_unstable();
        out.push(set);
    }
    out
}

/// The loops of a shortest system, sorted by length, on a simple graph.
#[derive(Debug, Clone)]
pub struct LoopSystem {
    /// Simple graph the loops live on (the normalized input).
    pub graph: MetricGraph,
    pub loops: Vec<Loop>,
}

#[derive(Serialize)]
struct LoopRecord<'a> {
    length: f64,
    edges: Vec<&'a str>,
    walk: Vec<&'a str>,
}

#[derive(Serialize)]
struct LoopSystemRecord<'a> {
    genus: usize,
    loops: Vec<LoopRecord<'a>>,
}

impl LoopSystem {
    pub fn genus(&self) -> usize {
        self.loops.len()
    }

    /// Non-decreasing length-sequence `ℓ₁ ≤ … ≤ ℓ_g`.
    pub fn lengths(&self) -> Vec<f64> {
        self.loops.iter().map(|l| l.length).collect()
    }

    pub fn shortest(&self) -> Option<f64> {
        self.loops.first().map(|l| l.length)
    }

    pub fn longest(&self) -> Option<f64> {
        self.loops.last().map(|l| l.length)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let g = &self.graph;
        let record = LoopSystemRecord {
            genus: self.genus(),
            loops: self
                .loops
                .iter()
                .map(|l| LoopRecord {
                    length: l.length,
                    edges: l.edges.iter().map(|&e| g.edge(e).id.as_str()).collect(),
                    walk: l.walk.iter().map(|&v| g.vertex_id(v)).collect(),
                })
                .collect(),
        };
        serde_json::to_value(record).expect("loop serialization is infallible")
    }
}

/// Computes a shortest system of loops. Graphs with self-loops or parallel
/// edges are normalized first and the loops refer to the normalized graph.
pub fn shortest_system(g: &MetricGraph) -> Result<LoopSystem, LoopError> {
    let graph = if g.is_simple() {
        g.clone()
    } else {
        normalize(g).graph
    };
    let oracle = all_pairs_distances(&graph);
    let loops = greedy_basis(&graph, candidate_cycles(&graph, &oracle))?;
    Ok(LoopSystem { graph, loops })
}

fn greedy_basis(g: &MetricGraph, candidates: Vec<Loop>) -> Result<Vec<Loop>, LoopError> {
    let genus = g.genus();
    let mut basis = Z2Basis::new();
    let mut chosen = Vec::with_capacity(genus);
    for c in candidates {
        if chosen.len() == genus {
            break;
        }
        if basis.add(&c.z2) {
            chosen.push(c);
        }
    }
    if chosen.len() < genus {
        return Err(LoopError::Incomplete {
            found: chosen.len(),
            genus,
        });
    }
    Ok(chosen)
}

/// Connected, every touched vertex of degree exactly two.
pub fn is_simple_cycle(g: &MetricGraph, edges: &[usize]) -> bool {
    if edges.is_empty() {
        return false;
    }
    let mut degree = vec![0usize; g.vertex_count()];
    for &e in edges {
        let e = g.edge(e);
        degree[e.u] += 1;
        degree[e.v] += 1;
    }
    if degree.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    // a 2-regular edge set is a single cycle iff walking from one edge uses all
    let touched: HashSet<usize> = edges.iter().flat_map(|&e| [g.edge(e).u, g.edge(e).v]).collect();
    cycle_walk(g, edges).len() == touched.len()
}
