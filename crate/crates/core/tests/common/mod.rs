//! Test-side oracles. Nothing here calls into the loop search, the exact
//! triangle value or the Dijkstra path it checks.
#![allow(dead_code)]

use icech::graph::{point_distance, GraphPoint};
use icech::{generate, DistanceOracle, GeneratorSpec, MetricGraph};

pub fn random_graph(n: usize, extra: usize, seed: u64) -> MetricGraph {
    let max = n * (n - 1) / 2;
    let m = (n - 1 + extra).min(max);
    generate(&GeneratorSpec::Random { n, m, seed }).unwrap()
}

pub fn floyd_warshall(g: &MetricGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in g.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.length);
        d[e.v][e.u] = d[e.v][e.u].min(e.length);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn vertex_point(g: &MetricGraph, v: usize) -> GraphPoint {
    let e = g.incident(v)[0];
    let offset = if g.edge(e).u == v { 0.0 } else { g.edge(e).length };
    GraphPoint { edge: e, offset }
}

/// Graph 1-center radius of three vertices by scanning every edge at `step`.
pub fn grid_one_center(g: &MetricGraph, o: &DistanceOracle, pts: [usize; 3], step: f64) -> f64 {
    let targets = pts.map(|p| vertex_point(g, p));
    let mut best = f64::INFINITY;
    for (ei, e) in g.edges().iter().enumerate() {
        let k = (e.length / step).ceil() as usize;
        for s in 0..=k {
            let w = GraphPoint {
                edge: ei,
                offset: e.length * s as f64 / k as f64,
            };
            let r = targets
                .iter()
                .map(|&t| point_distance(g, o, w, t))
                .fold(0.0, f64::max);
            best = best.min(r);
        }
    }
    best
}

/// A simple cycle as an edge bitmask with its length summed in ascending
/// edge order.
#[derive(Debug, Clone, Copy)]
pub struct MaskCycle {
    pub mask: u32,
    pub length: f64,
}

/// Every simple cycle, by testing each edge subset for "connected and all
/// degrees 2". Practical up to about 20 edges.
pub fn all_simple_cycles(g: &MetricGraph) -> Vec<MaskCycle> {
    let m = g.edge_count();
    assert!(m <= 20, "subset enumeration over {m} edges");
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut degree = vec![0u8; n];
    for mask in 1u32..(1 << m) {
        degree.iter_mut().for_each(|d| *d = 0);
        let mut ok = true;
        for e in bits(mask) {
            let edge = g.edge(e);
            if edge.u == edge.v {
                ok = false;
                break;
            }
            degree[edge.u] += 1;
            degree[edge.v] += 1;
        }
        if !ok || degree.iter().any(|&d| d != 0 && d != 2) || !connected(g, mask) {
            continue;
        }
        let length = bits(mask).map(|e| g.edge(e).length).sum();
        out.push(MaskCycle { mask, length });
    }
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then(a.mask.cmp(&b.mask)));
    out
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

fn connected(g: &MetricGraph, mask: u32) -> bool {
    let first = mask.trailing_zeros() as usize;
    let mut reached = 1u32 << first;
    loop {
        let before = reached;
        for e in bits(mask & !reached) {
            let (u, v) = (g.edge(e).u, g.edge(e).v);
            if bits(reached).any(|f| {
                let (a, b) = (g.edge(f).u, g.edge(f).v);
                a == u || a == v || b == u || b == v
            }) {
                reached |= 1 << e;
            }
        }
        if reached == mask {
            return true;
        }
        if reached == before {
            return false;
        }
    }
}

/// XOR basis over edge masks, keyed by highest set bit.
#[derive(Default, Clone)]
struct MaskBasis {
    rows: [u32; 32],
}

impl MaskBasis {
    fn insert(&mut self, mut v: u32) -> bool {
        while v != 0 {
            let top = 31 - v.leading_zeros() as usize;
            if self.rows[top] == 0 {
                self.rows[top] = v;
                return true;
            }
            v ^= self.rows[top];
        }
        false
    }
}

/// Lexicographically smallest ascending length-sequence over every cycle
/// basis of size `genus`, by depth-first search with prefix pruning.
pub fn exhaustive_min_basis(cycles: &[MaskCycle], genus: usize) -> Vec<f64> {
    fn lex_greater(a: &[f64], b: &[f64]) -> bool {
        for (x, y) in a.iter().zip(b) {
            if x != y {
                return x > y;
            }
        }
        false
    }
    fn dfs(
        cycles: &[MaskCycle],
        genus: usize,
        start: usize,
        basis: &MaskBasis,
        prefix: &mut Vec<f64>,
        best: &mut Option<Vec<f64>>,
    ) {
        if prefix.len() == genus {
            if best.as_ref().is_none_or(|b| lex_greater(b, prefix)) {
                *best = Some(prefix.clone());
            }
            return;
        }
        for i in start..cycles.len() {
            prefix.push(cycles[i].length);
            let pruned = best.as_ref().is_some_and(|b| lex_greater(prefix, b));
            if pruned {
                prefix.pop();
                // cycles are sorted, so later ones are no better
                break;
            }
            let mut next = basis.clone();
            if next.insert(cycles[i].mask) {
                dfs(cycles, genus, i + 1, &next, prefix, best);
            }
            prefix.pop();
        }
    }
    let mut best = None;
    dfs(cycles, genus, 0, &MaskBasis::default(), &mut Vec::new(), &mut best);
    best.unwrap_or_default()
}
