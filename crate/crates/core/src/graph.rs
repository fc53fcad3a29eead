//! Finite metric graphs: storage, validation, normalization, shortest-path
//! distances and δ-discretization.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// An undirected edge with a strictly positive length.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `w`. `w` must be an endpoint.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }
}

/// Weighted multigraph with positive edge lengths. Self-loops and parallel
/// edges are accepted; see [`normalize`] for turning it into a simple graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    // per-vertex incident edge indices, ascending
    incidence: Vec<Vec<usize>>,
}

/// On-disk shape: `{"vertices": [..], "edges": [[id, u, v, length], ..]}`.
#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(String, String, String, f64)>,
}

impl MetricGraph {
    /// Builds a validated graph from vertex ids and `(edge id, u, v, length)`
    /// records.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String, f64)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (id, u, v, length) in edges {
            if !seen.insert(id.clone()) {
                return Err(GraphError::DuplicateEdge(id));
            }
            if !(length.is_finite() && length > 0.0) {
                return Err(GraphError::NonPositiveLength { edge: id, length });
            }
            let ui = *index.get(&u).ok_or_else(|| GraphError::DanglingEndpoint {
                edge: id.clone(),
                vertex: u.clone(),
            })?;
            let vi = *index.get(&v).ok_or_else(|| GraphError::DanglingEndpoint {
                edge: id.clone(),
                vertex: v.clone(),
            })?;
            out.push(Edge {
                id,
                u: ui,
                v: vi,
                length,
            });
        }
        Ok(Self::from_parts(vertices, index, out))
    }

    fn from_parts(vertices: Vec<String>, index: HashMap<String, usize>, edges: Vec<Edge>) -> Self {
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.u].push(i);
            if e.v != e.u {
                incidence[e.v].push(i);
            }
        }
        Self {
            vertices,
            edges,
            index,
            incidence,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::new(file.vertices, file.edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (
                        e.id.clone(),
                        self.vertices[e.u].clone(),
                        self.vertices[e.v].clone(),
                        e.length,
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization is infallible")
    }

    /// Reads and validates a graph JSON file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| GraphError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| GraphError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn vertex_id(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Incident edge indices of vertex `v`, ascending. A self-loop is listed once.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// True when there are no self-loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut pairs = HashSet::new();
        self.edges
            .iter()
            .all(|e| !e.is_self_loop() && pairs.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    /// Component label per vertex, labels numbered in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertex_count());
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        let mut label = HashMap::new();
        (0..self.vertex_count())
            .map(|v| {
                let root = uf.find(v);
                let next = label.len();
                *label.entry(root).or_insert(next)
            })
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    /// First Betti number `|E| - |V| + #components`.
    pub fn genus(&self) -> usize {
        self.edge_count() + self.component_count() - self.vertex_count()
    }

    /// Same graph with every length multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self, GraphError> {
        Self::new(
            self.vertices.clone(),
            self.edges.iter().map(|e| {
                (
                    e.id.clone(),
                    self.vertices[e.u].clone(),
                    self.vertices[e.v].clone(),
                    e.length * factor,
                )
            }),
        )
    }
}

/// Genus of `g`; free-function form of [`MetricGraph::genus`].
pub fn genus(g: &MetricGraph) -> usize {
    g.genus()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Hands out vertex/edge ids that do not clash with existing ones.
struct FreshIds {
    taken: HashSet<String>,
}

impl FreshIds {
    fn new<'a>(existing: impl IntoIterator<Item = &'a String>) -> Self {
        Self {
            taken: existing.into_iter().cloned().collect(),
        }
    }

    fn make(&mut self, base: &str, k: usize) -> String {
        let mut id = format!("{base}/{k}");
        while self.taken.contains(&id) {
            id.push('\'');
        }
        self.taken.insert(id.clone());
        id
    }
}

/// Rebuilds a graph by replacing every edge with a chain of sub-edges.
///
/// `pieces(edge)` gives the number of equal sub-edges. Returns the new graph
/// and, per original edge, the ordered indices of its replacement sub-edges.
fn subdivide(g: &MetricGraph, pieces: impl Fn(&Edge) -> usize) -> (MetricGraph, Vec<Vec<usize>>) {
    let mut vertex_ids = FreshIds::new(g.vertices.iter());
    let mut edge_ids = FreshIds::new(g.edges.iter().map(|e| &e.id));
    let mut vertices = g.vertices.clone();
    let mut index = g.index.clone();
    let mut edges = Vec::with_capacity(g.edge_count());
    let mut provenance = Vec::with_capacity(g.edge_count());

    for e in &g.edges {
        let k = pieces(e).max(1);
        if k == 1 {
            provenance.push(vec![edges.len()]);
            edges.push(e.clone());
            continue;
        }
        let piece = e.length / k as f64;
        let mut chain = Vec::with_capacity(k);
        let mut prev = e.u;
        for i in 0..k {
            let next = if i + 1 == k {
                e.v
            } else {
                let id = vertex_ids.make(&e.id, i + 1);
                index.insert(id.clone(), vertices.len());
                vertices.push(id);
                vertices.len() - 1
            };
            chain.push(edges.len());
            edges.push(Edge {
                id: edge_ids.make(&e.id, i),
                u: prev,
                v: next,
                length: piece,
            });
            prev = next;
        }
        provenance.push(chain);
    }
    (MetricGraph::from_parts(vertices, index, edges), provenance)
}

/// A simple graph obtained from an arbitrary metric graph, with the
/// replacement chain of every original edge.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub graph: MetricGraph,
    pub provenance: Vec<Vec<usize>>,
}

/// Replaces each self-loop by a triangle of equal thirds and splits each
/// edge of a parallel class at its midpoint. Simple graphs come back unchanged.
pub fn normalize(g: &MetricGraph) -> Normalization {
    let mut multiplicity: HashMap<(usize, usize), usize> = HashMap::new();
    for e in &g.edges {
        *multiplicity.entry((e.u.min(e.v), e.u.max(e.v))).or_default() += 1;
    }
    let (graph, provenance) = subdivide(g, |e| {
        if e.is_self_loop() {
            3
        } else if multiplicity[&(e.u.min(e.v), e.u.max(e.v))] > 1 {
            2
        } else {
            1
        }
    });
    Normalization { graph, provenance }
}

/// A subdivision of a metric graph with every sub-edge no longer than `delta`.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub graph: MetricGraph,
    pub delta: f64,
    /// Original edge index -> ordered sub-edge indices in `graph`.
    pub provenance: Vec<Vec<usize>>,
}

/// Splits each edge of length ℓ into `⌈ℓ/delta⌉` equal sub-edges.
///
/// `g` should be simple (see [`normalize`]); original vertices keep their
/// indices in the refined graph.
pub fn delta_discretize(g: &MetricGraph, delta: f64) -> Discretization {
    assert!(delta > 0.0 && delta.is_finite(), "delta must be positive");
    let (graph, provenance) = subdivide(g, |e| pieces_for(e.length, delta));
    Discretization {
        graph,
        delta,
        provenance,
    }
}

fn pieces_for(length: f64, delta: f64) -> usize {
    let mut k = (length / delta).ceil().max(1.0) as usize;
    // ℓ/δ can land a rounding error above an integer (3/0.15 > 20)
    if k > 1 && length / (k - 1) as f64 <= delta {
        k -= 1;
    }
    while length / k as f64 > delta {
        k += 1;
    }
    k
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra. Equal-distance ties pick the predecessor edge with
/// the smallest index.
pub fn shortest_path_tree(g: &MetricGraph, source: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { dist: d, vertex: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &ei in &g.incidence[u] {
            let e = &g.edges[ei];
            let w = e.other(u);
            if done[w] {
                continue;
            }
            let nd = d + e.length;
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = Some(ei);
                heap.push(HeapItem { dist: nd, vertex: w });
            } else if nd == dist[w] && pred[w].is_some_and(|p| ei < p) {
                pred[w] = Some(ei);
            }
        }
    }
    (dist, pred)
}

/// All-pairs shortest-path distances between vertices, with one shortest-path
/// tree per source.
#[derive(Debug, Clone)]
pub struct DistanceOracle {
    n: usize,
    dist: Vec<f64>,
    pred: Vec<Option<usize>>,
}

impl DistanceOracle {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    /// Distances from `source` to every vertex.
    pub fn row(&self, source: usize) -> &[f64] {
        &self.dist[source * self.n..(source + 1) * self.n]
    }

    /// Predecessor edge of `v` in the shortest-path tree rooted at `source`.
    pub fn pred_edge(&self, source: usize, v: usize) -> Option<usize> {
        self.pred[source * self.n + v]
    }

    /// Edges of the tree path from `source` to `target`, listed from `target`
    /// back towards `source`. `None` when unreachable.
    pub fn path_edges(&self, g: &MetricGraph, source: usize, target: usize) -> Option<Vec<usize>> {
        if !self.distance(source, target).is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut v = target;
        while v != source {
            let e = self.pred_edge(source, v)?;
            path.push(e);
            v = g.edge(e).other(v);
        }
        Some(path)
    }
}

/// Exact all-pairs distances, one Dijkstra per source (run in parallel).
pub fn all_pairs_distances(g: &MetricGraph) -> DistanceOracle {
    let n = g.vertex_count();
    let rows: Vec<(Vec<f64>, Vec<Option<usize>>)> = (0..n)
        .into_par_iter()
        .map(|s| shortest_path_tree(g, s))
        .collect();
    let mut dist = Vec::with_capacity(n * n);
    let mut pred = Vec::with_capacity(n * n);
    for (d, p) in rows {
        dist.extend(d);
        pred.extend(p);
    }
    // the two directions can sum the same path in a different order
    for u in 0..n {
        for v in u + 1..n {
            let m = dist[u * n + v].min(dist[v * n + u]);
            dist[u * n + v] = m;
            dist[v * n + u] = m;
        }
    }
    DistanceOracle { n, dist, pred }
}

/// A point on the underlying space: `offset` from the `u` endpoint of `edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

impl GraphPoint {
    pub fn new(g: &MetricGraph, edge: usize, offset: f64) -> Result<Self, GraphError> {
        let len = g.edges.get(edge).map(|e| e.length).ok_or_else(|| {
            GraphError::InvalidPoint(format!("edge index {edge} out of range"))
        })?;
        if !(0.0..=len).contains(&offset) {
            return Err(GraphError::InvalidPoint(format!(
                "offset {offset} outside [0, {len}] on edge {}",
                g.edges[edge].id
            )));
        }
        Ok(Self { edge, offset })
    }
}

/// Shortest-path distance between two points lying anywhere on edges.
pub fn point_distance(g: &MetricGraph, oracle: &DistanceOracle, p: GraphPoint, q: GraphPoint) -> f64 {
    let ep = g.edge(p.edge);
    let eq = g.edge(q.edge);
    let p_ends = [(ep.u, p.offset), (ep.v, ep.length - p.offset)];
    let q_ends = [(eq.u, q.offset), (eq.v, eq.length - q.offset)];
    let mut best = f64::INFINITY;
    for &(a, da) in &p_ends {
        for &(b, db) in &q_ends {
            best = best.min(da + oracle.distance(a, b) + db);
        }
    }
    if p.edge == q.edge {
        best = best.min((p.offset - q.offset).abs());
    }
    best
}
