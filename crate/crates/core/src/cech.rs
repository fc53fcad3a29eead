//! Intrinsic Čech and Vietoris-Rips filtrations, up to dimension 2, on the
//! vertices of a δ-discretization.
//!
//! A simplex enters at the smallest radius `ε` for which the closed graph
//! balls of radius `ε` around its vertices share a point. For an edge that is
//! half the distance between its endpoints. For a triangle it is the graph
//! 1-center radius `min_w max_i d(w, x_i)` over every point `w` of the
//! underlying space, not only the sample vertices.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::PersistenceError;
use crate::graph::{all_pairs_distances, Discretization, DistanceOracle, MetricGraph};
use crate::loops::LoopSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Cech,
    Rips,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Cech => "cech",
            Model::Rips => "rips",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// Strictly increasing vertex indices, 1 to 3 of them.
    pub vertices: Vec<usize>,
    pub value: f64,
}

impl Simplex {
    pub fn new(vertices: Vec<usize>, value: f64) -> Self {
        Self { vertices, value }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-1 faces, in the order obtained by dropping each vertex.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        if self.vertices.len() < 2 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|skip| {
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect()
    }
}

fn filtration_order(a: &Simplex, b: &Simplex) -> std::cmp::Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| a.vertices.len().cmp(&b.vertices.len()))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

/// Simplices in filtration order together with how they were produced.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
    pub model: Model,
    pub eps_max: f64,
}

impl FilteredComplex {
    /// Sorts `simplices` by `(value, dimension, vertices)` and checks that the
    /// set is closed under faces.
    pub fn new(mut simplices: Vec<Simplex>, model: Model, eps_max: f64) -> Result<Self, PersistenceError> {
        simplices.sort_by(filtration_order);
        Self::from_ordered(simplices, model, eps_max)
    }

    /// Keeps the caller's order. Monotonicity is checked by the reduction.
    pub fn from_ordered(simplices: Vec<Simplex>, model: Model, eps_max: f64) -> Result<Self, PersistenceError> {
        let complex = Self {
            simplices,
            model,
            eps_max,
        };
        complex.check_closed()?;
        Ok(complex)
    }

    fn check_closed(&self) -> Result<(), PersistenceError> {
        let present: std::collections::HashSet<&[usize]> =
            self.simplices.iter().map(|s| s.vertices.as_slice()).collect();
        for s in &self.simplices {
            let v = &s.vertices;
            if v.is_empty() || v.len() > 3 || v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(PersistenceError::MalformedSimplex(v.clone()));
            }
            for face in s.faces() {
                if !present.contains(face.as_slice()) {
                    return Err(PersistenceError::MissingFace {
                        face,
                        coface: v.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count_by_dim(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }

    /// Position of every simplex keyed by its vertex tuple.
    pub fn index(&self) -> HashMap<&[usize], usize> {
        self.simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.as_slice(), i))
            .collect()
    }

    /// Debug dump, one `dim value v0 v1 [v2]` line per simplex.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.simplices {
            let _ = write!(out, "{} {}", s.dim(), s.value);
            for v in &s.vertices {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Filtration value of the edge `{x, y}`: half their distance.
pub fn edge_value(oracle: &DistanceOracle, x: usize, y: usize) -> f64 {
    oracle.distance(x, y) / 2.0
}

/// Exact graph 1-center radius of three vertices.
///
/// On an edge `(u, v)` of length `L` the distance from the point at offset
/// `t` to a target `p` is `min(d(u,p) + t, d(v,p) + L - t)`. The maximum over
/// the targets is piecewise linear in `t`, with breakpoints only where a
/// rising line meets a falling one, so evaluating `t = 0`, `t = L` and those
/// crossings finds its minimum on the edge. Results within round-off of
/// [`rips_triangle_value`] are returned as exactly that value.
pub fn triangle_value(g: &MetricGraph, oracle: &DistanceOracle, x: usize, y: usize, z: usize) -> f64 {
    let rows = [oracle.row(x), oracle.row(y), oracle.row(z)];
    let mut best = f64::INFINITY;
    for ((a, b), c) in rows[0].iter().zip(rows[1]).zip(rows[2]) {
        best = best.min(a.max(*b).max(*c));
    }
    if !best.is_finite() {
        return best;
    }
    for e in g.edges() {
        let (u, v, len) = (e.u, e.v, e.length);
        let mut lower = 0.0f64;
        for row in &rows {
            lower = lower.max(row[u].min(row[v]));
        }
        if lower >= best {
            continue;
        }
        let rise = [rows[0][u], rows[1][u], rows[2][u]];
        let fall = [rows[0][v] + len, rows[1][v] + len, rows[2][v] + len];
        let objective = |t: f64| {
            (0..3)
                .map(|p| (rise[p] + t).min(fall[p] - t))
                .fold(0.0f64, f64::max)
        };
        best = best.min(objective(0.0)).min(objective(len));
        for a in rise {
            for b in fall {
                let t = (b - a) / 2.0;
                if t > 0.0 && t < len {
                    best = best.min(objective(t));
                }
            }
        }
    }
    snap_to(best, rips_triangle_value(oracle, x, y, z))
}

/// Rips value of a triangle: half its diameter.
pub fn rips_triangle_value(oracle: &DistanceOracle, x: usize, y: usize, z: usize) -> f64 {
    edge_value(oracle, x, y)
        .max(edge_value(oracle, x, z))
        .max(edge_value(oracle, y, z))
}

/// The 1-center radius is never below half the diameter. Values that differ
/// from it only by accumulated round-off are snapped onto it, so faces never
/// follow cofaces and geodesically collinear triples enter with their edges.
fn snap_to(cech: f64, rips: f64) -> f64 {
    if cech - rips <= SNAP_RELATIVE * rips.max(1.0) {
        rips
    } else {
        cech
    }
}

const SNAP_RELATIVE: f64 = 1e-10;

/// Builds the filtration on the discretization's vertices, computing the
/// distance table first.
pub fn build_filtration(d: &Discretization, model: Model, eps_max: f64) -> FilteredComplex {
    let oracle = all_pairs_distances(&d.graph);
    build_filtration_with_oracle(&d.graph, &oracle, model, eps_max)
}

/// All vertices at 0, every edge and triangle with value at most `eps_max`.
pub fn build_filtration_with_oracle(
    g: &MetricGraph,
    oracle: &DistanceOracle,
    model: Model,
    eps_max: f64,
) -> FilteredComplex {
    let n = g.vertex_count();
    // pairs beyond 2·eps_max can never enter
    let neighbours: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .filter(|&j| edge_value(oracle, i, j) <= eps_max)
                .collect()
        })
        .collect();

    let mut simplices: Vec<Simplex> = (0..n).map(|v| Simplex::new(vec![v], 0.0)).collect();
    for (i, ns) in neighbours.iter().enumerate() {
        simplices.extend(ns.iter().map(|&j| Simplex::new(vec![i, j], edge_value(oracle, i, j))));
    }
    let triangles: Vec<Simplex> = neighbours
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, ns)| {
            let mut local = Vec::new();
            for (a, &j) in ns.iter().enumerate() {
                for &k in &ns[a + 1..] {
                    if edge_value(oracle, j, k) > eps_max {
                        continue;
                    }
                    let value = match model {
                        Model::Cech => triangle_value(g, oracle, i, j, k),
                        Model::Rips => rips_triangle_value(oracle, i, j, k),
                    };
                    if value <= eps_max {
                        local.push(Simplex::new(vec![i, j, k], value));
                    }
                }
            }
            local
        })
        .collect();
    simplices.extend(triangles);
    simplices.par_sort_by(filtration_order);
    FilteredComplex {
        simplices,
        model,
        eps_max,
    }
}

/// Outcome of the `δ < ℓ₁/4` check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleCheck {
    pub valid: bool,
    pub shortest_loop: Option<f64>,
    pub bound: Option<f64>,
    pub message: String,
}

/// The nerve of the δ-balls is homotopy equivalent to the graph when
/// `δ < ℓ₁/4`; graphs without loops pass for every δ.
pub fn validate_scale(system: &LoopSystem, delta: f64) -> ScaleCheck {
    match system.shortest() {
        None => ScaleCheck {
            valid: true,
            shortest_loop: None,
            bound: None,
            message: "no loops".to_string(),
        },
        Some(l1) => {
            let bound = l1 / 4.0;
            let valid = delta < bound;
            let message = if valid {
                format!("delta {delta} < l1/4 = {bound} (l1 = {l1})")
            } else {
                format!("delta {delta} must be strictly below l1/4 = {bound} (l1 = {l1})")
            };
            ScaleCheck {
                valid,
                shortest_loop: Some(l1),
                bound: Some(bound),
                message,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::delta_discretize;
    use crate::loops::shortest_system;

    fn cycle(lengths: &[f64]) -> MetricGraph {
        let n = lengths.len();
        MetricGraph::new(
            (0..n).map(|i| format!("v{i}")),
            lengths
                .iter()
                .enumerate()
                .map(|(i, &l)| (format!("e{i}"), format!("v{i}"), format!("v{}", (i + 1) % n), l)),
        )
        .unwrap()
    }

    /// Position along the cycle → graph point max-distance, by dense sampling.
    fn grid_one_center(g: &MetricGraph, o: &DistanceOracle, pts: [usize; 3], step: f64) -> f64 {
        use crate::graph::{point_distance, GraphPoint};
        let mut best = f64::INFINITY;
        for (ei, e) in g.edges().iter().enumerate() {
            let k = (e.length / step).ceil() as usize;
            for s in 0..=k {
                let w = GraphPoint {
                    edge: ei,
                    offset: e.length * s as f64 / k as f64,
                };
                let r = pts
                    .iter()
                    .map(|&p| {
                        let at = GraphPoint {
                            edge: g.incident(p)[0],
                            offset: if g.edge(g.incident(p)[0]).u == p {
                                0.0
                            } else {
                                g.edge(g.incident(p)[0]).length
                            },
                        };
                        point_distance(g, o, w, at)
                    })
                    .fold(0.0, f64::max);
                best = best.min(r);
            }
        }
        best
    }

    #[test]
    fn edge_values() {
        let g = cycle(&[3.0; 4]);
        let o = all_pairs_distances(&g);
        assert_eq!(edge_value(&o, 0, 2), 3.0);
        assert_eq!(edge_value(&o, 0, 1), 1.5);
        let d = delta_discretize(&g, 0.15);
        let o = all_pairs_distances(&d.graph);
        let e = d.graph.edge(0);
        assert!((edge_value(&o, e.u, e.v) - 0.075).abs() < 1e-15);
    }

    #[test]
    fn triangle_values_on_cycle() {
        // arc positions 0..11 on a cycle of length 12
        let g = cycle(&[1.0; 12]);
        let o = all_pairs_distances(&g);
        assert_eq!(triangle_value(&g, &o, 0, 4, 8), 4.0);
        assert_eq!(triangle_value(&g, &o, 0, 1, 2), 1.0);
        assert_eq!(grid_one_center(&g, &o, [0, 4, 8], 0.01), 4.0);
        assert_eq!(grid_one_center(&g, &o, [0, 1, 2], 0.01), 1.0);
        // three points on a shortest path: largest half-distance
        assert_eq!(triangle_value(&g, &o, 0, 2, 5), 2.5);
        assert_eq!(rips_triangle_value(&o, 0, 2, 5), 2.5);
    }

    #[test]
    fn triangle_value_off_vertex_optimum() {
        // positions 0, 1, 3 on a cycle of length 6: centre at 1.5, inside edge v1-v2
        let g = cycle(&[1.0, 2.0, 3.0]);
        let o = all_pairs_distances(&g);
        assert_eq!(triangle_value(&g, &o, 0, 1, 2), 1.5);
        let grid = grid_one_center(&g, &o, [0, 1, 2], 0.001);
        assert!((grid - 1.5).abs() < 1e-3, "{grid}");
    }

    #[test]
    fn four_point_cycle_filtrations() {
        let d = delta_discretize(&cycle(&[3.0; 4]), 3.0);
        assert_eq!(d.graph.vertex_count(), 4);
        let rips = build_filtration(&d, Model::Rips, 10.0);
        let mut edges: Vec<f64> = rips.simplices().iter().filter(|s| s.dim() == 1).map(|s| s.value).collect();
        edges.sort_by(f64::total_cmp);
        assert_eq!(edges, vec![1.5, 1.5, 1.5, 1.5, 3.0, 3.0]);
        let tris: Vec<f64> = rips.simplices().iter().filter(|s| s.dim() == 2).map(|s| s.value).collect();
        assert_eq!(tris, vec![3.0; 4]);

        // each triple holds an antipodal pair and the vertex between them, so
        // the 1-center sits on that vertex at radius 3
        let cech = build_filtration(&d, Model::Cech, 10.0);
        let tris: Vec<f64> = cech.simplices().iter().filter(|s| s.dim() == 2).map(|s| s.value).collect();
        assert_eq!(tris, vec![3.0; 4]);
        let o = all_pairs_distances(&d.graph);
        assert_eq!(grid_one_center(&d.graph, &o, [0, 1, 2], 0.01), 3.0);
        assert_eq!(cech.count_by_dim(), [4, 6, 4]);
    }

    #[test]
    fn tree_triangle_is_max_edge() {
        let g = MetricGraph::new(
            ["a", "b", "c"],
            [
                ("1".into(), "a".into(), "b".into(), 1.0),
                ("2".into(), "b".into(), "c".into(), 2.0),
            ],
        )
        .unwrap();
        let d = delta_discretize(&g, 5.0);
        let fc = build_filtration(&d, Model::Cech, 100.0);
        let tri = fc.simplices().iter().find(|s| s.dim() == 2).unwrap();
        assert_eq!(tri.value, 1.5);
    }

    #[test]
    fn eps_max_prunes() {
        let d = delta_discretize(&cycle(&[3.0; 4]), 3.0);
        let fc = build_filtration(&d, Model::Cech, 2.0);
        assert_eq!(fc.count_by_dim(), [4, 4, 0]);
        assert!(fc.simplices().iter().all(|s| s.value <= 2.0));
    }

    #[test]
    fn complex_validation() {
        let missing = FilteredComplex::new(
            vec![Simplex::new(vec![0], 0.0), Simplex::new(vec![0, 1], 1.0)],
            Model::Cech,
            1.0,
        );
        assert!(matches!(missing, Err(PersistenceError::MissingFace { .. })));
        let bad = FilteredComplex::new(vec![Simplex::new(vec![1, 0], 0.0)], Model::Cech, 1.0);
        assert!(matches!(bad, Err(PersistenceError::MalformedSimplex(_))));
    }

    #[test]
    fn dump_format() {
        let d = delta_discretize(&cycle(&[3.0; 4]), 3.0);
        let fc = build_filtration(&d, Model::Rips, 1.5);
        let text = fc.dump();
        assert_eq!(text.lines().next(), Some("0 0 0"));
        assert!(text.lines().any(|l| l == "1 1.5 0 1"));
    }

    #[test]
    fn scale_validity() {
        let s = shortest_system(&cycle(&[3.0; 4])).unwrap();
        assert!(validate_scale(&s, 0.15).valid);
        let bad = validate_scale(&s, 3.0);
        assert!(!bad.valid);
        assert_eq!(bad.bound, Some(3.0));
        let tree = MetricGraph::new(["a", "b"], [("e".into(), "a".into(), "b".into(), 1.0)]).unwrap();
        let check = validate_scale(&shortest_system(&tree).unwrap(), 100.0);
        assert!(check.valid);
        assert_eq!(check.message, "no loops");
    }
}
