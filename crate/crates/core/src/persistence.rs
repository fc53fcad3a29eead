//! Z₂ persistent homology by boundary-matrix column reduction, and the
//! bottleneck distance between diagrams.

use serde_json::{json, Value};

use crate::cech::FilteredComplex;
use crate::error::PersistenceError;

/// `(birth, death)`; `death` may be `f64::INFINITY`.
pub type Point = (f64, f64);

/// Dimension-0 and dimension-1 diagrams. Only pairs with `death > birth` are
/// kept; points are sorted by `(birth, death)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistenceDiagram {
    dims: [Vec<Point>; 2],
}

fn sort_points(points: &mut [Point]) {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.total_cmp(&b.1)));
}

impl PersistenceDiagram {
    pub fn new(h0: Vec<Point>, h1: Vec<Point>) -> Self {
        let mut dims = [h0, h1];
        for d in &mut dims {
            d.retain(|p| p.1 > p.0);
            sort_points(d);
        }
        Self { dims }
    }

    /// A diagram holding only dimension-1 points.
    pub fn dim1(points: Vec<Point>) -> Self {
        Self::new(Vec::new(), points)
    }

    /// Points of dimension `dim` sorted by `(birth, death)`.
    pub fn points(&self, dim: usize) -> Result<Vec<Point>, PersistenceError> {
        self.dims
            .get(dim)
            .cloned()
            .ok_or(PersistenceError::DimensionOutOfRange(dim))
    }

    pub fn dim_points(&self, dim: usize) -> &[Point] {
        &self.dims[dim]
    }

    pub fn to_json(&self, dim: usize) -> Result<Value, PersistenceError> {
        Ok(points_to_json(dim, &self.points(dim)?))
    }
}

/// Accessor form of [`PersistenceDiagram::points`].
pub fn diagram_points(d: &PersistenceDiagram, dim: usize) -> Result<Vec<Point>, PersistenceError> {
    d.points(dim)
}

fn coord(x: f64) -> Value {
    if x.is_infinite() {
        json!("inf")
    } else {
        json!(x)
    }
}

/// `{"dim": k, "points": [[birth, death-or-"inf"], ...]}`
pub fn points_to_json(dim: usize, points: &[Point]) -> Value {
    let pts: Vec<Value> = points.iter().map(|&(b, d)| json!([coord(b), coord(d)])).collect();
    json!({ "dim": dim, "points": pts })
}

/// Inverse of [`points_to_json`]. Returns `None` on malformed input.
pub fn points_from_json(v: &Value) -> Option<(usize, Vec<Point>)> {
    let dim = v.get("dim")?.as_u64()? as usize;
    let parse = |c: &Value| match c {
        Value::String(s) if s == "inf" => Some(f64::INFINITY),
        other => other.as_f64(),
    };
    let points = v
        .get("points")?
        .as_array()?
        .iter()
        .map(|p| {
            let p = p.as_array()?;
            if p.len() != 2 {
                return None;
            }
            Some((parse(&p[0])?, parse(&p[1])?))
        })
        .collect::<Option<Vec<_>>>()?;
    Some((dim, points))
}

/// One persistence pair, including zero-persistence ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPair {
    pub dim: usize,
    pub birth_index: usize,
    pub death_index: Option<usize>,
    pub birth: f64,
    pub death: f64,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub diagram: PersistenceDiagram,
    pub pairs: Vec<RawPair>,
    pub simplex_count: usize,
}

impl Reduction {
    pub fn finite_pair_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.death_index.is_some()).count()
    }

    pub fn infinite_pair_count(&self) -> usize {
        self.pairs.len() - self.finite_pair_count()
    }
}

/// Reduces with clearing enabled and returns the diagram.
pub fn reduce(fc: &FilteredComplex) -> Result<PersistenceDiagram, PersistenceError> {
    Ok(reduce_with(fc, true)?.diagram)
}

fn boundary_matrix(fc: &FilteredComplex) -> Result<Vec<Vec<usize>>, PersistenceError> {
    let index = fc.index();
    let simplices = fc.simplices();
    simplices
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let mut col = Vec::with_capacity(s.vertices.len());
            for face in s.faces() {
                let i = *index.get(face.as_slice()).ok_or_else(|| PersistenceError::MissingFace {
                    face: face.clone(),
                    coface: s.vertices.clone(),
                })?;
                if i >= j || simplices[i].value > s.value {
                    return Err(PersistenceError::NonMonotone {
                        face,
                        face_value: simplices[i].value,
                        coface: s.vertices.clone(),
                        coface_value: s.value,
                    });
                }
                col.push(i);
            }
            col.sort_unstable();
            Ok(col)
        })
        .collect()
}

/// `target ^= source` for sorted index columns.
fn add_column(target: &mut Vec<usize>, source: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < source.len() {
        match target[i].cmp(&source[j]) {
            std::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(source[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&source[j..]);
    *target = out;
}

fn reduce_column(columns: &mut [Vec<usize>], pivot_owner: &mut [Option<usize>], j: usize) {
    while let Some(&low) = columns[j].last() {
        match pivot_owner[low] {
            Some(k) => {
                let (left, right) = columns.split_at_mut(j);
                add_column(&mut right[0], &left[k]);
            }
            None => {
                pivot_owner[low] = Some(j);
                break;
            }
        }
    }
}

/// Standard Z₂ column reduction. With `clearing`, columns are processed
/// from the top dimension down and columns of simplices already known to be
/// paired as creators are zeroed without reduction.
pub fn reduce_with(fc: &FilteredComplex, clearing: bool) -> Result<Reduction, PersistenceError> {
    let mut columns = boundary_matrix(fc)?;
    let simplices = fc.simplices();
    let n = columns.len();
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];

    if clearing {
        let mut cleared = vec![false; n];
        for dim in (0..=2).rev() {
            for j in 0..n {
                if simplices[j].dim() != dim {
                    continue;
                }
                if cleared[j] {
                    columns[j].clear();
                    continue;
                }
                reduce_column(&mut columns, &mut pivot_owner, j);
                if let Some(&low) = columns[j].last() {
                    cleared[low] = true;
                }
            }
        }
    } else {
        for j in 0..n {
            reduce_column(&mut columns, &mut pivot_owner, j);
        }
    }

    let mut is_death = vec![false; n];
    let mut pairs = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        if let Some(&low) = col.last() {
            is_death[j] = true;
            pairs.push(RawPair {
                dim: simplices[low].dim(),
                birth_index: low,
                death_index: Some(j),
                birth: simplices[low].value,
                death: simplices[j].value,
            });
        }
    }
    for j in 0..n {
        if columns[j].is_empty() && !is_death[j] && pivot_owner[j].is_none() {
            pairs.push(RawPair {
                dim: simplices[j].dim(),
                birth_index: j,
                death_index: None,
                birth: simplices[j].value,
                death: f64::INFINITY,
            });
        }
    }
    pairs.sort_by_key(|p| (p.birth_index, p.death_index));

    let mut dims: [Vec<Point>; 2] = Default::default();
    for p in &pairs {
        if p.dim < 2 {
            dims[p.dim].push((p.birth, p.death));
        }
    }
    let [h0, h1] = dims;
    Ok(Reduction {
        diagram: PersistenceDiagram::new(h0, h1),
        pairs,
        simplex_count: n,
    })
}

/// L∞ distance between two diagram points.
fn point_cost(p: Point, q: Point) -> f64 {
    match (p.1.is_infinite(), q.1.is_infinite()) {
        (true, true) => (p.0 - q.0).abs(),
        (false, false) => (p.0 - q.0).abs().max((p.1 - q.1).abs()),
        _ => f64::INFINITY,
    }
}

/// Cost of sending a point to the diagonal.
fn diagonal_cost(p: Point) -> f64 {
    (p.1 - p.0) / 2.0
}

/// A matched pair; `None` on one side means the diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BottleneckMatching {
    pub distance: f64,
    /// Empty when the distance is infinite.
    pub pairs: Vec<MatchedPair>,
}

/// Bipartite graph with left = `a ∪ diag(b)`, right = `b ∪ diag(a)`.
struct MatchingProblem<'a> {
    a: &'a [Point],
    b: &'a [Point],
}

impl MatchingProblem<'_> {
    fn size(&self) -> usize {
        self.a.len() + self.b.len()
    }

    fn edge_cost(&self, left: usize, right: usize) -> f64 {
        let (n, m) = (self.a.len(), self.b.len());
        match (left < n, right < m) {
            (true, true) => point_cost(self.a[left], self.b[right]),
            (true, false) if right - m == left => diagonal_cost(self.a[left]),
            (false, true) if left - n == right => diagonal_cost(self.b[right]),
            (false, false) => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Perfect matching using only edges of cost ≤ `threshold`, as
    /// `right_of[left]`.
    fn perfect_matching(&self, threshold: f64) -> Option<Vec<usize>> {
        let size = self.size();
        let adj: Vec<Vec<usize>> = (0..size)
            .map(|l| (0..size).filter(|&r| self.edge_cost(l, r) <= threshold).collect())
            .collect();
        let mut left_of: Vec<Option<usize>> = vec![None; size];
        for l in 0..size {
            let mut seen = vec![false; size];
            if !augment(l, &adj, &mut left_of, &mut seen) {
                return None;
            }
        }
        let mut right_of = vec![0; size];
        for (r, l) in left_of.iter().enumerate() {
            right_of[l.expect("perfect matching")] = r;
        }
        Some(right_of)
    }
}

fn augment(l: usize, adj: &[Vec<usize>], left_of: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if left_of[r].is_none_or(|other| augment(other, adj, left_of, seen)) {
            left_of[r] = Some(l);
            return true;
        }
    }
    false
}

/// Bottleneck distance with an optimal matching.
///
/// Binary search over the sorted candidate costs; each step tests for a
/// perfect matching among edges no more expensive than the candidate.
pub fn bottleneck_matching(a: &[Point], b: &[Point]) -> BottleneckMatching {
    let infinite = |d: &[Point]| d.iter().filter(|p| p.1.is_infinite()).count();
    if infinite(a) != infinite(b) {
        return BottleneckMatching {
            distance: f64::INFINITY,
            pairs: Vec::new(),
        };
    }
    let problem = MatchingProblem { a, b };
    let size = problem.size();
    let mut candidates = vec![0.0];
    for l in 0..size {
        for r in 0..size {
            let c = problem.edge_cost(l, r);
            if c.is_finite() {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    // merge near-equal costs, keeping the largest of each run so every
    // surviving candidate is still an attainable threshold
    let mut merged: Vec<f64> = Vec::with_capacity(candidates.len());
    for c in candidates {
        match merged.last_mut() {
            Some(last) if c - *last <= 1e-12 => *last = c,
            _ => merged.push(c),
        }
    }
    let candidates = merged;

    // the largest candidate is always feasible: every point can reach the diagonal
    // or its infinite partner
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if problem.perfect_matching(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let distance = candidates[lo];
    let right_of = problem
        .perfect_matching(distance)
        .expect("largest candidate cost admits a perfect matching");
    let (n, m) = (a.len(), b.len());
    let mut pairs = Vec::new();
    for (l, &r) in right_of.iter().enumerate() {
        let cost = problem.edge_cost(l, r);
        match (l < n, r < m) {
            (true, true) => pairs.push(MatchedPair {
                left: Some(l),
                right: Some(r),
                cost,
            }),
            (true, false) => pairs.push(MatchedPair {
                left: Some(l),
                right: None,
                cost,
            }),
            (false, true) => pairs.push(MatchedPair {
                left: None,
                right: Some(r),
                cost,
            }),
            (false, false) => {}
        }
    }
    // the threshold is attained by some pair; report the realised maximum
    let realised = pairs.iter().map(|p| p.cost).fold(0.0, f64::max);
    BottleneckMatching {
        distance: realised,
        pairs,
    }
}

/// Bottleneck distance under the L∞ norm with diagonal projections.
pub fn bottleneck(a: &[Point], b: &[Point]) -> f64 {
    bottleneck_matching(a, b).distance
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{Model, Simplex};

    fn complex(simplices: &[(&[usize], f64)]) -> FilteredComplex {
        FilteredComplex::new(
            simplices
                .iter()
                .map(|&(v, x)| Simplex::new(v.to_vec(), x))
                .collect(),
            Model::Cech,
            f64::INFINITY,
        )
        .unwrap()
    }

    fn hollow_triangle() -> Vec<(&'static [usize], f64)> {
        vec![
            (&[0], 0.0),
            (&[1], 0.0),
            (&[2], 0.0),
            (&[0, 1], 1.0),
            (&[1, 2], 1.0),
            (&[0, 2], 1.0),
        ]
    }

    #[test]
    fn hollow_triangle_keeps_its_cycle() {
        let fc = complex(&hollow_triangle());
        for clearing in [false, true] {
            let r = reduce_with(&fc, clearing).unwrap();
            let h0 = r.diagram.points(0).unwrap();
            assert_eq!(h0, vec![(0.0, 1.0), (0.0, 1.0), (0.0, f64::INFINITY)]);
            assert_eq!(r.diagram.points(1).unwrap(), vec![(1.0, f64::INFINITY)]);
            assert_eq!(r.simplex_count, 2 * r.finite_pair_count() + r.infinite_pair_count());
        }
    }

    #[test]
    fn filled_triangle_kills_cycle() {
        let mut s = hollow_triangle();
        s.push((&[0, 1, 2], 2.0));
        let d = reduce(&complex(&s)).unwrap();
        assert_eq!(d.points(1).unwrap(), vec![(1.0, 2.0)]);
        assert_eq!(d.points(0).unwrap().iter().filter(|p| p.1.is_infinite()).count(), 1);
    }

    #[test]
    fn zero_persistence_pairs_only_in_raw_listing() {
        let mut s = hollow_triangle();
        s.push((&[0, 1, 2], 1.0));
        let r = reduce_with(&complex(&s), true).unwrap();
        assert!(r.diagram.points(1).unwrap().is_empty());
        assert!(r.pairs.iter().any(|p| p.dim == 1 && p.birth == p.death));
    }

    #[test]
    fn rejects_non_monotone() {
        let fc = FilteredComplex::from_ordered(
            vec![
                Simplex::new(vec![0], 0.0),
                Simplex::new(vec![1], 2.0),
                Simplex::new(vec![0, 1], 1.0),
            ],
            Model::Cech,
            2.0,
        )
        .unwrap();
        let err = reduce(&fc).unwrap_err();
        assert!(matches!(err, PersistenceError::NonMonotone { ref face, .. } if face == &vec![1]));
        let out_of_order = FilteredComplex::from_ordered(
            vec![
                Simplex::new(vec![0], 0.0),
                Simplex::new(vec![0, 1], 1.0),
                Simplex::new(vec![1], 1.0),
            ],
            Model::Cech,
            2.0,
        )
        .unwrap();
        assert!(matches!(reduce(&out_of_order), Err(PersistenceError::NonMonotone { .. })));
    }

    #[test]
    fn diagram_accessors() {
        let d = PersistenceDiagram::dim1(vec![(0.0, 1.25), (0.0, 0.75)]);
        assert_eq!(diagram_points(&d, 1).unwrap(), vec![(0.0, 0.75), (0.0, 1.25)]);
        assert!(PersistenceDiagram::default().points(1).unwrap().is_empty());
        assert_eq!(d.points(2), Err(PersistenceError::DimensionOutOfRange(2)));
    }

    #[test]
    fn diagram_json() {
        let d = PersistenceDiagram::new(vec![(0.0, f64::INFINITY)], vec![(0.0, 3.0)]);
        assert_eq!(d.to_json(1).unwrap().to_string(), r#"{"dim":1,"points":[[0.0,3.0]]}"#);
        let h0 = d.to_json(0).unwrap();
        assert_eq!(h0["points"][0][1], "inf");
        assert_eq!(points_from_json(&h0), Some((0, vec![(0.0, f64::INFINITY)])));
        assert_eq!(points_from_json(&json!({"dim": 1, "points": [[0]]})), None);
    }

    #[test]
    fn bottleneck_examples() {
        assert_eq!(bottleneck(&[(0.0, 1.0)], &[(0.0, 1.0)]), 0.0);
        assert_eq!(bottleneck(&[(0.0, 1.0)], &[]), 0.5);
        assert_eq!(bottleneck(&[], &[(0.0, 1.0)]), 0.5);
        assert_eq!(bottleneck(&[(0.0, 1.0)], &[(0.0, 1.25)]), 0.25);
        assert_eq!(bottleneck(&[], &[]), 0.0);
    }

    #[test]
    fn bottleneck_with_essential_points() {
        let inf = f64::INFINITY;
        assert_eq!(bottleneck(&[(0.0, inf)], &[]), inf);
        assert_eq!(bottleneck(&[(0.0, inf)], &[(0.5, inf)]), 0.5);
        assert_eq!(bottleneck(&[(0.0, inf), (1.0, 2.0)], &[(0.25, inf)]), 0.5);
    }

    #[test]
    fn matching_reports_pairs() {
        let m = bottleneck_matching(&[(0.0, 1.0), (0.0, 0.1)], &[(0.0, 1.2)]);
        assert!((m.distance - 0.2).abs() < 1e-12);
        assert!(m.pairs.iter().any(|p| p.left == Some(0) && p.right == Some(0)));
        assert!(m.pairs.iter().any(|p| p.left == Some(1) && p.right.is_none()));
    }
}
