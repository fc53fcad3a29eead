//! Closed-form dimension-1 diagrams, the brute-force pipeline that checks
//! them, and the intrinsic Čech distance between graphs.

use serde::Serialize;

use crate::cech::{build_filtration, validate_scale, Model, ScaleCheck};
use crate::error::{Error, LoopError, Result};
use crate::graph::{all_pairs_distances, delta_discretize, normalize, MetricGraph};
use crate::loops::{shortest_system, LoopSystem};
use crate::persistence::{bottleneck, bottleneck_matching, reduce, PersistenceDiagram, Point};

/// Fraction of the longest loop used as the default filtration cap.
pub const EPS_MAX_FACTOR: f64 = 0.35;

/// `{(0, ℓᵢ/4)}` over a shortest system of loops.
pub fn predicted_diagram(g: &MetricGraph) -> Result<PersistenceDiagram, LoopError> {
    Ok(predicted_from_system(&shortest_system(g)?, Model::Cech))
}

/// Closed-form dimension-1 diagram for the given model. The Rips form
/// `(0, ℓ/6)` is only known for a single loop; it is returned for every loop
/// here and callers restrict it to genus 1.
pub fn predicted_from_system(system: &LoopSystem, model: Model) -> PersistenceDiagram {
    let divisor = match model {
        Model::Cech => 4.0,
        Model::Rips => 6.0,
    };
    PersistenceDiagram::dim1(system.lengths().into_iter().map(|l| (0.0, l / divisor)).collect())
}

/// Default filtration cap: `0.35·ℓ_g`, or for loop-free graphs enough to
/// admit every simplex.
pub fn default_eps_max(g: &MetricGraph, system: &LoopSystem, delta: f64) -> f64 {
    match system.longest() {
        Some(lg) => EPS_MAX_FACTOR * lg,
        None => {
            let o = all_pairs_distances(g);
            let n = g.vertex_count();
            let diameter = (0..n)
                .flat_map(|u| o.row(u).iter().copied())
                .filter(|d| d.is_finite())
                .fold(0.0, f64::max);
            (diameter / 2.0).max(delta)
        }
    }
}

/// Default verification tolerance `max(2δ, 0.02·ℓ_g/4)`.
pub fn default_tolerance(system: &LoopSystem, delta: f64) -> f64 {
    let from_loops = system.longest().map_or(0.0, |lg| 0.02 * lg / 4.0);
    (2.0 * delta).max(from_loops)
}

/// Default discretization step `ℓ₁/10`, or for loop-free graphs a tenth of
/// the longest edge.
pub fn default_delta(g: &MetricGraph, system: &LoopSystem) -> f64 {
    match system.shortest() {
        Some(l1) => l1 / 10.0,
        None => g.edges().iter().map(|e| e.length).fold(0.0, f64::max).max(1.0) / 10.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputedDiagram {
    #[serde(skip)]
    pub diagram: PersistenceDiagram,
    pub model: Model,
    pub delta: f64,
    pub eps_max: f64,
    pub scale: ScaleCheck,
    /// Vertices, edges and triangles of the filtration.
    pub simplex_counts: [usize; 3],
}

/// normalize → discretize → filtration → reduction.
pub fn computed_diagram(
    g: &MetricGraph,
    delta: f64,
    model: Model,
    eps_max: Option<f64>,
) -> Result<ComputedDiagram> {
    check_positive("delta", delta)?;
    if let Some(e) = eps_max {
        check_positive("eps_max", e)?;
    }
    let system = shortest_system(g)?;
    computed_with_system(&system, delta, model, eps_max)
}

fn computed_with_system(
    system: &LoopSystem,
    delta: f64,
    model: Model,
    eps_max: Option<f64>,
) -> Result<ComputedDiagram> {
    let simple = normalize(&system.graph).graph;
    let disc = delta_discretize(&simple, delta);
    let eps_max = eps_max.unwrap_or_else(|| default_eps_max(&simple, system, delta));
    let fc = build_filtration(&disc, model, eps_max);
    let diagram = reduce(&fc)?;
    Ok(ComputedDiagram {
        diagram,
        model,
        delta,
        eps_max,
        scale: validate_scale(system, delta),
        simplex_counts: fc.count_by_dim(),
    })
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub delta: f64,
    pub tol: Option<f64>,
    pub model: Model,
    pub eps_max: Option<f64>,
}

impl VerifyOptions {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            tol: None,
            model: Model::Cech,
            eps_max: None,
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn eps_max(mut self, eps_max: f64) -> Self {
        self.eps_max = Some(eps_max);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyStatus {
    Pass,
    InvalidScale,
    CountMismatch,
    ToleranceExceeded,
    /// Rips has a closed form for single loops only.
    UnsupportedGenus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedPoint {
    #[serde(serialize_with = "ser_point")]
    pub predicted: Option<Point>,
    #[serde(serialize_with = "ser_point")]
    pub computed: Option<Point>,
    pub error: f64,
}

fn ser_point<S: serde::Serializer>(p: &Option<Point>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    match p {
        None => s.serialize_none(),
        Some((b, d)) => {
            let mut seq = s.serialize_seq(Some(2))?;
            seq.serialize_element(b)?;
            if d.is_infinite() {
                seq.serialize_element("inf")?;
            } else {
                seq.serialize_element(d)?;
            }
            seq.end()
        }
    }
}

fn ser_points<S: serde::Serializer>(ps: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::persistence::points_to_json(1, ps)["points"].serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub status: VerifyStatus,
    pub pass: bool,
    pub model: Model,
    pub genus: usize,
    pub loop_lengths: Vec<f64>,
    #[serde(serialize_with = "ser_points")]
    pub predicted: Vec<Point>,
    #[serde(serialize_with = "ser_points")]
    pub computed: Vec<Point>,
    pub delta: f64,
    pub eps_max: f64,
    pub tol: f64,
    pub bottleneck: f64,
    pub matching: Vec<MatchedPoint>,
    pub scale: ScaleCheck,
    pub simplex_counts: [usize; 3],
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization is infallible")
    }
}

/// Compares the closed-form diagram with the brute-force one.
///
/// Passes when `δ < ℓ₁/4`, both diagrams have the same number of points and
/// their bottleneck distance is within the tolerance.
pub fn verify(g: &MetricGraph, opts: VerifyOptions) -> Result<VerificationReport> {
    check_positive("delta", opts.delta)?;
    if let Some(t) = opts.tol {
        check_positive("tol", t)?;
    }
    if let Some(e) = opts.eps_max {
        check_positive("eps_max", e)?;
    }
    let system = shortest_system(g)?;
    let tol = opts.tol.unwrap_or_else(|| default_tolerance(&system, opts.delta));
    let predicted = predicted_from_system(&system, opts.model).dim_points(1).to_vec();
    let computed = computed_with_system(&system, opts.delta, opts.model, opts.eps_max)?;
    let computed_points = computed.diagram.dim_points(1).to_vec();

    let m = bottleneck_matching(&predicted, &computed_points);
    let matching = m
        .pairs
        .iter()
        .map(|p| MatchedPoint {
            predicted: p.left.map(|i| predicted[i]),
            computed: p.right.map(|j| computed_points[j]),
            error: p.cost,
        })
        .collect();

    let status = if !computed.scale.valid {
        VerifyStatus::InvalidScale
    } else if opts.model == Model::Rips && system.genus() != 1 {
        VerifyStatus::UnsupportedGenus
    } else if predicted.len() != computed_points.len() {
        VerifyStatus::CountMismatch
    } else if m.distance > tol {
        VerifyStatus::ToleranceExceeded
    } else {
        VerifyStatus::Pass
    };

    Ok(VerificationReport {
        pass: status == VerifyStatus::Pass,
        status,
        model: opts.model,
        genus: system.genus(),
        loop_lengths: system.lengths(),
        predicted,
        computed: computed_points,
        delta: opts.delta,
        eps_max: computed.eps_max,
        tol,
        bottleneck: m.distance,
        matching,
        scale: computed.scale,
        simplex_counts: computed.simplex_counts,
    })
}

/// Intrinsic Čech distance: bottleneck distance between the closed-form
/// dimension-1 diagrams.
pub fn d_ic(g1: &MetricGraph, g2: &MetricGraph) -> Result<f64, LoopError> {
    let a = predicted_diagram(g1)?;
    let b = predicted_diagram(g2)?;
    Ok(bottleneck(a.dim_points(1), b.dim_points(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GeneratorSpec};

    fn tree() -> MetricGraph {
        generate(&GeneratorSpec::Random { n: 6, m: 5, seed: 3 }).unwrap()
    }

    #[test]
    fn predicted_examples() {
        let c4 = generate(&GeneratorSpec::cycle(4.0)).unwrap();
        assert_eq!(predicted_diagram(&c4).unwrap().points(1).unwrap(), vec![(0.0, 1.0)]);
        let w = generate(&GeneratorSpec::Wedge { lengths: vec![3.0, 5.0] }).unwrap();
        assert_eq!(
            predicted_diagram(&w).unwrap().points(1).unwrap(),
            vec![(0.0, 0.75), (0.0, 1.25)]
        );
        assert!(predicted_diagram(&tree()).unwrap().points(1).unwrap().is_empty());
    }

    #[test]
    fn distances_between_graphs() {
        let c4 = generate(&GeneratorSpec::cycle(4.0)).unwrap();
        let c5 = generate(&GeneratorSpec::cycle(5.0)).unwrap();
        assert_eq!(d_ic(&c4, &c4).unwrap(), 0.0);
        assert_eq!(d_ic(&c4, &c5).unwrap(), 0.25);
        assert_eq!(d_ic(&c5, &c4).unwrap(), 0.25);
        assert_eq!(d_ic(&c4, &tree()).unwrap(), 0.5);
    }

    #[test]
    fn invalid_scale_fails() {
        let c = generate(&GeneratorSpec::cycle(12.0)).unwrap();
        let r = verify(&c, VerifyOptions::new(3.0)).unwrap();
        assert!(!r.pass);
        assert_eq!(r.status, VerifyStatus::InvalidScale);
        assert!(!r.scale.valid);
    }

    #[test]
    fn tree_passes_with_empty_diagrams() {
        let r = verify(&tree(), VerifyOptions::new(0.3)).unwrap();
        assert!(r.pass, "{:?}", r.status);
        assert!(r.predicted.is_empty() && r.computed.is_empty());
        assert_eq!(r.bottleneck, 0.0);
    }

    #[test]
    fn rips_requires_single_loop() {
        let t = generate(&GeneratorSpec::Theta { a: 2.0, b: 3.0, c: 4.0 }).unwrap();
        let r = verify(&t, VerifyOptions::new(0.4).model(Model::Rips)).unwrap();
        assert_eq!(r.status, VerifyStatus::UnsupportedGenus);
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = generate(&GeneratorSpec::cycle(12.0)).unwrap();
        assert!(matches!(verify(&c, VerifyOptions::new(0.0)), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            computed_diagram(&c, 0.5, Model::Cech, Some(-1.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn report_json_fields() {
        let c = generate(&GeneratorSpec::cycle(12.0)).unwrap();
        let r = verify(&c, VerifyOptions::new(0.6)).unwrap();
        let v = r.to_json();
        for key in ["status", "pass", "predicted", "computed", "delta", "eps_max", "tol", "bottleneck", "matching", "scale"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["predicted"], serde_json::json!([[0.0, 3.0]]));
        assert_eq!(v["delta"], 0.6);
        assert!((v["eps_max"].as_f64().unwrap() - 4.2).abs() < 1e-12);
    }
}
