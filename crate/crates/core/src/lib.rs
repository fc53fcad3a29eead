//! Intrinsic Čech persistence of finite metric graphs.
//!
//! The dimension-1 intrinsic Čech persistence diagram of a metric graph of
//! genus `g` is `{(0, ℓᵢ/4)}` where `ℓ₁ ≤ … ≤ ℓ_g` are the lengths of a
//! shortest system of loops. This crate computes that diagram in closed form
//! ([`theorem::predicted_diagram`]) and by brute force: subdivide the graph
//! ([`graph::delta_discretize`]), build the exact Čech filtration on the
//! sample points ([`cech::build_filtration`]) and reduce it over Z₂
//! ([`persistence::reduce`]). The two are compared with the bottleneck
//! distance ([`persistence::bottleneck`]).
//!
//! ```
//! use icech::generators::{generate, GeneratorSpec};
//! use icech::theorem::predicted_diagram;
//!
//! let g = generate(&GeneratorSpec::Wedge { lengths: vec![3.0, 5.0] }).unwrap();
//! let dg = predicted_diagram(&g).unwrap();
//! assert_eq!(dg.points(1).unwrap(), vec![(0.0, 0.75), (0.0, 1.25)]);
//! ```

pub mod cech;
pub mod error;
pub mod generators;
pub mod graph;
pub mod loops;
pub mod persistence;
pub mod theorem;

pub use cech::{build_filtration, FilteredComplex, Model, Simplex};
pub use error::{Error, GraphError, LoopError, PersistenceError, Result};
pub use generators::{generate, GeneratorSpec};
pub use graph::{
    all_pairs_distances, delta_discretize, normalize, point_distance, Discretization,
    DistanceOracle, GraphPoint, MetricGraph,
};
pub use loops::{shortest_system, Loop, LoopSystem, Z2Basis, Z2Vector};
pub use persistence::{bottleneck, reduce, PersistenceDiagram, Point};
pub use theorem::{computed_diagram, d_ic, predicted_diagram, verify, VerificationReport};
