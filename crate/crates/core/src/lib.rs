//! Symmetry- and relabeling-invariant distances between multi-agent
//! formations, and the persistence signatures they control.
//!
//! A formation is an ordered tuple of `n` points in an ambient space (the
//! circle, a flat torus, or the 2-sphere). Two formations are compared up
//! to the symmetry group of the space (translations or rotations) and up
//! to relabeling of the agents:
//!
//! ```text
//! d([x], [y]) = min over g, sigma of max_i d(g x_i, y_sigma(i))
//! ```
//!
//! Pairwise inter-agent distances feed a Vietoris-Rips persistence
//! signature whose bottleneck distance is bounded by `d`. The library
//! computes both sides, certifies every distance with an explicit
//! alignment, and ships generators for shapes that persistence cannot
//! distinguish.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.
//!
//! ```
//! use formetric::{formation_distance, Configuration, SolverOptions};
//!
//! let x = Configuration::circle(&[0.0, 1.0]).unwrap();
//! let y = Configuration::circle(&[2.0, 3.0]).unwrap();
//! let r = formation_distance(&x, &y, &SolverOptions::default()).unwrap();
//! assert_eq!(r.upper_bound, 0.0);
//! ```

pub mod alignment;
pub mod ambient;
pub mod assignment;
pub mod counterexamples;
pub mod diagram;
mod error;
pub mod formation;
pub mod geodesic;
pub mod oracle;
pub mod phase;
pub mod rips;
pub mod rotation;
mod scalar;

pub use alignment::{formation_distance, gh_correspondence_distortion, Method};
pub use ambient::{AmbientSpace, CutLocus};
pub use diagram::{bottleneck_distance, stability_check};
pub use error::{Error, Result};
pub use formation::Permutation;
pub use geodesic::{metric_axiom_sampler, quotient_geodesic, EvidenceGrade};
pub use phase::{check_gap_labeling, gap_vector, inverse_bound_check, reconstruct_from_gaps, semicircle_support};
pub use rips::{rips_diagram, signature};
pub use scalar::Scalar;

pub type Point = ambient::Point<f64>;
pub type GroupElement = ambient::GroupElement<f64>;
pub type Quaternion = rotation::Quaternion<f64>;
pub type Configuration = formation::Configuration<f64>;
pub type DistanceMatrix = formation::DistanceMatrix<f64>;
pub type LabeledAction = formation::LabeledAction<f64>;
pub type CostMatrix = assignment::CostMatrix<f64>;
pub type SolverOptions = alignment::SolverOptions<f64>;
pub type AlignmentResult = alignment::AlignmentResult<f64>;
pub type PersistenceDiagram = rips::PersistenceDiagram<f64>;
pub type StabilityReport = diagram::StabilityReport<f64>;
pub type AnchoredLift = phase::AnchoredLift<f64>;
pub type GapLabeling = phase::GapLabeling<f64>;
pub type InverseReport = phase::InverseReport<f64>;
pub type QuotientGeodesic = geodesic::QuotientGeodesic<f64>;
