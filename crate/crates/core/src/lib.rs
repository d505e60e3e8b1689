//! Desk-scale computational convex geometry.
//!
//! The crate is organized around exact oracles for small convex bodies and
//! the verification machinery built on top of them:
//!
//! - [`body`] / [`ops`]: vertex/facet representations, support and gauge
//!   oracles, polar and difference bodies, projections, containment, and
//!   sandwich ratios.
//! - [`metrics`]: minimum-volume enclosing ellipsoids, concentric ball
//!   sandwiches, brute-force facet/vertex enumeration, sampled spherical
//!   ratios.
//! - [`cones`]: double cones, the intersection identity
//!   `δT ∩ (δT + e) = e/2 + (δ − 1/2)T`, center recovery, and the stability
//!   verifier for `T ⊆ L − L ⊆ δT`.
//! - [`pipeline`]: spherical mean-norm estimates, the polarity bound chain,
//!   Haar subspace search, and the symmetrize-then-recover reduction.
//! - [`generate`]: built-in bodies and seeded instance generators.
//!
//! Everything is deterministic for a fixed seed: Monte Carlo budgets are
//! chunked by index, so results do not depend on the worker pool size.

pub mod body;
pub mod cones;
pub mod error;
pub mod generate;
pub mod lp;
pub mod metrics;
pub mod ops;
pub mod pipeline;
pub mod sampling;

pub use body::{
    GaugeBody, HPolytope, Point, SandwichCertificate, Subspace, SubspaceData, VPolytope,
    VPolytopeData,
};
pub use cones::{DoubleCone, Lemma3Report};
pub use error::{Error, Result};
pub use metrics::Ellipsoid;
pub use pipeline::{
    CaseTag, Eq2Report, MeanNormEstimate, ReductionOutcome, ReductionOutcomeData,
    ReductionParams, ReductionWitness, ReductionWitnessData,
};
