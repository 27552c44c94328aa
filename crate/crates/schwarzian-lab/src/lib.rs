//! Numerical laboratory for singular complex projective structures on the
//! punctured disc.
//!
//! The crate computes monodromy of the second-order equation
//! `u'' + ξ u / 2 = 0` attached to a quadratic differential `ξ(z) dz²`,
//! classifies the puncture monodromy by trace, extracts the translation
//! constant of parabolic monodromy and verifies the residue law it forces on
//! `ξ`, lifts differentials through cyclic orbifold covers, measures
//! hyperbolic sup and Euclidean area norms, and probes developing maps for
//! injectivity and boundary accumulation.
//!
//! Grid-shaped work (probe sampling, norm sampling, batch runs) is
//! data-parallel via `rayon` when the `parallel` feature (default) is
//! enabled; disabling the feature yields a sequential build with identical
//! results.

pub mod error;
pub mod mobius;
pub mod devmap;
pub mod monodromy;
pub mod ode;
pub mod schwarzian;
pub mod norms;
pub mod parallel;
pub mod probes;
pub mod problem;
pub mod roots;
pub mod series;

pub use error::{Error, Result};
pub use series::LaurentSeries;
