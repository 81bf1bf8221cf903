//! Numerical disc-functional envelopes for weighted homogeneous extremal
//! functions.
//!
//! The crate evaluates homogenized weights over complex cones, optimizes
//! disc functionals over polynomial analytic discs (affine, projective and
//! weighted forms), and certifies the resulting upper bounds against
//! validated logarithmically homogeneous lower candidates.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`];
//! the `*64` aliases below fix `f64`, which is what the command-line driver
//! and the verification suite use.

pub mod disc;
pub mod error;
pub mod functional;
pub mod nelder;
pub mod optimize;
pub mod oracle;
pub mod point;
pub mod poly;
pub mod quad;
pub mod region;
pub mod roots;
pub mod scalar;
pub mod weight;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex scalar over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Point of C^n over `f64`.
pub type Point64 = point::Point<f64>;
pub type RegionSpec64 = region::RegionSpec<f64>;
pub type WeightSpec64 = weight::WeightSpec<f64>;
pub type HomogenizedWeight64 = weight::HomogenizedWeight<f64>;
pub type PolyDisc64 = disc::PolyDisc<f64>;
pub type ProjDisc64 = disc::ProjDisc<f64>;
pub type QuadratureGrid64 = quad::QuadratureGrid<f64>;
pub type EnvelopeProblem64 = optimize::EnvelopeProblem<f64>;
pub type EnvelopeResult64 = optimize::EnvelopeResult<f64>;
pub type CandidateFunction64 = oracle::CandidateFunction<f64>;
