//! Distinguishability norms of bipartite quantum states under restricted
//! measurement classes (ALL, PPT, one-way LOCC, LO), with the convex-geometry
//! estimators and seeded experiments that study their scaling.
//!
//! Numeric routines are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common choices. Experiments run in `f64`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod hermitian;
pub mod norms;
pub mod random;
pub mod scalar;
pub mod stats;

pub use config::{SolverConfig, Tolerances};
pub use error::{Error, Result};
pub use hermitian::{
    BipartiteShape, CMatrix, CVector, Eigen, HermitianOperator, JordanDecomposition, Spectrum,
    Subsystem,
};
pub use constructions::{PovmFamily, Provenance, StatePair};
pub use experiments::{ExperimentConfig, ExperimentName, ExperimentRecord, OutputFormat};
pub use geometry::{GeometryConstants, SupportOracle, WidthEstimate};
pub use norms::{FlaggedBlockOperator, Povm, SolverReport, SolverStatus};
pub use random::{DensityOperator, RngStream};
pub use scalar::Real;

pub type Hermitian64 = HermitianOperator<f64>;
pub type Hermitian32 = HermitianOperator<f32>;
pub type Density64 = DensityOperator<f64>;
pub type Density32 = DensityOperator<f32>;
