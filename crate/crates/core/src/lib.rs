//! Closed-form exponentials for pairs of operators with structured products
//! (`BA = 0` or `BA = -AB`), applied to single-photon Susskind-Glogower decay
//! in a truncated Fock space and to binary Glauber-Fock waveguide lattices.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common double-precision types.

// `!(x > 0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod fock;
pub mod identities;
pub mod lattice;
pub mod linalg;
pub mod lindblad;
pub mod random;
pub mod scalar;
pub mod special;
pub mod timeseries;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type ComplexMatrix = linalg::Matrix<f64>;
pub type ComplexMatrix32 = linalg::Matrix<f32>;
pub type StateVector = fock::StateVector<f64>;
pub type DensityMatrix = fock::DensityMatrix<f64>;
pub type TimeSeries = timeseries::TimeSeries<f64>;
pub type WaveFunction = lattice::WaveFunction<f64>;
