//! Cointegration analysis for multivariate stochastic delay differential
//! equations (MSDDEs): model classification through the characteristic
//! function, Granger-representation kernels, Lévy-driven path simulation,
//! the MCARMA(p, p−1) bridge and a discrete cointegrated-VAR oracle.

pub mod config;
pub mod error;
pub mod kernel;
pub mod levy;
pub mod linalg;
pub mod mcarma;
pub mod measure;
pub mod scalar;
pub mod spectral;
pub mod var;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Concrete `f64` instantiations of the core types.
pub type Measure = measure::SignedMatrixMeasure<f64>;
pub type Density = measure::Density<f64>;
