//! pivotlab: instrumentation for Gaussian elimination with partial pivoting
//! on random matrices.
//!
//! The crate factors dense matrices while recording exactly which
//! elimination steps moved a row, samples the random ensembles whose pivot
//! behavior has a closed-form law (uniform-permutation and butterfly
//! families among them), computes those laws exactly from Stirling numbers
//! of the first kind, and drives reproducible Monte Carlo experiments plus
//! spectral-density probes over the PL ensembles.

pub mod acceptance;
pub mod ensembles;
pub mod error;
pub mod esd;
pub mod experiments;
pub mod linalg;
pub mod matrix;
pub mod perm;
pub mod rng;
pub mod scalar;
pub mod stirling;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, Field};
pub use perm::{Permutation, PivotSequence};
pub use rng::RandomStream;

/// Crate version, embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
