//! Analysis of local spectral expansion for weighted simplicial complexes:
//! exact link spectra, partite dependency structure, trickle-down condition
//! checking, and certificate synthesis/verification.

pub mod complex;
pub mod error;
pub mod json;
pub mod partite;
pub mod spectra;
pub mod trickledown;
pub mod zoo;

pub use complex::{Face, FaceDistribution, TypeSet, WeightedComplex};
pub use error::{Error, Result};
