//! Nonclassicality and quadrature metrological power of single-mode bosonic states.

pub mod channels;
pub mod error;
pub mod fock;
pub mod format;
pub mod linalg;
pub mod measures;
pub mod rank2;
pub mod roof;
pub mod roots;
pub mod spec;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, Decomposition, StateVector};
pub use num_complex::Complex64 as C64;
