//! Numerical free probability around the free product of two copies of
//! `(M_2, tr/2)`: S-transforms, Brown measures of R-diagonal operators,
//! random-matrix realizations, regularized log-determinant fields and
//! finite-dimensional transitivity tests.

pub mod algstruct;
pub mod brownfield;
pub mod config;
mod cplx;
pub mod io;
pub mod error;
pub mod linalg;
pub mod matmodel;
pub mod measures;
pub mod rdiagonal;
pub mod rng;
pub mod stats;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use faer::c64;
pub use linalg::CMat;
