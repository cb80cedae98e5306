//! Desk-scale numerical simulator of quantum Krylov iteration algorithms.
//!
//! The crate simulates the quantum subroutines at the spectral/semantic level:
//! exact eigendecompositions stand in for Hamiltonian simulation, phase
//! estimation rounds eigenvalues onto an explicit t-bit grid, and measurement
//! outcomes are sampled from the exact outcome distributions. Every quantum
//! path is paired with an exact classical oracle so error bounds and success
//! probabilities can be checked, not just reported.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices/vectors and the spectral oracle layer
//! - [`qsim`]: phase estimation, amplitude estimation, swap test, postselected
//!   matrix-function states, fractional unitary powers
//! - [`lcu`]: the three schemes for preparing linear combinations of states
//! - [`stationary`]: the three quantum realizations of `x -> Ax + b`
//! - [`arnoldi`]: classical / direct-quantum / coefficient-recursion Arnoldi
//! - [`cg`]: conjugate gradient, coefficient recursions, Lanczos tridiagonal
//! - [`applications`]: triangle/polygon finding, quantum matrix multiply,
//!   shifted power iteration
//! - [`mmio`]: Matrix Market, vector and edge-list file formats
//! - [`report`]: experiment report rows shared with the CLI

pub mod applications;
pub mod arnoldi;
pub mod cg;
mod error;
pub mod instances;
pub mod lcu;
pub mod linalg;
pub mod mmio;
pub mod qsim;
pub mod report;
pub mod stationary;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SpectralDecomposition, Vector, C64};
pub use qsim::{QState, QueryCounters, Sim};
