//! Covariance-matrix simulator for two linearly x-x coupled quantum harmonic
//! oscillators.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: fixed-size matrix exponential, matrix quadrature and an RK4
//!   integrator.
//! * [`model`]: the Hamiltonian matrix, normal-mode spectrum, critical coupling,
//!   the diagonalizing symplectic transform and the classical Hookian reduction.
//! * [`states`]: Gaussian two-mode covariance matrices and their entanglement
//!   functionals (log-negativity, seralian, purity).
//! * [`dynamics`]: unitary and Lindblad covariance propagation, the resonant
//!   Mach-Zehnder factorization, entanglement trajectories and death times.
//! * [`cli`]: run configuration, presets, sweeps and CSV/JSON output.
//!
//! All phase-space vectors use the mode-wise ordering `(x1, p1, x2, p2)`.
//! Covariances use the vacuum normalization `sigma_vac = I/2`.

// Guards are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod numerics;
pub mod states;

pub use error::{Error, Result};
