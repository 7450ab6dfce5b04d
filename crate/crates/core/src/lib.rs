//! Optimization by randomized Hamiltonian flow.
//!
//! The crate is organised around a small set of pieces:
//!
//! * [`problems`]: objective oracles (quadratics with a known spectrum and
//!   ℓ₂-regularised logistic regression) and their seeded generators.
//! * [`rng`]: counter-based random streams used for every stochastic choice.
//! * [`hamiltonian`]: exact quadratic flow, leapfrog, and the idealised
//!   flow-based optimizers (fixed and exponentially distributed integration times).
//! * [`optimizers`]: the discrete methods (RHGD, its proximal variant RPHD,
//!   GD, Nesterov AGD, continuized AGD, and line-search adaptive variants)
//!   behind one step interface.
//! * [`analysis`]: convergence-bound curves, Lyapunov functions, and
//!   Monte Carlo verification checks.
//! * [`harness`]: JSON experiment configs, multi-seed execution, CSV output,
//!   stepsize grid search, and refresh-clock traces.

pub mod analysis;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod optimizers;
pub mod problems;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};

/// Dense real vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense real matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
