//! Stochastic calculus via regularization on a spectral truncation of a
//! separable Hilbert space.
//!
//! The crate simulates convolution-type (mild) processes driven by Q-Wiener
//! noise on a diagonal generator, computes the epsilon-regularized estimators
//! that define the calculus (forward integrals, covariations, scalar/tensor
//! quadratic variations, the dual-graph-norm `A(eps)` statistic, Young
//! integrals), and runs a batch of verification experiments (E1-E8) checking
//! the structural identities of that calculus against independent oracles.
//!
//! Everything is deterministic given a master seed: paths are derived from
//! `(master_seed, stream, path_index)` with a counter-based split, and all
//! Monte Carlo reductions run in fixed path order.

pub mod config;
pub mod convolution;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod grid;
pub mod noise;
pub mod report;
pub mod semigroup;
pub mod spectral;
pub mod testfn;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{EpsLadder, TimeGrid};
pub use semigroup::DiagonalGenerator;
pub use spectral::{OperatorDiagonal, SpectralVector, TensorElement};
