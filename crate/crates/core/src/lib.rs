//! Sparse graph Laplacian learning under a prescribed first eigenvector and
//! a capped eigen-gap, together with a small deterministic GCN lab for
//! measuring how the learned spectrum changes over-smoothing with depth.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral_core`]: dense symmetric matrices, extreme eigen-pairs, deflation.
//! * [`eigen_projection`]: the greedy eigen-pair projection onto matrices with a
//!   fixed last eigenvector and an eigen-gap of at most `kappa`.
//! * [`glasso`]: dual block coordinate descent for the graphical lasso,
//!   alternated with the projection; returns the Laplacian `L = C^-1`.
//! * [`graph_model`]: adjacency/degree/self-loop recovery and the augmented
//!   normalized GCN operator `P`.
//! * [`gcn_lab`]: forward pass, analytic backprop, Adam, DropEdge and the
//!   invariant-subspace distance measurements.
//! * [`pipeline`]: data ingestion, synthetic GMRF data, splitting, the
//!   `(kappa x layers)` sweep and the command implementations behind the CLI.
//!
//! Runnable walkthroughs live in `crates/core/examples/`.

pub mod eigen_projection;
pub mod error;
pub mod gcn_lab;
pub mod glasso;
pub mod graph_model;
pub mod pipeline;
pub mod spectral_core;

pub use error::{Error, Result};
pub use spectral_core::{EigenPair, SymMatrix, Vector};
