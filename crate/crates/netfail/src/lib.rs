//! Destruction scenarios for large networks.
//!
//! The crate models how damage spreads through a network and how to plan
//! against it:
//!
//! - [`cascade`]: deterministic cascade damage through powers of the
//!   adjacency matrix; min/max total-damage times.
//! - [`protection`]: spanning-tree planning — pick the tree whose own
//!   radius is maximal and protect its center; vertex-removal impact.
//! - [`markov`]: probabilistic damage as a continuous-time Markov chain,
//!   with an exact configuration-space chain and a stochastic SI
//!   simulation cross-checking each other.
//! - [`random_graph`]: Erdős–Rényi generation and the connectivity
//!   threshold experiment at p = c ln(n)/n.
//! - [`frontal`]: reliability reinforcement through a large random
//!   frontal layer between two input sets.
//! - [`spectral`]: the shared numeric kernels (Jacobi eigendecomposition,
//!   spectral powers, dominant eigenvalue, matrix exponential).
//!
//! All randomized routines take a master seed and derive deterministic
//! substreams per trial, so outputs are reproducible and independent of
//! thread count.

pub mod cascade;
pub mod error;
pub mod formats;
pub mod frontal;
pub mod graph;
pub mod markov;
pub mod matrix;
pub mod protection;
pub mod random_graph;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, VertexId};
