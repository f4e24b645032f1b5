//! Upsampling state preparation for continuous and discrete probability
//! distributions.
//!
//! The pipeline is:
//!
//! 1. [`dist`] describes a density with support on the whole real line (or a
//!    vector of discrete probabilities) and evaluates its periodic image sums.
//! 2. [`grid`] maps the `2^n` basis indices of an `n`-qubit register onto a
//!    sampling window of width `w`.
//! 3. [`angles`] turns ratios of periodic sums into the `2^n - 1` rotation
//!    angles of a divide-and-conquer preparation circuit.
//! 4. [`circuit`] builds the sequential multiplexed-rotation circuit, lowers it
//!    to a small basis and exports it; [`forking`] rewrites it into the
//!    binary-tree form with a controlled-swap routing network.
//! 5. [`sim`] simulates circuits on a dense statevector and compares them with
//!    two independent amplitude oracles.
//!
//! Basis indices are little endian throughout: bit `m` of an index is the
//! state of qubit `q_m`, and `q_{n-1}` is the most significant qubit.

pub mod angles;
pub mod circuit;
pub mod dist;
mod error;
pub mod forking;
pub mod grid;
pub mod sim;

pub use error::{Error, Result};

/// Default relative tolerance for periodic image sums.
pub const DEFAULT_TOL: f64 = 1e-14;
