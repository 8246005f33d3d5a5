//! Symmetry-adapted exact diagonalization for `N` identical particles in a
//! one-dimensional trap with pairwise contact interactions `g δ(x_i - x_j)`.
//!
//! The pipeline runs bottom-up:
//!
//! * [`single_particle`] solves the one-body trap and supplies modes plus a
//!   quadrature rule,
//! * [`manybody`] builds the truncated product basis and `H(g) = H0 + g V`,
//! * [`symmetry`] provides `S_N` partitions, characters and isotypic
//!   projectors that block-diagonalize `H(g)`,
//! * [`spectrum`] diagonalizes the blocks, sweeps `g` and tracks levels,
//! * [`analysis`] holds spacing statistics, entanglement and time evolution,
//! * [`tps`] checks tensor-product structures induced by operator algebras.
//!
//! Units are `ħ = 1` with particle mass defaulting to 1.

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod manybody;
pub mod single_particle;
pub mod spectrum;
pub mod symmetry;
pub mod tps;

pub use error::{Error, Result};
