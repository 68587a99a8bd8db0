//! Thermal locality toolkit for spin and fermionic lattice models.
//!
//! The crate evaluates thermal (Gibbs) states of local Hamiltonians on finite
//! interaction hypergraphs and verifies, at exact-diagonalization scale, the
//! machinery that controls how local those states are: the generalized
//! covariance and its exact perturbation/truncation formulas, exponential
//! clustering above a universal critical temperature, lattice-animal growth
//! bounds, and truncated cluster expansions with rigorous tail accounting.

pub mod bounds;
pub mod cluster;
pub mod config;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod opalg;
pub mod quad;
pub mod runner;
pub mod thermal;

pub use error::{Error, Result};
