//! Exact-diagonalization toolkit for excitonic quantum cutting on
//! centrosymmetric multi-arm molecules.
//!
//! A donor molecule sandwiched between two identical acceptors can
//! downconvert one high-energy exciton into a pair of lower-energy excitons
//! whose angular momenta (EAM) are maximally entangled. This crate builds
//! the relevant tight-binding Hamiltonians (full arm sector, reduced
//! EAM-pair sector, effective two-level, acceptor chain), evolves states by
//! spectral decomposition, and computes the observables of interest:
//! EAM-resolved populations, selection-rule matrix elements, reduced
//! density operators, and von Neumann entanglement entropy.
//!
//! Units: ħ = 1, energies in a caller-chosen reference unit, times in its
//! inverse.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod observables;

pub use error::SimError;
pub use model::{ChainSpec, EamLabel, MoleculeSpec, TriadSpec};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SimError>;
