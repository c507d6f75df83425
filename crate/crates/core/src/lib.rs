//! Stoquastization of Hamiltonians and signed graphs, with the spectral,
//! dynamical and combinatorial tools used to compare a Hamiltonian against
//! its stoquastic counterparts.

pub mod anneal;
pub mod ensembles;
pub mod error;
pub mod krylov;
pub mod matrix;
pub mod pauli;
pub mod sector;
pub mod signed_graph;
pub mod spectra;
pub mod stoquastize;

pub use error::{Error, Result};
pub use matrix::{is_stoquastic, HermitianMatrix, C64};
pub use pauli::{Pauli, PauliHamiltonian, PauliString};
pub use sector::{parity_project, Parity, ParitySector};
