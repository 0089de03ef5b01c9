//! Hidden symmetries of the biased two-photon quantum Rabi model.
//!
//! The crate builds the model in a truncated Fock space, constructs the
//! operators `J_N` that commute with the Hamiltonian whenever the bias is
//! `epsilon = 2 N beta`, and uses them to label spectra and classify level
//! crossings.

pub mod band;
pub mod checks;
pub mod cli;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod params;
pub mod spectrum;
pub mod symmetry;

pub use error::{Error, Result};
pub use params::{ModelParams, Sector};
