//! Diagonalization, coupling sweeps and crossing detection.

pub mod banded;
pub mod crossings;
pub mod eigen;
pub mod sweep;

pub use crossings::{detect_crossings, CrossingEvent, CrossingKind};
pub use eigen::{eigensolve, lowest_eigenpairs, lowest_eigenvalues, Eigensystem};
pub use sweep::{linspace, sweep, track_branches, BiasMode, ScanSpec, SpectrumScan};
