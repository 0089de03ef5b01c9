//! Symmetry operators `J_N` at bias `epsilon = 2 N beta`.

pub mod coeffs;
pub mod jsquare;
pub mod nullspace;
pub mod operator;
pub mod parity;
pub mod recurrence;

pub use coeffs::{closed_form_coeffs, lattice, CoeffTable, Element};
pub use jsquare::{jsquare_poly, jsquare_samples, jsquare_setup, JSquarePoly, JSquareSamples};
pub use nullspace::{nullspace_symmetry, NullspaceResult};
pub use operator::{assemble_j, assemble_q, min_cutoff, symmetry_operator, SymmetryOperator};
pub use parity::{label_states, parity_operator, Parity, ParityLabels};
pub use recurrence::{solve_recurrence, solve_recurrence_at_ratio, RecurrenceSolution};
