//! Which pure n-qubit states are fixed by their (n−1)-qubit reduced density
//! matrices?
//!
//! Exactly those that are not local-unitary equivalent to a generalized GHZ
//! state `α|0⋯0⟩ + β|1⋯1⟩` (αβ ≠ 0). This crate decides the question for a
//! given state, produces witnesses (GHZ certificates, sibling states sharing
//! every marginal, local stabilizer subalgebras), reconstructs states from
//! their marginal panels, and carries an independent brute-force oracle.
//!
//! Conventions: qubits are labelled `1..=n`; qubit 1 is the most significant
//! bit of the amplitude index.

pub mod density;
pub mod error;
pub mod ghz;
pub mod ket;
pub mod linalg;
pub mod optim;
pub mod oracle;
pub mod panel;
pub mod reconstruct;
pub mod schmidt;
pub mod stabilizer;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use ghz::{classify, Classification, GhzCertificate, Verdict};
pub use ket::{apply_local, equal_up_to_phase, tensor_insert, Ket, MultiIndex, SingleQubitUnitary};
pub use linalg::{spectral_decompose, Spectrum};
pub use panel::{panel_of_mixed, panel_of_pure, panels_equal, subset_equal, RdmPanel, DEFAULT_TOL};
pub use reconstruct::{reconstruct, Outcome, ReconstructionResult};
pub use schmidt::{schmidt_split, SchmidtSplit};
pub use stabilizer::{stabilizer_subalgebra, AlgebraElement, StabilizerBasis};

pub use num_complex::Complex64 as C64;
