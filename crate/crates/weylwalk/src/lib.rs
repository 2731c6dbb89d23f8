//! Causal, translation-invariant quantum walks on d-dimensional lattices
//! with finite internal degrees of freedom: structural validation, the
//! continuum-limit Hamiltonian, canonicalization of 2-level limits to Weyl
//! form, and numerical verification of the discrete-to-continuum
//! convergence bounds.

pub mod canonical;
pub mod continuum;
pub mod error;
pub mod evolve;
pub mod io;
pub mod linalg;
pub mod packet;
pub mod walk;
pub mod zoo;

pub use canonical::{CanonicalForm, Handedness, PauliDecomposition};
pub use continuum::BMatrices;
pub use error::WalkError;
pub use evolve::{BoundReport, DispersionTable, NStepReport, ScalingFit, StudyConfig};
pub use packet::{PacketTrace, WavePacket};
pub use walk::{LatticeScale, MassDecomposition, ValidationReport, WalkSpec, DEFAULT_TOL};
