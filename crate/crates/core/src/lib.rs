//! Numerical controllability certificates for bilinear closed quantum systems
//! `H(u) = H0 + sum_l u_l H_l` driven by a static and a time-varying field.
//!
//! The crate is organised bottom-up:
//!
//! * [`herm`]: dense Hermitian algebra (eigendecomposition, brackets, propagators).
//! * [`lie`]: real Lie-algebra closure and rank-condition verdicts.
//! * [`system`]: the controlled Hamiltonian and its control region.
//! * [`scan`]: eigenvalue-surface scans, intersection search and classification.
//! * [`certify`]: machine-readable certificates built from the checks above.
//! * [`models`]: the counterexample, enantio-selective and driven Jaynes-Cummings systems.
//! * [`propagate`]: piecewise-constant propagation.

pub mod certify;
pub mod error;
pub mod herm;
pub mod lie;
pub mod models;
pub mod propagate;
pub mod report;
pub mod scan;
pub mod system;
pub mod tolerances;

pub use error::{Error, Result};
pub use herm::{CMatrix, HermitianOperator, SpectrumPoint, UnitaryOperator, C64};
pub use system::{ControlRegion, ControlledHamiltonian};
pub use tolerances::Tolerances;
