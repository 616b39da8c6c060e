//! Quantum Fisher information for phase estimation in a two-mode
//! Mach-Zehnder interferometer.
//!
//! The crate computes the 2x2 QFI matrix over the common and relative arm
//! phases `(phi+, phi-)` for a displaced-squeezed vacuum ⊗ coherent input,
//! along three independent routes:
//!
//! - [`closed_form`]: analytic moment formulas and the final QFI entries;
//! - [`qfi::qfi_generator_path`]: generator covariances in a truncated Fock space;
//! - [`qfi::qfi_finite_difference_path`]: derivative states of the simulated
//!   interferometer output.
//!
//! [`qfi::model_qfi`] reduces the matrix to the single-parameter QFIs of the
//! four parametrization models, and [`scan`] maximizes them over the phases
//! of the input amplitudes.

pub mod closed_form;
pub mod error;
pub mod fock;
pub mod optics;
pub mod qfi;
pub mod scan;
pub mod verify;

pub use error::{Error, Result, SizingAttempt};
pub use fock::{FockVector, Mode, PhotonCount, Truncation, TwoModeOperator, C64};
pub use optics::{InputSpec, PhasePair};
pub use qfi::{Basis, CramerRaoBound, JacobianSpec, ModelKind, QfiMatrix};
