//! Cross-check of the analytic QFI matrix against the truncated Fock-space
//! simulation (generator route and finite-difference route).

use crate::closed_form::closed_form_qfi;
use crate::error::{Result, SizingAttempt};
use crate::fock::{Truncation, C64, DEFAULT_LEAK_TOL};
use crate::optics::{prepare_input_auto, prepare_input_fixed, PhasePair};
use crate::qfi::{Interferometer, QfiMatrix, DEFAULT_FD_STEP};

/// Largest admissible entrywise discrepancy between the three routes.
pub const VERIFY_TOLERANCE: f64 = 1e-5;

/// Oracle-feasible input range.
pub const MAX_VERIFY_ALPHA: f64 = 1.5;
pub const MAX_VERIFY_R: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Fixed square cutoff; `None` auto-sizes.
    pub levels: Option<usize>,
    pub leak_tol: f64,
    pub step: f64,
    pub at: PhasePair,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            levels: None,
            leak_tol: DEFAULT_LEAK_TOL,
            step: DEFAULT_FD_STEP,
            at: PhasePair::default(),
        }
    }
}

impl VerifyOptions {
    /// `max(1e-5, 10 step^2)`
    pub fn tolerance(&self) -> f64 {
        VERIFY_TOLERANCE.max(10.0 * self.step * self.step)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub closed_form: QfiMatrix,
    pub generator: QfiMatrix,
    pub finite_difference: QfiMatrix,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub trunc: Truncation,
    pub trace: Vec<SizingAttempt>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_discrepancy <= self.tolerance
    }
}

pub fn verify_point(alpha1: C64, r: f64, alpha2: C64, opts: &VerifyOptions) -> Result<VerifyReport> {
    let prepared = match opts.levels {
        Some(d) => prepare_input_fixed(alpha1, r, alpha2, d, opts.leak_tol)?,
        None => prepare_input_auto(alpha1, r, alpha2, opts.leak_tol)?,
    };
    let mzi = Interferometer::new(prepared.state)?;
    let closed_form = closed_form_qfi(alpha1, r, alpha2);
    let generator = mzi.qfi_generator()?;
    let finite_difference = mzi.qfi_finite_difference(opts.at, opts.step)?;
    let max_discrepancy = closed_form
        .max_abs_diff(&generator)
        .max(closed_form.max_abs_diff(&finite_difference))
        .max(generator.max_abs_diff(&finite_difference));
    Ok(VerifyReport {
        closed_form,
        generator,
        finite_difference,
        max_discrepancy,
        tolerance: opts.tolerance(),
        trunc: prepared.spec.trunc,
        trace: prepared.trace,
    })
}
