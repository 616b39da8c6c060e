//! Two-parameter QFI matrix over `(phi+, phi-)`, model reductions, and
//! reparametrization.

use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{expect_real, number_op, su2_generators, FockVector, PhotonCount, TwoModeOperator, C64};
use crate::optics::{beam_splitter, phase_shift, PhasePair};

/// Relative tolerance on `det F` for the positive-semidefinite check.
pub const PSD_TOL: f64 = 1e-9;

/// `F11` at or below this is treated as "no common-phase information".
pub const DEGENERATE_F11: f64 = 1e-12;

pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `(phi+, phi-)`
    PlusMinus,
    /// `(phi1, phi2)`
    Arm,
    Custom,
}

/// Symmetric 2x2 QFI matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiMatrix {
    pub f11: f64,
    pub f12: f64,
    pub f22: f64,
    pub basis: Basis,
}

impl QfiMatrix {
    /// Builds a matrix, rejecting anything that is not positive semidefinite
    /// within tolerance.
    pub fn new(f11: f64, f12: f64, f22: f64, basis: Basis) -> Result<Self> {
        let m = Self::new_unchecked(f11, f12, f22, basis);
        m.check_psd()?;
        Ok(m)
    }

    pub fn new_unchecked(f11: f64, f12: f64, f22: f64, basis: Basis) -> Self {
        Self { f11, f12, f22, basis }
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new_unchecked(0.0, 0.0, 0.0, basis)
    }

    pub fn det(&self) -> f64 {
        self.f11 * self.f22 - self.f12 * self.f12
    }

    pub fn check_psd(&self) -> Result<()> {
        let scale = 1f64.max(self.f11.abs() * self.f22.abs());
        let diag_tol = PSD_TOL * 1f64.max(self.f11.abs().max(self.f22.abs()));
        let finite = self.f11.is_finite() && self.f12.is_finite() && self.f22.is_finite();
        if !finite || self.f11 < -diag_tol || self.f22 < -diag_tol || self.det() < -PSD_TOL * scale {
            return Err(Error::NumericalQuality(format!(
                "QFI matrix not positive semidefinite: [[{}, {}], [{}, {}]]",
                self.f11, self.f12, self.f12, self.f22
            )));
        }
        Ok(())
    }

    /// `(F^-1)_22`, if `F` is invertible.
    pub fn inverse_22(&self) -> Option<f64> {
        let det = self.det();
        if det.abs() <= f64::EPSILON * 1f64.max(self.f11 * self.f22) {
            None
        } else {
            Some(self.f11 / det)
        }
    }

    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.f11, self.f12], [self.f12, self.f22]]
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &QfiMatrix) -> f64 {
        (self.f11 - other.f11)
            .abs()
            .max((self.f12 - other.f12).abs())
            .max((self.f22 - other.f22).abs())
    }
}

impl fmt::Display for QfiMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.12}, {:.12}], [{:.12}, {:.12}]]",
            self.f11, self.f12, self.f12, self.f22
        )
    }
}

/// Parametrization models of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Two-parameter model, common phase as nuisance.
    ANuisance,
    /// Antisymmetric phases, `phi+` fixed.
    BAntisymmetric,
    /// Phase only in the upper arm, `phi2` fixed.
    CUpperArm,
    /// Phase only in the lower arm, `phi1` fixed.
    DLowerArm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::ANuisance,
        ModelKind::BAntisymmetric,
        ModelKind::CUpperArm,
        ModelKind::DLowerArm,
    ];

    /// Lower-case panel letter, `a`..`d`.
    pub fn letter(self) -> &'static str {
        match self {
            ModelKind::ANuisance => "a",
            ModelKind::BAntisymmetric => "b",
            ModelKind::CUpperArm => "c",
            ModelKind::DLowerArm => "d",
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        match s {
            "a" => Some(ModelKind::ANuisance),
            "b" => Some(ModelKind::BAntisymmetric),
            "c" => Some(ModelKind::CUpperArm),
            "d" => Some(ModelKind::DLowerArm),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

/// Single-parameter QFI for one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelQfi {
    pub value: f64,
    /// Model A with `F11 = 0`: reported as `F22`.
    pub degenerate_nuisance: bool,
}

/// QFI about the relative phase under the given model, with the degenerate-nuisance flag.
pub fn evaluate_model(f: &QfiMatrix, model: ModelKind) -> Result<ModelQfi> {
    f.check_psd()?;
    let plain = |value| ModelQfi {
        value,
        degenerate_nuisance: false,
    };
    Ok(match model {
        ModelKind::ANuisance => {
            if f.f11 <= DEGENERATE_F11 {
                if f.f12.abs() > PSD_TOL {
                    return Err(Error::DegenerateNuisance { f12: f.f12 });
                }
                ModelQfi {
                    value: f.f22,
                    degenerate_nuisance: true,
                }
            } else {
                plain(f.f22 - f.f12 * f.f12 / f.f11)
            }
        }
        ModelKind::BAntisymmetric => plain(f.f22),
        ModelKind::CUpperArm => plain(f.f11 + 2.0 * f.f12 + f.f22),
        ModelKind::DLowerArm => plain(f.f11 - 2.0 * f.f12 + f.f22),
    })
}

pub fn model_qfi(f: &QfiMatrix, model: ModelKind) -> Result<f64> {
    evaluate_model(f, model).map(|m| m.value)
}

/// `d(phi+, phi-) / d(f, g)` for a reparametrization to new parameters `(f, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianSpec {
    j: [[f64; 2]; 2],
    labels: (String, String),
    target: Basis,
}

impl JacobianSpec {
    pub fn new(j: [[f64; 2]; 2], labels: (String, String)) -> Result<Self> {
        Self::tagged(j, labels, Basis::Custom)
    }

    fn tagged(j: [[f64; 2]; 2], labels: (String, String), target: Basis) -> Result<Self> {
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.is_nan() || det.abs() <= 1e-12 {
            return Err(Error::SingularJacobian { det });
        }
        Ok(Self { j, labels, target })
    }

    pub fn identity() -> Self {
        Self::tagged(
            [[1.0, 0.0], [0.0, 1.0]],
            ("phi+".into(), "phi-".into()),
            Basis::PlusMinus,
        )
        .expect("identity is invertible")
    }

    /// `phi+ = phi1 + phi2`, `phi- = phi1 - phi2`.
    pub fn arm() -> Self {
        Self::tagged(
            [[1.0, 1.0], [1.0, -1.0]],
            ("phi1".into(), "phi2".into()),
            Basis::Arm,
        )
        .expect("arm jacobian is invertible")
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.j
    }

    pub fn labels(&self) -> (&str, &str) {
        (&self.labels.0, &self.labels.1)
    }

    pub fn det(&self) -> f64 {
        self.j[0][0] * self.j[1][1] - self.j[0][1] * self.j[1][0]
    }
}

/// `J^T F J`
pub fn reparametrize(f: &QfiMatrix, jac: &JacobianSpec) -> QfiMatrix {
    let j = jac.j;
    let m = f.as_array();
    let entry = |a: usize, b: usize| {
        let mut acc = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                acc += j[k][a] * m[k][l] * j[l][b];
            }
        }
        acc
    };
    QfiMatrix::new_unchecked(entry(0, 0), entry(0, 1), entry(1, 1), jac.target)
}

/// QFI about the free parameter when the other one is held constant.
pub fn constrained_qfi(f: &QfiMatrix, jac: &JacobianSpec, free_index: usize) -> Result<f64> {
    let t = reparametrize(f, jac);
    match free_index {
        1 => Ok(t.f11),
        2 => Ok(t.f22),
        other => Err(Error::InvalidInput(format!("free_index must be 1 or 2, got {other}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CramerRaoBound {
    pub variance_lower_bound: f64,
    pub repetitions: u64,
}

/// `Var >= 1 / (nu F)`
pub fn crb(qfi_scalar: f64, repetitions: u64) -> Result<CramerRaoBound> {
    if repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be >= 1".into()));
    }
    if qfi_scalar.is_nan() || qfi_scalar <= 0.0 {
        return Err(Error::NoInformation(qfi_scalar));
    }
    Ok(CramerRaoBound {
        variance_lower_bound: 1.0 / (repetitions as f64 * qfi_scalar),
        repetitions,
    })
}

/// `4 Cov(g+, g-)` on `state`; both generators must be Hermitian.
pub fn generator_covariance(state: &FockVector, g_plus: &TwoModeOperator, g_minus: &TwoModeOperator) -> Result<QfiMatrix> {
    state.check_normalized()?;
    let mean_p = expect_real(state, g_plus)?;
    let mean_m = expect_real(state, g_minus)?;
    let pp = expect_real(state, &g_plus.compose(g_plus)?.into_hermitian()?)?;
    let mm = expect_real(state, &g_minus.compose(g_minus)?.into_hermitian()?)?;
    // Symmetrized cross moment <{g+, g-}>/2 = Re <g+ g->.
    let pm = crate::fock::expect(state, &g_plus.compose(g_minus)?)?.re;
    QfiMatrix::new(
        4.0 * (pp - mean_p * mean_p),
        4.0 * (pm - mean_p * mean_m),
        4.0 * (mm - mean_m * mean_m),
        Basis::PlusMinus,
    )
}

/// Generator route. After `pre_unitary` the arm phases act as
/// `exp(-i phi+ N/2) exp(-i phi- J3)`, so the QFI is four times the
/// covariance of `(N/2, J3)` in the state `pre_unitary |input>`.
pub fn qfi_generator_path(input: &FockVector, pre_unitary: &TwoModeOperator) -> Result<QfiMatrix> {
    input.check_normalized()?;
    let trunc = *input.trunc();
    let rotated = pre_unitary.apply(input)?;
    let half_n = number_op(PhotonCount::Total, trunc).scale(C64::new(0.5, 0.0));
    let (_, _, j3) = su2_generators(trunc);
    generator_covariance(&rotated, &half_n, &j3)
}

/// The full interferometer `U_BS† U(phi1, phi2) U_BS |psi0>` with the beam
/// splitters built once.
#[derive(Debug, Clone)]
pub struct Interferometer {
    input: FockVector,
    bs: TwoModeOperator,
    bs_dagger: TwoModeOperator,
    /// `U_BS |psi0>`, shared by every phase setting.
    after_first: FockVector,
}

impl Interferometer {
    pub fn new(input: FockVector) -> Result<Self> {
        input.check_normalized()?;
        let trunc = *input.trunc();
        let bs = beam_splitter(trunc, false);
        let bs_dagger = beam_splitter(trunc, true);
        let after_first = bs.apply(&input)?;
        Ok(Self {
            input,
            bs,
            bs_dagger,
            after_first,
        })
    }

    pub fn input(&self) -> &FockVector {
        &self.input
    }

    /// First beam splitter, the conjugating unitary for [`qfi_generator_path`].
    pub fn beam_splitter(&self) -> &TwoModeOperator {
        &self.bs
    }

    pub fn output(&self, phases: PhasePair) -> Result<FockVector> {
        let shifted = phase_shift(phases, *self.input.trunc()).apply(&self.after_first)?;
        self.bs_dagger.apply(&shifted)
    }

    pub fn qfi_generator(&self) -> Result<QfiMatrix> {
        qfi_generator_path(&self.input, &self.bs)
    }

    pub fn qfi_finite_difference(&self, at: PhasePair, step: f64) -> Result<QfiMatrix> {
        qfi_finite_difference_path(&|p| self.output(p), at, step)
    }
}

/// Finite-difference route: central differences of the output state along
/// `phi+` and `phi-`, inserted into the pure-state QFI formula.
pub fn qfi_finite_difference_path(
    pipeline: &dyn Fn(PhasePair) -> Result<FockVector>,
    at: PhasePair,
    step: f64,
) -> Result<QfiMatrix> {
    if !(1e-6..=1e-2).contains(&step) {
        return Err(Error::InvalidStep(step));
    }
    let psi = pipeline(at)?;
    psi.check_normalized()?;
    let (plus, minus) = (at.plus(), at.minus());
    let derivative = |dp: f64, dm: f64| -> Result<DVector<C64>> {
        let fwd = pipeline(PhasePair::from_sum_difference(plus + dp, minus + dm))?;
        let bwd = pipeline(PhasePair::from_sum_difference(plus - dp, minus - dm))?;
        Ok((fwd.amps() - bwd.amps()) / C64::new(2.0 * step, 0.0))
    };
    let d_plus = derivative(step, 0.0)?;
    let d_minus = derivative(0.0, step)?;
    let v = psi.amps();
    let entry = |dj: &DVector<C64>, dk: &DVector<C64>| {
        let overlap = dj.dotc(dk);
        let proj = dj.dotc(v) * v.dotc(dk);
        4.0 * (overlap - proj).re
    };
    QfiMatrix::new(
        entry(&d_plus, &d_plus),
        entry(&d_plus, &d_minus),
        entry(&d_minus, &d_minus),
        Basis::PlusMinus,
    )
}
