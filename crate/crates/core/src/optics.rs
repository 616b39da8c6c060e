//! Optical elements and input-state preparation.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result, SizingAttempt};
use crate::fock::{
    ladder, number_op, su2_generators, FockVector, Mode, PhotonCount, Truncation, TwoModeOperator,
    C64,
};

/// Largest per-mode cutoff the auto-sizing loop will try.
pub const MAX_AUTO_LEVELS: usize = 512;

/// Displaced-squeezed vacuum in mode one, coherent state in mode two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSpec {
    pub alpha1: C64,
    pub r: f64,
    pub alpha2: C64,
    pub trunc: Truncation,
}

impl InputSpec {
    pub fn new(alpha1: C64, r: f64, alpha2: C64, trunc: Truncation) -> Result<Self> {
        validate_params(alpha1, r, alpha2)?;
        Ok(Self {
            alpha1,
            r,
            alpha2,
            trunc,
        })
    }

    /// Uses the starting truncation of the auto-sizing heuristic.
    pub fn with_initial_truncation(alpha1: C64, r: f64, alpha2: C64, leak_tol: f64) -> Result<Self> {
        validate_params(alpha1, r, alpha2)?;
        let d = initial_levels(alpha1, r).max(initial_levels(alpha2, 0.0));
        Self::new(alpha1, r, alpha2, Truncation::new(d, d, leak_tol)?)
    }

    /// Mean photon number of the displacement in mode one.
    pub fn n1(&self) -> f64 {
        self.alpha1.norm_sqr()
    }

    pub fn n2(&self) -> f64 {
        self.alpha2.norm_sqr()
    }

    /// Mean photon number of the squeezed vacuum, `sinh^2 r`.
    pub fn n_s(&self) -> f64 {
        self.r.sinh().powi(2)
    }
}

pub(crate) fn validate_params(alpha1: C64, r: f64, alpha2: C64) -> Result<()> {
    if !(alpha1.re.is_finite() && alpha1.im.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha1 is not finite: {alpha1}")));
    }
    if !(alpha2.re.is_finite() && alpha2.im.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha2 is not finite: {alpha2}")));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidInput(format!("squeeze parameter r must be finite and >= 0, got {r}")));
    }
    Ok(())
}

/// Arm phases `(phi1, phi2)` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePair {
    pub phi1: f64,
    pub phi2: f64,
}

impl PhasePair {
    pub fn new(phi1: f64, phi2: f64) -> Self {
        Self { phi1, phi2 }
    }

    pub fn from_sum_difference(plus: f64, minus: f64) -> Self {
        Self {
            phi1: (plus + minus) / 2.0,
            phi2: (plus - minus) / 2.0,
        }
    }

    pub fn plus(&self) -> f64 {
        self.phi1 + self.phi2
    }

    pub fn minus(&self) -> f64 {
        self.phi1 - self.phi2
    }
}

/// `exp(scale · G)` for Hermitian `G`, by eigendecomposition of each block.
pub fn hermitian_expm(generator: &TwoModeOperator, scale: C64) -> Result<TwoModeOperator> {
    if !generator.hermitian_hint() {
        return Err(Error::NotHermitian {
            deviation: f64::NAN,
        });
    }
    let block_expm = |block: &DMatrix<C64>| {
        let eig = SymmetricEigen::new(block.clone());
        let phases = eig.eigenvalues.map(|lambda| (scale * lambda).exp());
        let v = &eig.eigenvectors;
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        scaled * v.adjoint()
    };
    // Diagonal entries of a Hermitian operator are real.
    let diag_expm = |z: C64| (scale * z.re).exp();
    Ok(generator.map_hermitian_blocks(block_expm, diag_expm, scale.im == 0.0))
}

fn single_mode_expm(mode: Mode, generator: DMatrix<C64>, scale: C64, trunc: Truncation) -> Result<TwoModeOperator> {
    let g = TwoModeOperator::local(mode, generator, trunc, true)?;
    hermitian_expm(&g, scale)
}

/// `D(alpha) = exp(alpha a† - alpha* a)` on one mode.
pub fn displacement(mode: Mode, alpha: C64, trunc: Truncation) -> Result<TwoModeOperator> {
    let a = ladder(trunc.levels(mode));
    // i(alpha a† - alpha* a) is Hermitian; D = exp(-i · that).
    let i = C64::new(0.0, 1.0);
    let g = (a.adjoint() * alpha - &a * alpha.conj()) * i;
    single_mode_expm(mode, g, -i, trunc)
}

/// `S(r) = exp(r (a^2 - a†^2) / 2)` on one mode, zero squeeze angle.
pub fn squeeze(mode: Mode, r: f64, trunc: Truncation) -> Result<TwoModeOperator> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidInput(format!("squeeze parameter r must be >= 0, got {r}")));
    }
    let a = ladder(trunc.levels(mode));
    let a2 = &a * &a;
    let i = C64::new(0.0, 1.0);
    let g = (&a2 - a2.adjoint()) * (i * r / 2.0);
    single_mode_expm(mode, g, -i, trunc)
}

/// 50:50 beam splitter `exp(-i pi (a1† a2 + a2† a1) / 4)`, or its adjoint.
pub fn beam_splitter(trunc: Truncation, dagger: bool) -> TwoModeOperator {
    let (j1, _, _) = su2_generators(trunc);
    // a1† a2 + a2† a1 = 2 J1
    let sign = if dagger { 1.0 } else { -1.0 };
    hermitian_expm(&j1, C64::new(0.0, sign * std::f64::consts::PI / 2.0))
        .expect("J1 is Hermitian by construction")
}

/// `exp(-i phi1 a1† a1 - i phi2 a2† a2)`
pub fn phase_shift(pair: PhasePair, trunc: Truncation) -> TwoModeOperator {
    let n1 = number_op(PhotonCount::Mode(Mode::One), trunc);
    let n2 = number_op(PhotonCount::Mode(Mode::Two), trunc);
    let g = n1
        .scale(C64::new(pair.phi1, 0.0))
        .add(&n2.scale(C64::new(pair.phi2, 0.0)))
        .expect("same truncation");
    hermitian_expm(&g, C64::new(0.0, -1.0)).expect("diagonal real generator")
}

/// The same phase shift built as `exp(-i phi+ N / 2) · exp(-i phi- (a1† a1 - a2† a2) / 2)`.
pub fn phase_shift_factored(pair: PhasePair, trunc: Truncation) -> TwoModeOperator {
    let n = number_op(PhotonCount::Total, trunc);
    let (_, _, j3) = su2_generators(trunc);
    let common = hermitian_expm(&n, C64::new(0.0, -pair.plus() / 2.0)).expect("diagonal");
    // (a1† a1 - a2† a2) / 2 = J3
    let relative = hermitian_expm(&j3, C64::new(0.0, -pair.minus())).expect("diagonal");
    common.compose(&relative).expect("same truncation")
}

/// `|psi0> = D(alpha1) S(r)|0> ⊗ D(alpha2)|0>`; the leakage guard runs after each step.
pub fn prepare_input(spec: &InputSpec) -> Result<FockVector> {
    let trunc = spec.trunc;
    let steps = [
        squeeze(Mode::One, spec.r, trunc)?,
        displacement(Mode::One, spec.alpha1, trunc)?,
        displacement(Mode::Two, spec.alpha2, trunc)?,
    ];
    let mut state = FockVector::vacuum(trunc);
    for op in &steps {
        state = op.apply(&state)?;
        if let Err(err) = state.check_leakage() {
            return Err(attach_attempt(err, &state));
        }
    }
    Ok(state)
}

fn attach_attempt(err: Error, state: &FockVector) -> Error {
    match err {
        Error::TruncationTooSmall {
            d1,
            d2,
            edge_weight,
            leak_tol,
            ..
        } => Error::TruncationTooSmall {
            d1,
            d2,
            edge_weight,
            leak_tol,
            trace: vec![SizingAttempt {
                d1,
                d2,
                edge_weight: state.edge_weight(),
            }],
        },
        other => other,
    }
}

/// Starting cutoff of the auto-sizing heuristic: `ceil((|alpha| + 4)^2 e^{2r})`.
pub fn initial_levels(alpha: C64, r: f64) -> usize {
    let d = ((alpha.norm() + 4.0).powi(2) * (2.0 * r).exp()).ceil();
    (d as usize).max(2)
}

/// An input state together with the truncation that was needed to hold it.
#[derive(Debug, Clone)]
pub struct PreparedInput {
    pub spec: InputSpec,
    pub state: FockVector,
    pub trace: Vec<SizingAttempt>,
}

/// Prepares the input state, doubling a square truncation from the heuristic
/// start until the leakage guard passes.
pub fn prepare_input_auto(alpha1: C64, r: f64, alpha2: C64, leak_tol: f64) -> Result<PreparedInput> {
    let mut spec = InputSpec::with_initial_truncation(alpha1, r, alpha2, leak_tol)?;
    let mut trace = Vec::new();
    loop {
        match prepare_input(&spec) {
            Ok(state) => {
                trace.push(SizingAttempt {
                    d1: spec.trunc.d1(),
                    d2: spec.trunc.d2(),
                    edge_weight: state.edge_weight(),
                });
                return Ok(PreparedInput { spec, state, trace });
            }
            Err(Error::TruncationTooSmall {
                d1,
                d2,
                edge_weight,
                leak_tol,
                trace: attempt,
            }) => {
                trace.extend(attempt);
                let next = 2 * d1.max(d2);
                if next > MAX_AUTO_LEVELS {
                    return Err(Error::TruncationTooSmall {
                        d1,
                        d2,
                        edge_weight,
                        leak_tol,
                        trace,
                    });
                }
                spec.trunc = Truncation::new(next, next, leak_tol)?;
            }
            Err(other) => return Err(other),
        }
    }
}

/// Prepares with a fixed square truncation (no doubling).
pub fn prepare_input_fixed(alpha1: C64, r: f64, alpha2: C64, levels: usize, leak_tol: f64) -> Result<PreparedInput> {
    let spec = InputSpec::new(alpha1, r, alpha2, Truncation::new(levels, levels, leak_tol)?)?;
    let state = prepare_input(&spec)?;
    let trace = vec![SizingAttempt {
        d1: levels,
        d2: levels,
        edge_weight: state.edge_weight(),
    }];
    Ok(PreparedInput { spec, state, trace })
}
