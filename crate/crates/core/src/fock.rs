//! Truncated two-mode Fock space.
//!
//! Basis states `|n1, n2>` are flattened row-major: `index = n1 * d2 + n2`.
//! Operators keep whatever structure they were built with (diagonal, acting
//! on a single mode, or block-diagonal in the total photon number) and only
//! fall back to a dense `(d1 d2) x (d1 d2)` matrix when two structures mix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const DEFAULT_LEAK_TOL: f64 = 1e-8;

/// Relative tolerance for the Hermiticity check on operators that claim it.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
}

/// Which photon number a diagonal number operator counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonCount {
    Mode(Mode),
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    d1: usize,
    d2: usize,
    leak_tol: f64,
}

impl Truncation {
    pub fn new(d1: usize, d2: usize, leak_tol: f64) -> Result<Self> {
        if d1 < 2 || d2 < 2 {
            return Err(Error::InvalidTruncation(format!(
                "need d1 >= 2 and d2 >= 2, got d1={d1}, d2={d2}"
            )));
        }
        if !(leak_tol > 0.0 && leak_tol < 1.0) {
            return Err(Error::InvalidTruncation(format!(
                "leak_tol must lie in (0, 1), got {leak_tol}"
            )));
        }
        Ok(Self { d1, d2, leak_tol })
    }

    /// Square truncation with the default leakage tolerance.
    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d, DEFAULT_LEAK_TOL)
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn leak_tol(&self) -> f64 {
        self.leak_tol
    }

    pub fn levels(&self, mode: Mode) -> usize {
        match mode {
            Mode::One => self.d1,
            Mode::Two => self.d2,
        }
    }

    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }

    /// Same shape, ignoring the leakage tolerance.
    pub fn same_shape(&self, other: &Truncation) -> bool {
        self.d1 == other.d1 && self.d2 == other.d2
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 < self.d1 && n2 < self.d2);
        n1 * self.d2 + n2
    }

    pub fn levels_of(&self, index: usize) -> (usize, usize) {
        (index / self.d2, index % self.d2)
    }

    /// Largest total photon number present in the truncated space.
    pub fn max_shell(&self) -> usize {
        self.d1 + self.d2 - 2
    }

    /// Flat indices of the basis states with `n1 + n2 = n`, ordered by ascending `n1`.
    pub fn shell_indices(&self, n: usize) -> Vec<usize> {
        let lo = n.saturating_sub(self.d2 - 1);
        let hi = n.min(self.d1 - 1);
        if lo > hi {
            return Vec::new();
        }
        (lo..=hi).map(|n1| self.index(n1, n - n1)).collect()
    }

    /// States away from the truncation edge: `n1 + n2 <= min(d1, d2) - 2`.
    pub fn is_interior(&self, n1: usize, n2: usize) -> bool {
        n1 + n2 + 2 <= self.d1.min(self.d2)
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let (n1, n2) = self.levels_of(i);
                self.is_interior(n1, n2)
            })
            .collect()
    }

    fn check_same(&self, other: &Truncation) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.d1, self.d2),
                found: format!("{}x{}", other.d1, other.d2),
            })
        }
    }
}

/// Flat index of `|n1, n2>`.
pub fn tensor_basis_index(trunc: &Truncation, n1: usize, n2: usize) -> Result<usize> {
    if n1 >= trunc.d1 || n2 >= trunc.d2 {
        return Err(Error::DimensionMismatch {
            expected: format!("levels below {}x{}", trunc.d1, trunc.d2),
            found: format!("({n1}, {n2})"),
        });
    }
    Ok(trunc.index(n1, n2))
}

/// Pure two-mode state as amplitudes over the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: DVector<C64>,
    trunc: Truncation,
}

impl FockVector {
    pub fn vacuum(trunc: Truncation) -> Self {
        Self::basis(trunc, 0, 0)
    }

    pub fn basis(trunc: Truncation, n1: usize, n2: usize) -> Self {
        let mut amps = DVector::zeros(trunc.dim());
        amps[trunc.index(n1, n2)] = C64::new(1.0, 0.0);
        Self { amps, trunc }
    }

    pub fn from_amps(trunc: Truncation, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != trunc.dim() {
            return Err(Error::DimensionMismatch {
                expected: trunc.dim().to_string(),
                found: amps.len().to_string(),
            });
        }
        Ok(Self { amps, trunc })
    }

    /// `psi1 ⊗ psi2` from single-mode amplitude lists.
    pub fn product(trunc: Truncation, psi1: &[C64], psi2: &[C64]) -> Result<Self> {
        if psi1.len() != trunc.d1 || psi2.len() != trunc.d2 {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", trunc.d1, trunc.d2),
                found: format!("{}x{}", psi1.len(), psi2.len()),
            });
        }
        let amps = DVector::from_fn(trunc.dim(), |i, _| {
            let (n1, n2) = trunc.levels_of(i);
            psi1[n1] * psi2[n2]
        });
        Ok(Self { amps, trunc })
    }

    pub fn trunc(&self) -> &Truncation {
        &self.trunc
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amp(&self, n1: usize, n2: usize) -> C64 {
        self.amps[self.trunc.index(n1, n2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        self.trunc.check_same(&other.trunc)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// Probability weight on states outside the interior shells.
    pub fn edge_weight(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let (n1, n2) = self.trunc.levels_of(*i);
                !self.trunc.is_interior(n1, n2)
            })
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > self.trunc.leak_tol {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(())
    }

    /// Leakage guard applied after every preparation step.
    pub(crate) fn check_leakage(&self) -> Result<()> {
        self.check_normalized()?;
        let edge_weight = self.edge_weight();
        if edge_weight > self.trunc.leak_tol {
            return Err(Error::TruncationTooSmall {
                d1: self.trunc.d1,
                d2: self.trunc.d2,
                edge_weight,
                leak_tol: self.trunc.leak_tol,
                trace: Vec::new(),
            });
        }
        Ok(())
    }
}

pub fn inner(u: &FockVector, v: &FockVector) -> Result<C64> {
    u.inner(v)
}

pub fn norm(state: &FockVector) -> f64 {
    state.norm()
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(DMatrix<C64>),
    Diagonal(DVector<C64>),
    /// `block ⊗ I` (mode one) or `I ⊗ block` (mode two).
    Local { mode: Mode, block: DMatrix<C64> },
    /// Block-diagonal in `n1 + n2`; entry `n` acts on `Truncation::shell_indices(n)`.
    Shells(Vec<DMatrix<C64>>),
}

/// Linear operator on the truncated two-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    repr: Repr,
    trunc: Truncation,
    hermitian_hint: bool,
}

impl TwoModeOperator {
    fn build(repr: Repr, trunc: Truncation, hermitian_hint: bool) -> Result<Self> {
        let op = Self {
            repr,
            trunc,
            hermitian_hint,
        };
        if hermitian_hint {
            let deviation = op.sub_unchecked(&op.adjoint()).max_abs();
            if deviation > HERMITIAN_TOL * op.max_abs() {
                return Err(Error::NotHermitian { deviation });
            }
        }
        Ok(op)
    }

    pub fn dense(mat: DMatrix<C64>, trunc: Truncation, hermitian_hint: bool) -> Result<Self> {
        let dim = trunc.dim();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{dim}x{dim}"),
                found: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        Self::build(Repr::Dense(mat), trunc, hermitian_hint)
    }

    pub fn diagonal(diag: DVector<C64>, trunc: Truncation, hermitian_hint: bool) -> Result<Self> {
        if diag.len() != trunc.dim() {
            return Err(Error::DimensionMismatch {
                expected: trunc.dim().to_string(),
                found: diag.len().to_string(),
            });
        }
        Self::build(Repr::Diagonal(diag), trunc, hermitian_hint)
    }

    /// Single-mode operator lifted to the two-mode space.
    pub fn local(
        mode: Mode,
        block: DMatrix<C64>,
        trunc: Truncation,
        hermitian_hint: bool,
    ) -> Result<Self> {
        let d = trunc.levels(mode);
        if block.nrows() != d || block.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                found: format!("{}x{}", block.nrows(), block.ncols()),
            });
        }
        Self::build(Repr::Local { mode, block }, trunc, hermitian_hint)
    }

    /// Photon-number conserving operator from one block per total photon number.
    pub fn shells(blocks: Vec<DMatrix<C64>>, trunc: Truncation, hermitian_hint: bool) -> Result<Self> {
        if blocks.len() != trunc.max_shell() + 1 {
            return Err(Error::DimensionMismatch {
                expected: format!("{} shells", trunc.max_shell() + 1),
                found: format!("{} shells", blocks.len()),
            });
        }
        for (n, block) in blocks.iter().enumerate() {
            let size = trunc.shell_indices(n).len();
            if block.nrows() != size || block.ncols() != size {
                return Err(Error::DimensionMismatch {
                    expected: format!("shell {n}: {size}x{size}"),
                    found: format!("{}x{}", block.nrows(), block.ncols()),
                });
            }
        }
        Self::build(Repr::Shells(blocks), trunc, hermitian_hint)
    }

    pub fn identity(trunc: Truncation) -> Self {
        Self {
            repr: Repr::Diagonal(DVector::from_element(trunc.dim(), C64::new(1.0, 0.0))),
            trunc,
            hermitian_hint: true,
        }
    }

    pub fn trunc(&self) -> &Truncation {
        &self.trunc
    }

    pub fn dim(&self) -> usize {
        self.trunc.dim()
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let t = &self.trunc;
        let dim = t.dim();
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            Repr::Diagonal(d) => DMatrix::from_diagonal(d),
            Repr::Local { mode, block } => DMatrix::from_fn(dim, dim, |i, j| {
                let (i1, i2) = t.levels_of(i);
                let (j1, j2) = t.levels_of(j);
                match mode {
                    Mode::One if i2 == j2 => block[(i1, j1)],
                    Mode::Two if i1 == j1 => block[(i2, j2)],
                    _ => C64::new(0.0, 0.0),
                }
            }),
            Repr::Shells(blocks) => {
                let mut m = DMatrix::zeros(dim, dim);
                for (n, block) in blocks.iter().enumerate() {
                    let idx = t.shell_indices(n);
                    for (a, &i) in idx.iter().enumerate() {
                        for (b, &j) in idx.iter().enumerate() {
                            m[(i, j)] = block[(a, b)];
                        }
                    }
                }
                m
            }
        }
    }

    /// Matrix element `<i|O|j>` in flat indices.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let t = &self.trunc;
        let zero = C64::new(0.0, 0.0);
        match &self.repr {
            Repr::Dense(m) => m[(i, j)],
            Repr::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    zero
                }
            }
            Repr::Local { mode, block } => {
                let (i1, i2) = t.levels_of(i);
                let (j1, j2) = t.levels_of(j);
                match mode {
                    Mode::One if i2 == j2 => block[(i1, j1)],
                    Mode::Two if i1 == j1 => block[(i2, j2)],
                    _ => zero,
                }
            }
            Repr::Shells(blocks) => {
                let (i1, i2) = t.levels_of(i);
                let (j1, j2) = t.levels_of(j);
                let n = i1 + i2;
                if n != j1 + j2 {
                    return zero;
                }
                let lo = n.saturating_sub(t.d2 - 1);
                blocks[n][(i1 - lo, j1 - lo)]
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let repr = match &self.repr {
            Repr::Dense(m) => Repr::Dense(m.adjoint()),
            Repr::Diagonal(d) => Repr::Diagonal(d.map(|z| z.conj())),
            Repr::Local { mode, block } => Repr::Local {
                mode: *mode,
                block: block.adjoint(),
            },
            Repr::Shells(blocks) => Repr::Shells(blocks.iter().map(|b| b.adjoint()).collect()),
        };
        Self {
            repr,
            trunc: self.trunc,
            hermitian_hint: self.hermitian_hint,
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        let fold = |it: &mut dyn Iterator<Item = &C64>| it.map(|z| z.norm()).fold(0.0, f64::max);
        match &self.repr {
            Repr::Dense(m) => fold(&mut m.iter()),
            Repr::Diagonal(d) => fold(&mut d.iter()),
            Repr::Local { block, .. } => fold(&mut block.iter()),
            Repr::Shells(blocks) => blocks
                .iter()
                .map(|b| fold(&mut b.iter()))
                .fold(0.0, f64::max),
        }
    }

    /// Largest entry magnitude with rows and columns restricted to interior shells.
    pub fn max_abs_interior(&self) -> f64 {
        let idx = self.trunc.interior_indices();
        let mut best = 0.0f64;
        for &i in &idx {
            for &j in &idx {
                best = best.max(self.entry(i, j).norm());
            }
        }
        best
    }

    pub fn scale(&self, c: C64) -> Self {
        let repr = match &self.repr {
            Repr::Dense(m) => Repr::Dense(m * c),
            Repr::Diagonal(d) => Repr::Diagonal(d * c),
            Repr::Local { mode, block } => Repr::Local {
                mode: *mode,
                block: block * c,
            },
            Repr::Shells(blocks) => Repr::Shells(blocks.iter().map(|b| b * c).collect()),
        };
        Self {
            repr,
            trunc: self.trunc,
            hermitian_hint: self.hermitian_hint && c.im == 0.0,
        }
    }

    fn shell_view(&self) -> Option<Vec<DMatrix<C64>>> {
        let t = &self.trunc;
        match &self.repr {
            Repr::Shells(blocks) => Some(blocks.clone()),
            Repr::Diagonal(d) => Some(
                (0..=t.max_shell())
                    .map(|n| {
                        let idx = t.shell_indices(n);
                        DMatrix::from_diagonal(&DVector::from_iterator(
                            idx.len(),
                            idx.iter().map(|&i| d[i]),
                        ))
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    fn combine(
        &self,
        rhs: &Self,
        blockwise: impl Fn(&DMatrix<C64>, &DMatrix<C64>) -> DMatrix<C64>,
        diag: impl Fn(&DVector<C64>, &DVector<C64>) -> DVector<C64>,
    ) -> Repr {
        match (&self.repr, &rhs.repr) {
            (Repr::Diagonal(a), Repr::Diagonal(b)) => Repr::Diagonal(diag(a, b)),
            (Repr::Local { mode: ma, block: a }, Repr::Local { mode: mb, block: b }) if ma == mb => {
                Repr::Local {
                    mode: *ma,
                    block: blockwise(a, b),
                }
            }
            _ => match (self.shell_view(), rhs.shell_view()) {
                (Some(a), Some(b)) => {
                    Repr::Shells(a.iter().zip(&b).map(|(x, y)| blockwise(x, y)).collect())
                }
                _ => Repr::Dense(blockwise(&self.to_dense(), &rhs.to_dense())),
            },
        }
    }

    fn sub_unchecked(&self, rhs: &Self) -> Self {
        let repr = self.combine(rhs, |a, b| a - b, |a, b| a - b);
        Self {
            repr,
            trunc: self.trunc,
            hermitian_hint: false,
        }
    }

    /// Operator product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        self.trunc.check_same(&rhs.trunc)?;
        let repr = self.combine(rhs, |a, b| a * b, |a, b| a.component_mul(b));
        Ok(Self {
            repr,
            trunc: self.trunc,
            hermitian_hint: false,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.trunc.check_same(&rhs.trunc)?;
        let repr = self.combine(rhs, |a, b| a + b, |a, b| a + b);
        Ok(Self {
            repr,
            trunc: self.trunc,
            hermitian_hint: self.hermitian_hint && rhs.hermitian_hint,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.trunc.check_same(&rhs.trunc)?;
        let mut out = self.sub_unchecked(rhs);
        out.hermitian_hint = self.hermitian_hint && rhs.hermitian_hint;
        Ok(out)
    }

    /// `[self, rhs]`
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.compose(rhs)?.sub(&rhs.compose(self)?)
    }

    /// Re-tag an operator as Hermitian after checking it.
    pub fn into_hermitian(self) -> Result<Self> {
        Self::build(self.repr, self.trunc, true)
    }

    pub fn apply(&self, state: &FockVector) -> Result<FockVector> {
        self.trunc.check_same(&state.trunc)?;
        let t = &self.trunc;
        let v = &state.amps;
        let amps = match &self.repr {
            Repr::Dense(m) => m * v,
            Repr::Diagonal(d) => d.component_mul(v),
            Repr::Local { mode, block } => {
                let (d1, d2) = (t.d1, t.d2);
                let mut out = DVector::zeros(t.dim());
                match mode {
                    Mode::One => {
                        for i in 0..d1 {
                            for j in 0..d1 {
                                let b = block[(i, j)];
                                if b == C64::new(0.0, 0.0) {
                                    continue;
                                }
                                for k in 0..d2 {
                                    out[i * d2 + k] += b * v[j * d2 + k];
                                }
                            }
                        }
                    }
                    Mode::Two => {
                        for n1 in 0..d1 {
                            let row = n1 * d2;
                            for i in 0..d2 {
                                let mut acc = C64::new(0.0, 0.0);
                                for j in 0..d2 {
                                    acc += block[(i, j)] * v[row + j];
                                }
                                out[row + i] = acc;
                            }
                        }
                    }
                }
                out
            }
            Repr::Shells(blocks) => {
                let mut out = DVector::zeros(t.dim());
                for (n, block) in blocks.iter().enumerate() {
                    let idx = t.shell_indices(n);
                    for (a, &i) in idx.iter().enumerate() {
                        let mut acc = C64::new(0.0, 0.0);
                        for (b, &j) in idx.iter().enumerate() {
                            acc += block[(a, b)] * v[j];
                        }
                        out[i] = acc;
                    }
                }
                out
            }
        };
        Ok(FockVector {
            amps,
            trunc: state.trunc,
        })
    }

    /// Eigen-structure helper for [`crate::optics::hermitian_expm`]: applies
    /// `f` to every Hermitian block, keeping the representation.
    pub(crate) fn map_hermitian_blocks(
        &self,
        f: impl Fn(&DMatrix<C64>) -> DMatrix<C64>,
        diag: impl Fn(C64) -> C64,
        hermitian_hint: bool,
    ) -> Self {
        let repr = match &self.repr {
            Repr::Dense(m) => Repr::Dense(f(m)),
            Repr::Diagonal(d) => Repr::Diagonal(d.map(&diag)),
            Repr::Local { mode, block } => Repr::Local {
                mode: *mode,
                block: f(block),
            },
            Repr::Shells(blocks) => Repr::Shells(blocks.iter().map(&f).collect()),
        };
        Self {
            repr,
            trunc: self.trunc,
            hermitian_hint,
        }
    }
}

/// Single-mode lowering operator on `d` levels: `<n-1|a|n> = sqrt(n)`.
pub fn ladder(d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `a1 ⊗ I` or `I ⊗ a2`.
pub fn annihilator(mode: Mode, trunc: Truncation) -> TwoModeOperator {
    let block = ladder(trunc.levels(mode));
    TwoModeOperator::local(mode, block, trunc, false).expect("ladder block matches truncation")
}

pub fn creator(mode: Mode, trunc: Truncation) -> TwoModeOperator {
    annihilator(mode, trunc).adjoint()
}

pub fn number_op(which: PhotonCount, trunc: Truncation) -> TwoModeOperator {
    let diag = DVector::from_fn(trunc.dim(), |i, _| {
        let (n1, n2) = trunc.levels_of(i);
        let n = match which {
            PhotonCount::Mode(Mode::One) => n1,
            PhotonCount::Mode(Mode::Two) => n2,
            PhotonCount::Total => n1 + n2,
        };
        C64::new(n as f64, 0.0)
    });
    TwoModeOperator {
        repr: Repr::Diagonal(diag),
        trunc,
        hermitian_hint: true,
    }
}

/// Schwinger generators `(J1, J2, J3)`.
pub fn su2_generators(trunc: Truncation) -> (TwoModeOperator, TwoModeOperator, TwoModeOperator) {
    // Within a shell ordered by ascending n1, `a1† a2` raises n1 by one:
    // <n1+1, n2-1| a1† a2 |n1, n2> = sqrt((n1 + 1) n2).
    let hop_blocks: Vec<DMatrix<C64>> = (0..=trunc.max_shell())
        .map(|n| {
            let idx = trunc.shell_indices(n);
            let mut b = DMatrix::zeros(idx.len(), idx.len());
            for col in 0..idx.len().saturating_sub(1) {
                let (n1, n2) = trunc.levels_of(idx[col]);
                b[(col + 1, col)] = C64::new(((n1 + 1) as f64 * n2 as f64).sqrt(), 0.0);
            }
            b
        })
        .collect();
    let half = C64::new(0.5, 0.0);
    let j1 = hop_blocks
        .iter()
        .map(|b| (b + b.adjoint()) * half)
        .collect();
    let j2 = hop_blocks
        .iter()
        .map(|b| (b - b.adjoint()) * C64::new(0.0, -0.5))
        .collect();
    let j3 = DVector::from_fn(trunc.dim(), |i, _| {
        let (n1, n2) = trunc.levels_of(i);
        C64::new((n1 as f64 - n2 as f64) / 2.0, 0.0)
    });
    let shells = |blocks| TwoModeOperator {
        repr: Repr::Shells(blocks),
        trunc,
        hermitian_hint: true,
    };
    (
        shells(j1),
        shells(j2),
        TwoModeOperator {
            repr: Repr::Diagonal(j3),
            trunc,
            hermitian_hint: true,
        },
    )
}

/// `<psi|O|psi>`, evaluated as `<psi|(O|psi>)`.
pub fn expect(state: &FockVector, op: &TwoModeOperator) -> Result<C64> {
    let applied = op.apply(state)?;
    Ok(state.amps.dotc(&applied.amps))
}

/// Real expectation value of a Hermitian operator; fails if the imaginary part is not negligible.
pub fn expect_real(state: &FockVector, op: &TwoModeOperator) -> Result<f64> {
    let value = expect(state, op)?;
    if value.im.abs() > 1e-12 * value.re.abs().max(1.0) {
        return Err(Error::NumericalQuality(format!(
            "expectation value has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}
