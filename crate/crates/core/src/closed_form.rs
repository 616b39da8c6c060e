//! Analytic results for the displaced-squeezed vacuum ⊗ coherent input.
//!
//! Two independent assemblies of the QFI matrix live here: one from the
//! single-mode moments ([`f11_from_moments`] and friends) and one from the
//! final simplified expressions ([`closed_form_qfi`]).

use crate::fock::C64;
use crate::optics::InputSpec;
use crate::qfi::{Basis, QfiMatrix};

/// Single-mode moments needed by the QFI assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// `<a>`
    pub a_mean: C64,
    /// `<a† a>`
    pub n_mean: f64,
    /// `<a a>`
    pub aa: C64,
    /// `<a†² a>`
    pub adad_a: C64,
    /// `<(a† a)²>`
    pub n2: f64,
}

impl MomentSet {
    pub fn number_variance(&self) -> f64 {
        self.n2 - self.n_mean * self.n_mean
    }
}

/// Moments of `D(alpha1) S(r) |0>`.
pub fn moments_displaced_squeezed(alpha1: C64, r: f64) -> MomentSet {
    let (sh, ch) = (r.sinh(), r.cosh());
    let sh2 = sh * sh;
    let s2r = (2.0 * r).sinh();
    let n_mean = alpha1.norm_sqr() + sh2;
    MomentSet {
        a_mean: alpha1,
        n_mean,
        aa: alpha1 * alpha1 - C64::new(s2r / 2.0, 0.0),
        adad_a: alpha1.conj() * (2.0 * sh2) - alpha1 * (s2r / 2.0) + alpha1.conj() * alpha1.norm_sqr(),
        n2: n_mean * n_mean + s2r * s2r / 2.0 + (alpha1 * sh - alpha1.conj() * ch).norm_sqr(),
    }
}

/// Moments of the coherent state `|alpha2>`.
pub fn moments_coherent(alpha2: C64) -> MomentSet {
    let n = alpha2.norm_sqr();
    MomentSet {
        a_mean: alpha2,
        n_mean: n,
        aa: alpha2 * alpha2,
        adad_a: alpha2.conj() * n,
        n2: n * n + n,
    }
}

/// `F11 = Var(a1† a1) + Var(a2† a2)` for a product input.
pub fn f11_from_moments(m1: &MomentSet, m2: &MomentSet) -> f64 {
    m1.n2 + m2.n2 - m1.n_mean * m1.n_mean - m2.n_mean * m2.n_mean
}

/// `F22 = 4 Var(J2)` expanded over product-state moments.
pub fn f22_from_moments(m1: &MomentSet, m2: &MomentSet) -> f64 {
    let cross = -(m1.aa.conj() * m2.aa) - m1.aa * m2.aa.conj();
    let populations = m1.n_mean * (1.0 + m2.n_mean) + (1.0 + m1.n_mean) * m2.n_mean;
    let coherence = (m1.a_mean.conj() * m2.a_mean - m1.a_mean * m2.a_mean.conj()).norm_sqr();
    cross.re + populations - coherence
}

/// `F12 = 2 Cov(N, J2)` expanded over product-state moments; the result is
/// `X + X*` with `X` built from `<a1† a1 a1†>`, `<a2† a2 a2>` and the means.
pub fn f12_from_moments(m1: &MomentSet, m2: &MomentSet) -> f64 {
    let i = C64::new(0.0, 1.0);
    // a1† a1 a1† = a1†² a1 + a1†
    let n_ad_1 = m1.adad_a + m1.a_mean.conj();
    // <a2† a2 a2> = <a2†² a2>*
    let n_a_2 = m2.adad_a.conj();
    let total_n = m1.n_mean + m2.n_mean;
    let x = -i * n_ad_1 * m2.a_mean - i * m1.a_mean.conj() * n_a_2
        + i * total_n * m1.a_mean.conj() * m2.a_mean;
    2.0 * x.re
}

/// QFI matrix assembled from the two moment sets.
pub fn qfi_from_moments(alpha1: C64, r: f64, alpha2: C64) -> QfiMatrix {
    let m1 = moments_displaced_squeezed(alpha1, r);
    let m2 = moments_coherent(alpha2);
    QfiMatrix::new_unchecked(
        f11_from_moments(&m1, &m2),
        f12_from_moments(&m1, &m2),
        f22_from_moments(&m1, &m2),
        Basis::PlusMinus,
    )
}

/// Quadrature-weighted displacement terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPair {
    /// `(Re a1)² e^{-2r} + (Im a1)² e^{2r}`
    pub theta1: f64,
    /// `(Im a2)² e^{-2r} + (Re a2)² e^{2r}`
    pub theta2: f64,
}

pub fn theta_pair(alpha1: C64, r: f64, alpha2: C64) -> ThetaPair {
    let (down, up) = ((-2.0 * r).exp(), (2.0 * r).exp());
    ThetaPair {
        theta1: alpha1.re * alpha1.re * down + alpha1.im * alpha1.im * up,
        theta2: alpha2.im * alpha2.im * down + alpha2.re * alpha2.re * up,
    }
}

/// Final analytic QFI matrix in the `(phi+, phi-)` basis.
pub fn closed_form_qfi(alpha1: C64, r: f64, alpha2: C64) -> QfiMatrix {
    let th = theta_pair(alpha1, r, alpha2);
    let s2r = (2.0 * r).sinh();
    let sh = r.sinh();
    let ch = r.cosh();
    let f11 = alpha2.norm_sqr() + s2r * s2r / 2.0 + th.theta1;
    let f22 = alpha1.norm_sqr() + sh * sh + th.theta2;
    let f12 = -(alpha1 * alpha2).im * s2r + 2.0 * (alpha1.conj() * alpha2).im * ch * ch;
    QfiMatrix::new_unchecked(f11, f12, f22, Basis::PlusMinus)
}

pub fn qfi_closed_form(spec: &InputSpec) -> QfiMatrix {
    closed_form_qfi(spec.alpha1, spec.r, spec.alpha2)
}

/// Maximum of the nuisance-model QFI at fixed resources, `n1 + sinh² r + n2 e^{2r}`.
pub fn f_a_max(n1: f64, n2: f64, r: f64) -> f64 {
    n1 + r.sinh().powi(2) + n2 * (2.0 * r).exp()
}

/// Upper-arm model QFI when `alpha1 = i alpha2`: `(2 + cosh 2r) sinh² r`.
pub fn f_c_special(r: f64) -> f64 {
    (2.0 + (2.0 * r).cosh()) * r.sinh().powi(2)
}

/// Same quantity in terms of the squeezed-vacuum photon number `n_s = sinh² r`.
pub fn f_c_special_photons(n_s: f64) -> f64 {
    (3.0 + 2.0 * n_s) * n_s
}

/// `alpha1` satisfying `Re a1 = -Im a2`, `Im a1 = Re a2` (i.e. `alpha1 = i alpha2`).
pub fn upper_arm_partner(alpha2: C64) -> C64 {
    C64::new(-alpha2.im, alpha2.re)
}

/// `alpha1` satisfying `Re a1 = Im a2`, `Im a1 = -Re a2` (i.e. `alpha1 = -i alpha2`).
pub fn lower_arm_partner(alpha2: C64) -> C64 {
    C64::new(alpha2.im, -alpha2.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfi::{model_qfi, ModelKind};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_moments_vanish() {
        for m in [moments_displaced_squeezed(c(0.0, 0.0), 0.0), moments_coherent(c(0.0, 0.0))] {
            assert_eq!(m.a_mean, c(0.0, 0.0));
            assert_eq!(m.n_mean, 0.0);
            assert_eq!(m.aa, c(0.0, 0.0));
            assert_eq!(m.adad_a, c(0.0, 0.0));
            assert_eq!(m.n2, 0.0);
        }
    }

    #[test]
    fn squeezed_vacuum_moments() {
        let r = 0.55;
        let m = moments_displaced_squeezed(c(0.0, 0.0), r);
        assert!((m.n_mean - r.sinh().powi(2)).abs() < 1e-15);
        assert!((m.aa - c(-(2.0 * r).sinh() / 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn coherent_n2_unit_amplitude() {
        let m = moments_coherent(C64::from_polar(1.0, 0.4));
        assert!((m.n2 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn moments_are_consistent() {
        let m = moments_displaced_squeezed(c(-0.3, 0.9), 0.7);
        assert!(m.number_variance() >= 0.0);
        assert!(m.n_mean >= 0.0);
    }

    #[test]
    fn closed_form_zero_and_real_unit_amplitudes() {
        let z = closed_form_qfi(c(0.0, 0.0), 0.0, c(0.0, 0.0));
        assert_eq!(z.as_array(), [[0.0, 0.0], [0.0, 0.0]]);
        let f = closed_form_qfi(c(1.0, 0.0), 0.0, c(1.0, 0.0));
        assert_eq!(f.as_array(), [[2.0, 0.0], [0.0, 2.0]]);
    }

    #[test]
    fn real_amplitudes_decouple() {
        let f = closed_form_qfi(c(0.8, 0.0), 0.45, c(-1.2, 0.0));
        assert_eq!(f.f12, 0.0);
    }

    #[test]
    fn f_a_max_edge_cases() {
        let r = 0.3;
        assert!((f_a_max(0.0, 0.0, r) - r.sinh().powi(2)).abs() < 1e-15);
        assert_eq!(f_a_max(1.5, 2.0, 0.0), 3.5);
        // 1 + sinh^2(0.5) + e
        assert!((f_a_max(1.0, 1.0, 0.5) - 3.989822145866667).abs() < 1e-12);
    }

    #[test]
    fn f_c_special_forms() {
        assert_eq!(f_c_special(0.0), 0.0);
        for r in [0.1f64, 0.37, 0.8, 1.3] {
            let ns = r.sinh().powi(2);
            assert!((f_c_special(r) - f_c_special_photons(ns)).abs() < 1e-12);
        }
    }

    #[test]
    fn f_c_special_through_closed_form() {
        let alpha2 = c(0.6, -0.3);
        let alpha1 = upper_arm_partner(alpha2);
        assert_eq!(alpha1, c(0.3, 0.6));
        let f = closed_form_qfi(alpha1, 0.4, alpha2);
        let fc = model_qfi(&f, ModelKind::CUpperArm).unwrap();
        assert!((fc - f_c_special(0.4)).abs() < 1e-12);
        let g = closed_form_qfi(lower_arm_partner(alpha2), 0.4, alpha2);
        let fd = model_qfi(&g, ModelKind::DLowerArm).unwrap();
        assert!((fd - f_c_special(0.4)).abs() < 1e-12);
    }

    #[test]
    fn moment_assembly_matches_final_formulas() {
        let cases = [
            (c(0.5, 0.3), 0.4, c(0.7, -0.2)),
            (c(-1.1, 0.2), 0.8, c(0.0, 1.3)),
            (c(0.0, -0.6), 0.1, c(-0.4, -0.4)),
        ];
        for (a1, r, a2) in cases {
            let x = qfi_from_moments(a1, r, a2);
            let y = closed_form_qfi(a1, r, a2);
            assert!(x.max_abs_diff(&y) < 1e-12, "{x} vs {y}");
        }
    }
}
