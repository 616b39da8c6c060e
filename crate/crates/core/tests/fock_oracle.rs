//! Truncated Fock-space simulation against the analytic results.

use mzi_qfi::closed_form::{closed_form_qfi, moments_coherent, moments_displaced_squeezed, MomentSet};
use mzi_qfi::fock::{annihilator, creator, expect, Mode};
use mzi_qfi::optics::{prepare_input, prepare_input_auto, InputSpec, PhasePair};
use mzi_qfi::qfi::{Interferometer, DEFAULT_FD_STEP};
use mzi_qfi::{FockVector, Truncation, TwoModeOperator, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The five moments of one mode, measured on the two-mode state.
fn measured_moments(psi: &FockVector, mode: Mode) -> MomentSet {
    let tr = *psi.trunc();
    let a = annihilator(mode, tr);
    let ad = creator(mode, tr);
    let n = ad.compose(&a).unwrap();
    let ev = |op: &TwoModeOperator| expect(psi, op).unwrap();
    MomentSet {
        a_mean: ev(&a),
        n_mean: ev(&n).re,
        aa: ev(&a.compose(&a).unwrap()),
        adad_a: ev(&ad.compose(&ad).unwrap().compose(&a).unwrap()),
        n2: ev(&n.compose(&n).unwrap()).re,
    }
}

fn moment_gap(x: &MomentSet, y: &MomentSet) -> f64 {
    [
        (x.a_mean - y.a_mean).norm(),
        (x.n_mean - y.n_mean).abs(),
        (x.aa - y.aa).norm(),
        (x.adad_a - y.adad_a).norm(),
        (x.n2 - y.n2).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[test]
fn moments_at_reference_point() {
    let (a1, r, a2) = (c(0.5, 0.3), 0.4, c(0.7, -0.2));
    let spec = InputSpec::new(a1, r, a2, Truncation::square(40).unwrap()).unwrap();
    let psi = prepare_input(&spec).unwrap();
    let m1 = measured_moments(&psi, Mode::One);
    let m2 = measured_moments(&psi, Mode::Two);
    assert!(moment_gap(&m1, &moments_displaced_squeezed(a1, r)) < 1e-6);
    assert!(moment_gap(&m2, &moments_coherent(a2)) < 1e-8);
}

#[test]
fn coherent_mean_and_number() {
    let tr = Truncation::square(30).unwrap();
    for alpha in [c(1.0, 0.0), c(0.3, -0.9), c(-0.5, 0.5)] {
        let spec = InputSpec::new(c(0.0, 0.0), 0.0, alpha, tr).unwrap();
        let psi = prepare_input(&spec).unwrap();
        let m = measured_moments(&psi, Mode::Two);
        assert!((m.a_mean - alpha).norm() < 1e-8);
        assert!((m.n_mean - alpha.norm_sqr()).abs() < 1e-8);
    }
}

#[test]
fn displaced_squeezed_prepared_moments() {
    let (a1, r) = (c(0.5, 0.0), 0.3);
    let spec = InputSpec::new(a1, r, c(0.0, 0.0), Truncation::square(40).unwrap()).unwrap();
    let psi = prepare_input(&spec).unwrap();
    let m = measured_moments(&psi, Mode::One);
    assert!((m.n_mean - (a1.norm_sqr() + r.sinh().powi(2))).abs() < 1e-6);
    let want = a1.conj() * (2.0 * r.sinh().powi(2)) - a1 * ((2.0 * r).sinh() / 2.0) + a1.conj() * a1.norm_sqr();
    assert!((m.adad_a - want).norm() < 1e-6);
}

#[test]
fn reference_point_three_routes() {
    let (a1, r, a2) = (c(0.5, 0.3), 0.4, c(0.7, -0.2));
    let prepared = prepare_input_auto(a1, r, a2, 1e-8).unwrap();
    let mzi = Interferometer::new(prepared.state).unwrap();
    let closed = closed_form_qfi(a1, r, a2);
    let gen = mzi.qfi_generator().unwrap();
    let fd = mzi.qfi_finite_difference(PhasePair::default(), DEFAULT_FD_STEP).unwrap();
    assert!(closed.max_abs_diff(&gen) < 1e-6, "{closed} vs {gen}");
    assert!(gen.max_abs_diff(&fd) < 1e-5, "{gen} vs {fd}");
}

#[test]
fn qfi_does_not_depend_on_working_point() {
    let (a1, r, a2) = (c(-0.4, 0.8), 0.5, c(0.9, 0.1));
    let prepared = prepare_input_auto(a1, r, a2, 1e-8).unwrap();
    let mzi = Interferometer::new(prepared.state).unwrap();
    let base = mzi.qfi_finite_difference(PhasePair::default(), DEFAULT_FD_STEP).unwrap();
    let shifted = mzi.qfi_finite_difference(PhasePair::new(0.7, -0.3), DEFAULT_FD_STEP).unwrap();
    assert!(base.max_abs_diff(&shifted) < 1e-5);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let at = PhasePair::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let f = mzi.qfi_finite_difference(at, DEFAULT_FD_STEP).unwrap();
        assert!(base.max_abs_diff(&f) < 1e-5);
    }
}

#[test]
fn path_equivalence_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..6 {
        let a1 = C64::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        let a2 = C64::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        let r = rng.gen_range(0.0..0.8);
        let prepared = prepare_input_auto(a1, r, a2, 1e-8).unwrap();
        let mzi = Interferometer::new(prepared.state).unwrap();
        let gen = mzi.qfi_generator().unwrap();
        let fd = mzi.qfi_finite_difference(PhasePair::default(), DEFAULT_FD_STEP).unwrap();
        let closed = closed_form_qfi(a1, r, a2);
        let tol = 1e-5f64.max(10.0 * DEFAULT_FD_STEP * DEFAULT_FD_STEP);
        assert!(gen.max_abs_diff(&fd) <= tol, "a1={a1} r={r} a2={a2}: {gen} vs {fd}");
        assert!(closed.max_abs_diff(&gen) <= 1e-6, "a1={a1} r={r} a2={a2}: {closed} vs {gen}");
    }
}

#[test]
fn output_state_stays_normalized() {
    let prepared = prepare_input_auto(c(1.0, -0.5), 0.6, c(0.2, 1.1), 1e-8).unwrap();
    let mzi = Interferometer::new(prepared.state).unwrap();
    let out = mzi.output(PhasePair::new(1.3, -0.4)).unwrap();
    assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
}
