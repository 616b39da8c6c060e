use mzi_qfi::closed_form::{closed_form_qfi, f_a_max, qfi_from_moments};
use mzi_qfi::qfi::{
    constrained_qfi, model_qfi, reparametrize, Basis, JacobianSpec, ModelKind, QfiMatrix,
};
use mzi_qfi::scan::ScanGrid;
use mzi_qfi::C64;
use proptest::prelude::*;

/// PSD 2x2 matrix as `L L^T` with a lower-triangular `L`.
fn psd() -> impl Strategy<Value = QfiMatrix> {
    (0.01f64..5.0, -5.0f64..5.0, 0.0f64..5.0).prop_map(|(l11, l21, l22)| {
        QfiMatrix::new(l11 * l11, l11 * l21, l21 * l21 + l22 * l22, Basis::PlusMinus).unwrap()
    })
}

fn amplitude() -> impl Strategy<Value = C64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #[test]
    fn nuisance_never_beats_fixed_common_phase(f in psd()) {
        let a = model_qfi(&f, ModelKind::ANuisance).unwrap();
        let b = model_qfi(&f, ModelKind::BAntisymmetric).unwrap();
        prop_assert!(a <= b + 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn arm_models_sum(f in psd()) {
        let c = model_qfi(&f, ModelKind::CUpperArm).unwrap();
        let d = model_qfi(&f, ModelKind::DLowerArm).unwrap();
        prop_assert!((c + d - 2.0 * (f.f11 + f.f22)).abs() <= 1e-12 * (f.f11 + f.f22).max(1.0));
    }

    #[test]
    fn nuisance_is_inverse_entry(f in psd()) {
        if let Some(inv22) = f.inverse_22() {
            let a = model_qfi(&f, ModelKind::ANuisance).unwrap();
            prop_assert!((a - 1.0 / inv22).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn congruence_determinant(f in psd(), j in prop::array::uniform4(-3.0f64..3.0)) {
        let jm = [[j[0], j[1]], [j[2], j[3]]];
        if let Ok(jac) = JacobianSpec::new(jm, ("f".into(), "g".into())) {
            let t = reparametrize(&f, &jac);
            let want = jac.det().powi(2) * f.det();
            let scale = (jac.det().powi(2) * f.f11 * f.f22).abs().max(1.0);
            prop_assert!((t.det() - want).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn constraints_reproduce_models(f in psd()) {
        let arm = JacobianSpec::arm();
        let c = model_qfi(&f, ModelKind::CUpperArm).unwrap();
        let d = model_qfi(&f, ModelKind::DLowerArm).unwrap();
        let b = model_qfi(&f, ModelKind::BAntisymmetric).unwrap();
        prop_assert!((constrained_qfi(&f, &arm, 1).unwrap() - c).abs() <= 1e-12);
        prop_assert!((constrained_qfi(&f, &arm, 2).unwrap() - d).abs() <= 1e-12);
        prop_assert_eq!(constrained_qfi(&f, &JacobianSpec::identity(), 2).unwrap(), b);
    }

    #[test]
    fn moment_assembly_equals_final_formulas(a1 in amplitude(), a2 in amplitude(), r in 0.0f64..1.0) {
        let x = qfi_from_moments(a1, r, a2);
        let y = closed_form_qfi(a1, r, a2);
        let scale = y.f11.abs().max(y.f22.abs()).max(1.0);
        prop_assert!(x.max_abs_diff(&y) <= 1e-12 * scale);
    }

    #[test]
    fn real_amplitudes_have_no_cross_term(x1 in -2.0f64..2.0, x2 in -2.0f64..2.0, r in 0.0f64..1.0) {
        let f = closed_form_qfi(C64::new(x1, 0.0), r, C64::new(x2, 0.0));
        prop_assert_eq!(f.f12, 0.0);
        prop_assert_eq!(model_qfi(&f, ModelKind::ANuisance).unwrap(), f.f22);
    }

    #[test]
    fn closed_form_is_psd(a1 in amplitude(), a2 in amplitude(), r in 0.0f64..1.2) {
        prop_assert!(closed_form_qfi(a1, r, a2).check_psd().is_ok());
    }

    #[test]
    fn model_b_best_phase_of_alpha2_matches_fa_max(n1 in 0.0f64..2.0, n2 in 0.0f64..2.0, r in 0.0f64..1.0) {
        // Real alpha1; sweep arg(alpha2) finely.
        let grid = ScanGrid::new(n1, n2, r, 8, 720, ModelKind::BAntisymmetric).unwrap();
        let best = (0..720)
            .map(|k| grid.model_value(ModelKind::BAntisymmetric, 0.0, grid.theta2(k)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((best - f_a_max(n1, n2, r)).abs() <= 1e-12 * best.max(1.0));
    }
}
