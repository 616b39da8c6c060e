//! Maximization of the model QFIs over the phases of the input amplitudes at
//! fixed resources `(n1, n2, r)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::closed_form::closed_form_qfi;
use crate::error::{Error, Result};
use crate::fock::C64;
use crate::qfi::{evaluate_model, ModelKind, QfiMatrix};

pub const MIN_STEPS: usize = 8;
pub const REFINE_MAX_ITERATIONS: usize = 10_000;
/// Refinement stops once the coordinate step is this small.
const REFINE_MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    n1: f64,
    n2: f64,
    r: f64,
    theta1_steps: usize,
    theta2_steps: usize,
    model: ModelKind,
}

impl ScanGrid {
    pub fn new(
        n1: f64,
        n2: f64,
        r: f64,
        theta1_steps: usize,
        theta2_steps: usize,
        model: ModelKind,
    ) -> Result<Self> {
        for (name, v) in [("n1", n1), ("n2", n2), ("r", r)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidGrid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if theta1_steps < MIN_STEPS || theta2_steps < MIN_STEPS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_STEPS} steps per angle, got {theta1_steps}x{theta2_steps}"
            )));
        }
        Ok(Self {
            n1,
            n2,
            r,
            theta1_steps,
            theta2_steps,
            model,
        })
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn steps(&self) -> (usize, usize) {
        (self.theta1_steps, self.theta2_steps)
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn with_model(mut self, model: ModelKind) -> Self {
        self.model = model;
        self
    }

    pub fn theta1(&self, k: usize) -> f64 {
        TAU * k as f64 / self.theta1_steps as f64
    }

    pub fn theta2(&self, k: usize) -> f64 {
        TAU * k as f64 / self.theta2_steps as f64
    }

    pub fn amplitudes(&self, theta1: f64, theta2: f64) -> (C64, C64) {
        (
            C64::from_polar(self.n1.sqrt(), theta1),
            C64::from_polar(self.n2.sqrt(), theta2),
        )
    }

    pub fn qfi_at(&self, theta1: f64, theta2: f64) -> QfiMatrix {
        let (a1, a2) = self.amplitudes(theta1, theta2);
        closed_form_qfi(a1, self.r, a2)
    }

    /// Value of `model` at the given angles.
    pub fn model_value(&self, model: ModelKind, theta1: f64, theta2: f64) -> Result<f64> {
        Ok(evaluate_model(&self.qfi_at(theta1, theta2), model)?.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub theta1: f64,
    pub theta2: f64,
    pub qfi: QfiMatrix,
    /// Model values in [`ModelKind::ALL`] order.
    pub models: [f64; 4],
}

impl ScanRow {
    pub fn model(&self, kind: ModelKind) -> f64 {
        self.models[model_slot(kind)]
    }
}

fn model_slot(kind: ModelKind) -> usize {
    ModelKind::ALL.iter().position(|&k| k == kind).expect("exhaustive")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Argmax {
    pub theta1: f64,
    pub theta2: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: ScanGrid,
    /// θ1-major.
    pub rows: Vec<ScanRow>,
    pub argmax: BTreeMap<ModelKind, Argmax>,
}

pub fn run_scan(grid: &ScanGrid) -> Result<ScanResult> {
    let (s1, s2) = grid.steps();
    let mut rows = Vec::with_capacity(s1 * s2);
    for k1 in 0..s1 {
        for k2 in 0..s2 {
            let (theta1, theta2) = (grid.theta1(k1), grid.theta2(k2));
            let qfi = grid.qfi_at(theta1, theta2);
            let mut models = [0.0; 4];
            for (slot, &kind) in ModelKind::ALL.iter().enumerate() {
                models[slot] = evaluate_model(&qfi, kind)?.value;
            }
            rows.push(ScanRow {
                theta1,
                theta2,
                qfi,
                models,
            });
        }
    }
    let mut argmax = BTreeMap::new();
    for &kind in &ModelKind::ALL {
        argmax.insert(kind, best_row(&rows, kind));
    }
    Ok(ScanResult {
        grid: *grid,
        rows,
        argmax,
    })
}

/// Rows are θ1-major with ascending angles, so the first row that beats the
/// running best by more than rounding noise is the lexicographically smallest
/// maximizer.
fn best_row(rows: &[ScanRow], kind: ModelKind) -> Argmax {
    let mut best = Argmax {
        theta1: rows[0].theta1,
        theta2: rows[0].theta2,
        value: rows[0].model(kind),
    };
    for row in &rows[1..] {
        let v = row.model(kind);
        if v > best.value + tie_tolerance(best.value) {
            best = Argmax {
                theta1: row.theta1,
                theta2: row.theta2,
                value: v,
            };
        }
    }
    best
}

fn tie_tolerance(value: f64) -> f64 {
    1e-12 * value.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub theta1: f64,
    pub theta2: f64,
    pub value: f64,
    /// False when the iteration cap was hit; the best point found is still returned.
    pub converged: bool,
}

/// Derivative-free coordinate ascent with step halving, started at `seed`.
/// Never returns a value below the seed's.
pub fn refine_max(grid: &ScanGrid, seed: (f64, f64)) -> Result<Refined> {
    let model = grid.model();
    let (mut t1, mut t2) = seed;
    let mut best = grid.model_value(model, t1, t2)?;
    let (s1, s2) = grid.steps();
    let mut step = TAU / s1.max(s2) as f64;
    let mut iterations = 0;
    while step >= REFINE_MIN_STEP {
        if iterations >= REFINE_MAX_ITERATIONS {
            return Ok(Refined {
                theta1: t1.rem_euclid(TAU),
                theta2: t2.rem_euclid(TAU),
                value: best,
                converged: false,
            });
        }
        iterations += 1;
        let mut moved = false;
        for (d1, d2) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = grid.model_value(model, t1 + d1, t2 + d2)?;
            if v > best + f64::EPSILON * best.abs().max(1.0) {
                best = v;
                t1 += d1;
                t2 += d2;
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    Ok(Refined {
        theta1: t1.rem_euclid(TAU),
        theta2: t2.rem_euclid(TAU),
        value: best,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{f_a_max, f_c_special};
    use std::f64::consts::PI;

    #[test]
    fn grid_validation() {
        assert!(ScanGrid::new(1.0, 1.0, 0.5, 7, 8, ModelKind::ANuisance).is_err());
        assert!(ScanGrid::new(-1.0, 1.0, 0.5, 8, 8, ModelKind::ANuisance).is_err());
        assert!(ScanGrid::new(1.0, 1.0, f64::NAN, 8, 8, ModelKind::ANuisance).is_err());
        assert!(ScanGrid::new(0.0, 0.0, 0.0, 8, 8, ModelKind::ANuisance).is_ok());
    }

    #[test]
    fn no_displacement_is_flat() {
        let r = 0.4;
        let grid = ScanGrid::new(0.0, 0.0, r, 8, 8, ModelKind::ANuisance).unwrap();
        let res = run_scan(&grid).unwrap();
        assert_eq!(res.rows.len(), 64);
        let ns = r.sinh().powi(2);
        for row in &res.rows {
            assert!((row.model(ModelKind::ANuisance) - ns).abs() < 1e-14);
            assert!((row.model(ModelKind::BAntisymmetric) - ns).abs() < 1e-14);
            for slot in 0..4 {
                assert_eq!(row.models[slot], res.rows[0].models[slot]);
            }
        }
        // Flat landscape: first grid point wins every tie.
        for am in res.argmax.values() {
            assert_eq!((am.theta1, am.theta2), (0.0, 0.0));
        }
        let refined = refine_max(&grid, (0.0, 0.0)).unwrap();
        assert_eq!((refined.theta1, refined.theta2), (0.0, 0.0));
    }

    #[test]
    fn rows_are_theta1_major() {
        let grid = ScanGrid::new(1.0, 0.5, 0.2, 8, 10, ModelKind::CUpperArm).unwrap();
        let res = run_scan(&grid).unwrap();
        assert_eq!(res.rows[1].theta1, 0.0);
        assert_eq!(res.rows[10].theta1, grid.theta1(1));
        assert_eq!(res.rows[10].theta2, 0.0);
    }

    #[test]
    fn fa_maximum_at_real_amplitudes() {
        let grid = ScanGrid::new(1.0, 1.0, 0.5, 64, 64, ModelKind::ANuisance).unwrap();
        let res = run_scan(&grid).unwrap();
        let am = res.argmax[&ModelKind::ANuisance];
        assert_eq!((am.theta1, am.theta2), (0.0, 0.0));
        assert!((am.value - f_a_max(1.0, 1.0, 0.5)).abs() < 1e-3);
    }

    #[test]
    fn refine_from_coarse_seed() {
        let grid = ScanGrid::new(1.0, 1.0, 0.5, 32, 32, ModelKind::ANuisance).unwrap();
        let res = run_scan(&grid).unwrap();
        // Seed deliberately off the grid maximum.
        let seed = (grid.theta1(1), grid.theta2(31));
        let seed_value = grid.model_value(ModelKind::ANuisance, seed.0, seed.1).unwrap();
        let refined = refine_max(&grid, seed).unwrap();
        assert!(refined.converged);
        assert!(refined.value >= seed_value);
        assert!((refined.value - f_a_max(1.0, 1.0, 0.5)).abs() < 1e-6);
        let am = res.argmax[&ModelKind::ANuisance];
        let from_grid = refine_max(&grid, (am.theta1, am.theta2)).unwrap();
        assert!((from_grid.value - f_a_max(1.0, 1.0, 0.5)).abs() < 1e-6);
    }

    #[test]
    fn refine_keeps_exact_maximum() {
        let grid = ScanGrid::new(1.0, 1.0, 0.5, 16, 16, ModelKind::ANuisance).unwrap();
        let refined = refine_max(&grid, (0.0, 0.0)).unwrap();
        assert_eq!((refined.theta1, refined.theta2), (0.0, 0.0));
        assert_eq!(refined.value, grid.model_value(ModelKind::ANuisance, 0.0, 0.0).unwrap());
    }

    #[test]
    fn model_b_peaks_at_real_alpha2() {
        let grid = ScanGrid::new(0.8, 1.2, 0.3, 16, 64, ModelKind::BAntisymmetric).unwrap();
        let res = run_scan(&grid).unwrap();
        for k1 in 0..16 {
            let slice = &res.rows[k1 * 64..(k1 + 1) * 64];
            let top = slice
                .iter()
                .max_by(|a, b| a.model(ModelKind::BAntisymmetric).total_cmp(&b.model(ModelKind::BAntisymmetric)))
                .unwrap();
            let at_zero = slice[0].model(ModelKind::BAntisymmetric);
            assert!((top.model(ModelKind::BAntisymmetric) - at_zero).abs() < 1e-12);
            assert!((slice[32].theta2 - PI).abs() < 1e-15);
            assert!((slice[32].model(ModelKind::BAntisymmetric) - at_zero).abs() < 1e-12);
        }
        assert!((res.argmax[&ModelKind::BAntisymmetric].value - f_a_max(0.8, 1.2, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn model_c_on_constraint_points() {
        // alpha1 = i alpha2 needs n1 = n2 and theta1 = theta2 + pi/2.
        let r = 0.35;
        let grid = ScanGrid::new(0.7, 0.7, r, 16, 16, ModelKind::CUpperArm).unwrap();
        let res = run_scan(&grid).unwrap();
        for k2 in 0..16 {
            let k1 = (k2 + 4) % 16;
            let row = res.rows[k1 * 16 + k2];
            assert!((row.model(ModelKind::CUpperArm) - f_c_special(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn periodicity() {
        let grid = ScanGrid::new(0.9, 0.4, 0.6, 8, 8, ModelKind::DLowerArm).unwrap();
        for (t1, t2) in [(0.3, 1.2), (2.0, 5.5), (4.4, 0.1)] {
            for kind in ModelKind::ALL {
                let a = grid.model_value(kind, t1, t2).unwrap();
                let b = grid.model_value(kind, t1 + TAU, t2 - TAU).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn f_a_max_is_increasing() {
        let vals = [0.0, 0.5, 1.0, 1.5];
        for &a in &vals {
            for &b in &vals {
                for w in vals.windows(2) {
                    assert!(f_a_max(w[1], a, b) > f_a_max(w[0], a, b));
                    assert!(f_a_max(a, w[1], b) > f_a_max(a, w[0], b));
                    assert!(f_a_max(a, b, w[1]) > f_a_max(a, b, w[0]));
                }
            }
        }
    }

    #[test]
    fn scan_rows_are_psd() {
        let grid = ScanGrid::new(1.3, 0.6, 0.7, 24, 24, ModelKind::ANuisance).unwrap();
        for row in run_scan(&grid).unwrap().rows {
            row.qfi.check_psd().unwrap();
        }
    }
}
