//! The `qfi`, `verify` and `scan` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use mzi_qfi::optics::prepare_input_fixed;
use mzi_qfi::qfi::{crb, evaluate_model, Interferometer};
use mzi_qfi::scan::{refine_max, run_scan, Refined, ScanGrid, ScanResult};
use mzi_qfi::verify::{verify_point, VerifyOptions, VerifyReport, MAX_VERIFY_ALPHA, MAX_VERIFY_R};
use mzi_qfi::{closed_form::closed_form_qfi, fock::DEFAULT_LEAK_TOL, Error, ModelKind, QfiMatrix};
use serde_json::{json, Map, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::exit::{self, CliError};
use crate::output::{
    config_json, csv_field, fmt_f64, json_f64, per_model, qfi_json, render_json, QFI_CSV_HEADER,
    SCAN_CSV_HEADER,
};

pub const DEFAULT_GRID_STEPS: usize = 64;

/// Where a command sends its data and its human-readable notes.
pub struct Streams<'a> {
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

impl Streams<'_> {
    fn note(&mut self, text: &str) {
        // Diagnostics are best effort; a closed stderr must not change the exit code.
        let _ = self.stderr.write_all(text.as_bytes());
    }
}

/// Maps a library error onto the exit-code contract.
pub fn classify(err: Error) -> CliError {
    match err {
        Error::TruncationTooSmall { ref trace, .. } => {
            let mut msg = format!("{err}\nsizing trace:");
            for a in trace {
                let _ = write!(msg, "\n  d1={} d2={} edge_weight={:e}", a.d1, a.d2, a.edge_weight);
            }
            CliError::new(exit::TRUNCATION, msg)
        }
        Error::NoInformation(_) => CliError::new(exit::NO_INFORMATION, err.to_string()),
        Error::InvalidInput(_) | Error::InvalidTruncation(_) | Error::InvalidGrid(_) | Error::InvalidStep(_) => {
            CliError::config(err.to_string())
        }
        other => CliError::new(1, other.to_string()),
    }
}

fn emit(data: &str, out: Option<&Path>, streams: &mut Streams<'_>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, data)
            .map_err(|e| CliError::io(format!("cannot write `{}`: {e}", path.display()))),
        None => streams
            .stdout
            .write_all(data.as_bytes())
            .and_then(|_| streams.stdout.flush())
            .map_err(|e| CliError::io(format!("cannot write to stdout: {e}"))),
    }
}

/// Model values and bounds of one QFI matrix, in [`ModelKind::ALL`] order.
struct ModelReport {
    values: [Option<f64>; 4],
    bounds: [Option<f64>; 4],
    degenerate: bool,
}

fn model_report(f: &QfiMatrix, repetitions: u64) -> ModelReport {
    let mut report = ModelReport {
        values: [None; 4],
        bounds: [None; 4],
        degenerate: false,
    };
    for (slot, &kind) in ModelKind::ALL.iter().enumerate() {
        if let Ok(m) = evaluate_model(f, kind) {
            report.values[slot] = Some(m.value);
            report.degenerate |= m.degenerate_nuisance;
            report.bounds[slot] = crb(m.value, repetitions).ok().map(|b| b.variance_lower_bound);
        }
    }
    report
}

fn slot(kind: ModelKind) -> usize {
    ModelKind::ALL.iter().position(|&k| k == kind).expect("exhaustive")
}

fn no_information(kind: ModelKind, value: Option<f64>) -> CliError {
    let shown = value.map_or_else(|| "undefined".to_string(), fmt_f64);
    CliError::new(
        exit::NO_INFORMATION,
        format!("model {kind} carries no information (QFI = {shown}); the Cramer-Rao bound is undefined"),
    )
}

/// QFI matrix, the four model QFIs and their bounds.
///
/// With a truncation set, the matrix comes from the truncated Fock simulation;
/// otherwise from the closed form.
pub fn run_qfi(cfg: &RunConfig, out: Option<&Path>, streams: &mut Streams<'_>) -> Result<(), CliError> {
    let (f, method) = match cfg.truncation {
        Some(d) => {
            let prepared = prepare_input_fixed(cfg.alpha1(), cfg.r, cfg.alpha2(), d, DEFAULT_LEAK_TOL)
                .map_err(classify)?;
            let mzi = Interferometer::new(prepared.state).map_err(classify)?;
            (mzi.qfi_generator().map_err(classify)?, "fock")
        }
        None => (closed_form_qfi(cfg.alpha1(), cfg.r, cfg.alpha2()), "closed_form"),
    };
    let report = model_report(&f, cfg.repetitions);
    if report.degenerate {
        streams.note("note: F11 = 0 and F12 = 0; model a reported as F22\n");
    }
    let data = match cfg.output_format {
        OutputFormat::Csv => {
            let fields: Vec<String> = [Some(f.f11), Some(f.f12), Some(f.f22)]
                .into_iter()
                .chain(report.values)
                .chain(report.bounds)
                .map(csv_field)
                .collect();
            format!("{QFI_CSV_HEADER}\n{}\n", fields.join(","))
        }
        OutputFormat::Json => render_json(&json!({
            "config": config_json(cfg),
            "method": method,
            "qfi": qfi_json(&f),
            "models": per_model(report.values),
            "bounds": per_model(report.bounds),
        })),
    };
    emit(&data, out, streams)?;
    if let Some(kind) = cfg.model {
        let value = report.values[slot(kind)];
        if !value.is_some_and(|v| v > 0.0) {
            return Err(no_information(kind, value));
        }
    }
    Ok(())
}

/// Rejects points whose numerical check would be too expensive.
fn check_verify_range(cfg: &RunConfig) -> Result<(), CliError> {
    for (key, a) in [("alpha1", cfg.alpha1()), ("alpha2", cfg.alpha2())] {
        if a.norm() > MAX_VERIFY_ALPHA {
            return Err(CliError::config(format!(
                "invalid value for `{key}`: verify supports |{key}| <= {MAX_VERIFY_ALPHA}, got {}",
                a.norm()
            )));
        }
    }
    if cfg.r > MAX_VERIFY_R {
        return Err(CliError::config(format!(
            "invalid value for `r`: verify supports r <= {MAX_VERIFY_R}, got {}",
            cfg.r
        )));
    }
    Ok(())
}

fn verify_text(rep: &VerifyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "truncation: {}x{}", rep.trunc.d1(), rep.trunc.d2());
    for (name, f) in [
        ("closed_form", &rep.closed_form),
        ("generator", &rep.generator),
        ("finite_difference", &rep.finite_difference),
    ] {
        let _ = writeln!(
            s,
            "{name:<18} F11={} F12={} F22={}",
            fmt_f64(f.f11),
            fmt_f64(f.f12),
            fmt_f64(f.f22)
        );
    }
    let _ = writeln!(s, "max_discrepancy: {}", fmt_f64(rep.max_discrepancy));
    let _ = writeln!(s, "tolerance: {}", fmt_f64(rep.tolerance));
    let _ = writeln!(s, "status: {}", if rep.passed() { "pass" } else { "fail" });
    s
}

fn verify_json(cfg: &RunConfig, rep: &VerifyReport) -> String {
    let trace: Vec<Value> = rep
        .trace
        .iter()
        .map(|a| json!({ "d1": a.d1, "d2": a.d2, "edge_weight": json_f64(a.edge_weight) }))
        .collect();
    render_json(&json!({
        "config": config_json(cfg),
        "truncation": { "d1": rep.trunc.d1(), "d2": rep.trunc.d2() },
        "sizing_trace": trace,
        "closed_form": qfi_json(&rep.closed_form),
        "generator": qfi_json(&rep.generator),
        "finite_difference": qfi_json(&rep.finite_difference),
        "max_discrepancy": json_f64(rep.max_discrepancy),
        "tolerance": json_f64(rep.tolerance),
        "passed": rep.passed(),
    }))
}

/// Closed form vs generator vs finite differences on a truncated Fock space.
pub fn run_verify(cfg: &RunConfig, out: Option<&Path>, streams: &mut Streams<'_>) -> Result<(), CliError> {
    check_verify_range(cfg)?;
    let opts = VerifyOptions {
        levels: cfg.truncation,
        ..VerifyOptions::default()
    };
    let rep = verify_point(cfg.alpha1(), cfg.r, cfg.alpha2(), &opts).map_err(classify)?;
    let data = match cfg.output_format {
        OutputFormat::Csv => verify_text(&rep),
        OutputFormat::Json => verify_json(cfg, &rep),
    };
    emit(&data, out, streams)?;
    if !rep.passed() {
        return Err(CliError::new(
            exit::VERIFICATION_FAILED,
            format!(
                "verification failed: max discrepancy {} exceeds tolerance {}",
                fmt_f64(rep.max_discrepancy),
                fmt_f64(rep.tolerance)
            ),
        ));
    }
    Ok(())
}

fn scan_csv(res: &ScanResult) -> String {
    let mut s = String::with_capacity(200 * (res.rows.len() + 1));
    s.push_str(SCAN_CSV_HEADER);
    s.push('\n');
    for row in &res.rows {
        let fields = [
            row.theta1,
            row.theta2,
            row.qfi.f11,
            row.qfi.f12,
            row.qfi.f22,
            row.models[0],
            row.models[1],
            row.models[2],
            row.models[3],
        ];
        let line: Vec<String> = fields.into_iter().map(fmt_f64).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

fn scan_json(cfg: &RunConfig, res: &ScanResult, refined: &[(ModelKind, Refined)]) -> String {
    let (s1, s2) = res.grid.steps();
    let rows: Vec<Value> = res
        .rows
        .iter()
        .map(|row| {
            json!({
                "theta1": json_f64(row.theta1),
                "theta2": json_f64(row.theta2),
                "qfi": qfi_json(&row.qfi),
                "models": per_model(row.models.map(Some)),
            })
        })
        .collect();
    let mut argmax = Map::new();
    for &(kind, ref fine) in refined {
        let coarse = res.argmax[&kind];
        argmax.insert(
            kind.letter().into(),
            json!({
                "grid": {
                    "theta1": json_f64(coarse.theta1),
                    "theta2": json_f64(coarse.theta2),
                    "value": json_f64(coarse.value),
                },
                "refined": {
                    "theta1": json_f64(fine.theta1),
                    "theta2": json_f64(fine.theta2),
                    "value": json_f64(fine.value),
                    "converged": fine.converged,
                },
            }),
        );
    }
    render_json(&json!({
        "config": config_json(cfg),
        "grid": {
            "n1": json_f64(res.grid.n1()),
            "n2": json_f64(res.grid.n2()),
            "r": json_f64(res.grid.r()),
            "theta1_steps": s1,
            "theta2_steps": s2,
        },
        "rows": rows,
        "argmax": Value::Object(argmax),
    }))
}

fn scan_summary(res: &ScanResult, refined: &[(ModelKind, Refined)]) -> String {
    let mut s = String::new();
    for &(kind, ref fine) in refined {
        let coarse = res.argmax[&kind];
        let _ = writeln!(
            s,
            "model {kind}: grid max {} at (theta1={}, theta2={}); refined {} at (theta1={}, theta2={}){}",
            fmt_f64(coarse.value),
            fmt_f64(coarse.theta1),
            fmt_f64(coarse.theta2),
            fmt_f64(fine.value),
            fmt_f64(fine.theta1),
            fmt_f64(fine.theta2),
            if fine.converged { "" } else { " [iteration cap reached]" }
        );
    }
    s
}

/// Scans the amplitude phases at fixed photon numbers `|alpha1|^2`, `|alpha2|^2`.
pub fn run_scan_command(
    cfg: &RunConfig,
    steps: usize,
    out: Option<&Path>,
    streams: &mut Streams<'_>,
) -> Result<(), CliError> {
    let model = cfg.model.unwrap_or(ModelKind::ANuisance);
    let grid = ScanGrid::new(cfg.alpha1().norm_sqr(), cfg.alpha2().norm_sqr(), cfg.r, steps, steps, model)
        .map_err(classify)?;
    let res = run_scan(&grid).map_err(classify)?;
    let mut refined = Vec::with_capacity(ModelKind::ALL.len());
    for &kind in &ModelKind::ALL {
        let seed = res.argmax[&kind];
        let fine = refine_max(&grid.with_model(kind), (seed.theta1, seed.theta2)).map_err(classify)?;
        refined.push((kind, fine));
    }
    let data = match cfg.output_format {
        OutputFormat::Csv => scan_csv(&res),
        OutputFormat::Json => scan_json(cfg, &res, &refined),
    };
    emit(&data, out, streams)?;
    let summary = scan_summary(&res, &refined);
    if out.is_some() {
        streams
            .stdout
            .write_all(summary.as_bytes())
            .map_err(|e| CliError::io(format!("cannot write to stdout: {e}")))?;
    } else {
        streams.note(&summary);
    }
    if let Some(kind) = cfg.model {
        let best = res.argmax[&kind].value;
        if best.is_nan() || best <= 0.0 {
            return Err(no_information(kind, Some(best)));
        }
    }
    Ok(())
}
