//! Number formatting and report serialization.
//!
//! Every floating-point value is printed with 17 significant digits so that
//! it parses back to the same `f64`.

use std::str::FromStr;

use mzi_qfi::QfiMatrix;
use serde_json::{json, Map, Number, Value};

use crate::config::RunConfig;

pub const SCAN_CSV_HEADER: &str = "theta1,theta2,F11,F12,F22,Fa,Fb,Fc,Fd";
pub const QFI_CSV_HEADER: &str = "F11,F12,F22,Fa,Fb,Fc,Fd,CRBa,CRBb,CRBc,CRBd";

/// Round-trip decimal form with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number that keeps the 17-digit text; non-finite values become `null`.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&fmt_f64(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn json_opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, json_f64)
}

pub fn qfi_json(f: &QfiMatrix) -> Value {
    json!({ "f11": json_f64(f.f11), "f12": json_f64(f.f12), "f22": json_f64(f.f22) })
}

pub fn config_json(cfg: &RunConfig) -> Value {
    json!({
        "alpha1": [json_f64(cfg.alpha1.0), json_f64(cfg.alpha1.1)],
        "alpha2": [json_f64(cfg.alpha2.0), json_f64(cfg.alpha2.1)],
        "r": json_f64(cfg.r),
        "model": cfg.model.map_or(Value::Null, |m| Value::String(m.letter().into())),
        "truncation": cfg.truncation.map_or(Value::Null, |d| Value::from(d as u64)),
        "repetitions": cfg.repetitions,
        "output_format": cfg.output_format.as_str(),
    })
}

/// `{"a": .., "b": .., "c": .., "d": ..}` keyed by model letter.
pub fn per_model(values: [Option<f64>; 4]) -> Value {
    let mut m = Map::new();
    for (letter, v) in ["a", "b", "c", "d"].iter().zip(values) {
        m.insert((*letter).into(), json_opt(v));
    }
    Value::Object(m)
}

/// Pretty JSON with a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn csv_field(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}
