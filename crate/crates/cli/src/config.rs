//! Run configuration: an optional JSON document, overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use mzi_qfi::{ModelKind, C64};
use serde_json::{Map, Value};

use crate::exit::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha1: (f64, f64),
    pub alpha2: (f64, f64),
    pub r: f64,
    pub model: Option<ModelKind>,
    pub truncation: Option<usize>,
    pub repetitions: u64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha1: (0.0, 0.0),
            alpha2: (0.0, 0.0),
            r: 0.0,
            model: None,
            truncation: None,
            repetitions: 1,
            output_format: OutputFormat::Csv,
        }
    }
}

/// Flag values; `None` leaves the file (or default) value in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha1_re: Option<f64>,
    pub alpha1_im: Option<f64>,
    pub alpha2_re: Option<f64>,
    pub alpha2_im: Option<f64>,
    pub r: Option<f64>,
    pub model: Option<String>,
    pub trunc: Option<usize>,
    pub nu: Option<u64>,
    pub format: Option<String>,
    pub config: Option<PathBuf>,
}

fn bad(key: &str, why: impl std::fmt::Display) -> CliError {
    CliError::config(format!("invalid value for `{key}`: {why}"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| bad(key, "expected a number"))
}

fn as_pair(key: &str, v: &Value) -> Result<(f64, f64), CliError> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok((as_f64(key, re)?, as_f64(key, im)?)),
        _ => Err(bad(key, "expected [re, im]")),
    }
}

fn as_positive_int(key: &str, v: &Value) -> Result<u64, CliError> {
    v.as_u64()
        .filter(|&n| n >= 1)
        .ok_or_else(|| bad(key, "expected a positive integer"))
}

fn parse_model(key: &str, s: &str) -> Result<ModelKind, CliError> {
    ModelKind::from_letter(s).ok_or_else(|| bad(key, format!("expected one of a, b, c, d; got `{s}`")))
}

fn parse_format(key: &str, s: &str) -> Result<OutputFormat, CliError> {
    OutputFormat::parse(s).ok_or_else(|| bad(key, format!("expected csv or json; got `{s}`")))
}

impl RunConfig {
    /// Parses a JSON config document. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| CliError::config(format!("config is not valid JSON: {e}")))?;
        let obj: &Map<String, Value> = doc
            .as_object()
            .ok_or_else(|| CliError::config("config must be a JSON object"))?;
        let mut cfg = RunConfig::default();
        for (key, v) in obj {
            match key.as_str() {
                "alpha1" => cfg.alpha1 = as_pair(key, v)?,
                "alpha2" => cfg.alpha2 = as_pair(key, v)?,
                "r" => cfg.r = as_f64(key, v)?,
                "model" => {
                    cfg.model = match v {
                        Value::Null => None,
                        Value::String(s) => Some(parse_model(key, s)?),
                        _ => return Err(bad(key, "expected a string")),
                    }
                }
                "truncation" => {
                    cfg.truncation = match v {
                        Value::Null => None,
                        _ => Some(as_positive_int(key, v)? as usize),
                    }
                }
                "repetitions" => cfg.repetitions = as_positive_int(key, v)?,
                "output_format" => {
                    let s = v.as_str().ok_or_else(|| bad(key, "expected a string"))?;
                    cfg.output_format = parse_format(key, s)?;
                }
                other => return Err(CliError::config(format!("unknown config key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Loads the file named by `--config` (if any), applies flags, validates.
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &flags.config {
            Some(path) => Self::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = flags.alpha1_re {
            cfg.alpha1.0 = v;
        }
        if let Some(v) = flags.alpha1_im {
            cfg.alpha1.1 = v;
        }
        if let Some(v) = flags.alpha2_re {
            cfg.alpha2.0 = v;
        }
        if let Some(v) = flags.alpha2_im {
            cfg.alpha2.1 = v;
        }
        if let Some(v) = flags.r {
            cfg.r = v;
        }
        if let Some(s) = &flags.model {
            cfg.model = Some(parse_model("model", s)?);
        }
        if let Some(d) = flags.trunc {
            cfg.truncation = Some(d);
        }
        if let Some(nu) = flags.nu {
            cfg.repetitions = nu;
        }
        if let Some(s) = &flags.format {
            cfg.output_format = parse_format("format", s)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(bad(key, "must be finite"))
            }
        };
        finite("alpha1", self.alpha1.0)?;
        finite("alpha1", self.alpha1.1)?;
        finite("alpha2", self.alpha2.0)?;
        finite("alpha2", self.alpha2.1)?;
        finite("r", self.r)?;
        if self.r < 0.0 {
            return Err(bad("r", "squeeze parameter must be >= 0"));
        }
        if let Some(d) = self.truncation {
            if d < 2 {
                return Err(bad("truncation", "need at least 2 Fock levels"));
            }
        }
        if self.repetitions < 1 {
            return Err(bad("repetitions", "must be >= 1"));
        }
        Ok(())
    }

    pub fn alpha1(&self) -> C64 {
        C64::new(self.alpha1.0, self.alpha1.1)
    }

    pub fn alpha2(&self) -> C64 {
        C64::new(self.alpha2.0, self.alpha2.1)
    }
}
