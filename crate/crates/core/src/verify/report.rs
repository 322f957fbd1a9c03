//! Serialized identity reports.
//!
//! Both formats keep the field order `identity_id, samples, max_residual,
//! tolerance, passed, witness` and write floats with 17 significant digits.
//! Non-finite residuals (a computation error) are written as `inf`/`nan`.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use thiserror::Error;

use super::IdentityId;

/// Outcome of one identity over its samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub samples: usize,
    #[serde(with = "float17")]
    pub max_residual: f64,
    #[serde(with = "float17")]
    pub tolerance: f64,
    pub passed: bool,
    #[serde(with = "witness17")]
    pub witness: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

#[derive(Debug, Error)]
pub enum ReportParseError {
    #[error("report line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub const CSV_HEADER: &str = "identity_id,samples,max_residual,tolerance,passed,witness";

/// A float with 17 significant digits, or `inf`/`-inf`/`nan`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

pub fn serialize(reports: &[IdentityReport], format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Csv => to_csv(reports).into_bytes(),
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(reports).expect("reports serialize");
            out.push(b'\n');
            out
        }
    }
}

pub fn parse(bytes: &[u8], format: ReportFormat) -> Result<Vec<IdentityReport>, ReportParseError> {
    match format {
        ReportFormat::Csv => from_csv(&String::from_utf8_lossy(bytes)),
        ReportFormat::Json => Ok(serde_json::from_slice(bytes)?),
    }
}

fn to_csv(reports: &[IdentityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let witness = r
            .witness
            .as_ref()
            .map(|w| w.iter().map(|&v| format_f64(v)).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.identity_id,
            r.samples,
            format_f64(r.max_residual),
            format_f64(r.tolerance),
            r.passed,
            witness
        ));
    }
    out
}

fn from_csv(text: &str) -> Result<Vec<IdentityReport>, ReportParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(ReportParseError::Csv { line: 1, message: "missing header".into() }),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| ReportParseError::Csv { line: i + 1, message: message.into() };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(err("expected 6 fields"));
        }
        let witness = if f[5].is_empty() {
            None
        } else {
            Some(
                f[5].split(';')
                    .map(|s| parse_f64(s).ok_or_else(|| err("bad witness value")))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        };
        out.push(IdentityReport {
            identity_id: f[0].parse().map_err(|_| err("unknown identity"))?,
            samples: f[1].parse().map_err(|_| err("bad sample count"))?,
            max_residual: parse_f64(f[2]).ok_or_else(|| err("bad residual"))?,
            tolerance: parse_f64(f[3]).ok_or_else(|| err("bad tolerance"))?,
            passed: f[4].parse().map_err(|_| err("bad passed flag"))?,
            witness,
        });
    }
    Ok(out)
}

fn raw(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { format_f64(v) } else { format!("\"{}\"", format_f64(v)) };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrText {
    Num(f64),
    Text(String),
}

impl NumOrText {
    fn into_f64<E: de::Error>(self) -> Result<f64, E> {
        match self {
            NumOrText::Num(v) => Ok(v),
            NumOrText::Text(s) => parse_f64(&s).ok_or_else(|| E::custom(format!("bad float `{s}`"))),
        }
    }
}

mod float17 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        raw(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        NumOrText::deserialize(d)?.into_f64()
    }
}

mod witness17 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(w) => w.iter().map(|&x| raw(x)).collect::<Vec<_>>().serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Option::<Vec<NumOrText>>::deserialize(d)?
            .map(|w| w.into_iter().map(NumOrText::into_f64).collect())
            .transpose()
    }
}
