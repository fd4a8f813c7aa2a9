//! On-disk formats: the carpet document and weight files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::carpet::{validate_spec, CarpetSpec, RawDigit, RawSpec, SpecError};
use crate::dimension::{Weights, WeightsError};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid carpet: {0}")]
    Spec(#[from] SpecError),
    #[error("invalid weights: {0}")]
    Weights(#[from] WeightsError),
}

fn plus() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigitEntry {
    pub i: i64,
    pub j: i64,
    #[serde(default = "plus")]
    pub sx: i64,
    #[serde(default = "plus")]
    pub sy: i64,
}

/// `{"n": 4, "m": 3, "digits": [{"i": 0, "j": 0, "sx": 1, "sy": -1}, ...]}`;
/// `sx` and `sy` default to `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub n: i64,
    pub m: i64,
    pub digits: Vec<DigitEntry>,
}

impl SpecDocument {
    pub fn from_spec(spec: &CarpetSpec) -> Self {
        SpecDocument {
            n: i64::from(spec.n()),
            m: i64::from(spec.m()),
            digits: spec
                .digits()
                .iter()
                .map(|d| DigitEntry {
                    i: i64::from(d.i),
                    j: i64::from(d.j),
                    sx: i64::from(d.sx.as_i8()),
                    sy: i64::from(d.sy.as_i8()),
                })
                .collect(),
        }
    }

    pub fn to_raw(&self) -> RawSpec {
        RawSpec {
            n: self.n,
            m: self.m,
            digits: self
                .digits
                .iter()
                .map(|d| RawDigit::new(d.i, d.j, d.sx, d.sy))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<CarpetSpec, SpecError> {
        validate_spec(&self.to_raw())
    }
}

pub fn parse_spec(text: &str) -> Result<CarpetSpec, DocError> {
    let doc: SpecDocument = serde_json::from_str(text)?;
    Ok(doc.validate()?)
}

pub fn spec_to_json(spec: &CarpetSpec) -> String {
    let mut s =
        serde_json::to_string_pretty(&SpecDocument::from_spec(spec)).expect("document serialises");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, DocError> {
    std::fs::read_to_string(path).map_err(|source| DocError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_spec(path: &Path) -> Result<CarpetSpec, DocError> {
    parse_spec(&read(path)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WeightsDocument {
    Bare(Vec<f64>),
    Object { p: Vec<f64> },
}

/// A JSON array of digit weights in canonical digit order, or `{"p": [...]}`.
pub fn parse_weights(spec: &CarpetSpec, text: &str) -> Result<Weights, DocError> {
    let p = match serde_json::from_str::<WeightsDocument>(text)? {
        WeightsDocument::Bare(p) | WeightsDocument::Object { p } => p,
    };
    Ok(Weights::new(spec, p)?)
}

pub fn load_weights(spec: &CarpetSpec, path: &Path) -> Result<Weights, DocError> {
    parse_weights(spec, &read(path)?)
}
