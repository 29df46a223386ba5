//! On-disk system documents.
//!
//! A document is a JSON object with the keys `ambient_dim`, `field_tag`,
//! `kind`, `payload`, `schema_version` and (for fusion systems only)
//! `weights`. The payload is a list of matrices, each a list of rows; complex
//! entries are `[re, im]` pairs.
//!
//! - `vector_frame`: one `n × m` matrix whose columns are the frame vectors.
//! - `fusion_system`: one `n × k_i` matrix per member whose columns span `W_i`.
//! - `operator`: one `n × n` matrix.
//!
//! [`SystemDocument::to_canonical_string`] writes keys in sorted order and
//! every float as `{:.16e}` (17 significant digits), so parsing and writing a
//! canonical document reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{FrameError, Result};
use crate::frames::VectorFrame;
use crate::fusion::{FusionSystem, Member};
use crate::numkit::{Field, Mat, Tolerances, Vector, C64};
use crate::subspace::Subspace;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    VectorFrame,
    FusionSystem,
    Operator,
}

impl DocKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocKind::VectorFrame => "vector_frame",
            DocKind::FusionSystem => "fusion_system",
            DocKind::Operator => "operator",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    ambient_dim: usize,
    field_tag: Field,
    kind: DocKind,
    payload: Vec<Vec<Vec<Entry>>>,
    schema_version: u32,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

/// A validated document.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDocument {
    pub ambient_dim: usize,
    pub field_tag: Field,
    pub kind: DocKind,
    pub payload: Vec<Mat>,
    pub weights: Option<Vec<f64>>,
}

/// What a document describes.
#[derive(Debug, Clone)]
pub enum Loaded {
    Frame(VectorFrame),
    Fusion(FusionSystem),
    Operator(Mat),
}

fn parse_err(msg: impl Into<String>) -> FrameError {
    FrameError::Parse(msg.into())
}

fn field_of(mats: &[Mat]) -> Field {
    mats.iter().fold(Field::Real, |f, m| f.join(Field::detect(m)))
}

impl SystemDocument {
    pub fn from_frame(frame: &VectorFrame) -> Self {
        let payload = vec![frame.vectors().clone()];
        SystemDocument {
            ambient_dim: frame.ambient_dim(),
            field_tag: field_of(&payload),
            kind: DocKind::VectorFrame,
            payload,
            weights: None,
        }
    }

    pub fn from_fusion(system: &FusionSystem) -> Self {
        let payload: Vec<Mat> = system.members().iter().map(|m| m.subspace.basis().clone()).collect();
        SystemDocument {
            ambient_dim: system.ambient_dim(),
            field_tag: field_of(&payload),
            kind: DocKind::FusionSystem,
            payload,
            weights: Some(system.weights()),
        }
    }

    pub fn from_operator(k: &Mat) -> Self {
        let payload = vec![k.clone()];
        SystemDocument {
            ambient_dim: k.nrows(),
            field_tag: field_of(&payload),
            kind: DocKind::Operator,
            payload,
            weights: None,
        }
    }

    /// Raises the field tag to at least `field`.
    pub fn with_field(mut self, field: Field) -> Self {
        self.field_tag = self.field_tag.join(field);
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(parse_err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let n = raw.ambient_dim;
        if n == 0 {
            return Err(parse_err("ambient_dim must be positive"));
        }
        let mut payload = Vec::with_capacity(raw.payload.len());
        for (idx, rows) in raw.payload.iter().enumerate() {
            payload.push(matrix_from_rows(rows, n, raw.field_tag, idx)?);
        }
        let doc = SystemDocument {
            ambient_dim: n,
            field_tag: raw.field_tag,
            kind: raw.kind,
            payload,
            weights: raw.weights,
        };
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<()> {
        let n = self.ambient_dim;
        match self.kind {
            DocKind::VectorFrame | DocKind::Operator => {
                if self.payload.len() != 1 {
                    return Err(parse_err(format!(
                        "{} documents hold exactly one matrix, found {}",
                        self.kind.as_str(),
                        self.payload.len()
                    )));
                }
                if self.weights.is_some() {
                    return Err(parse_err("weights are only allowed for fusion_system documents"));
                }
                let m = &self.payload[0];
                if self.kind == DocKind::Operator && m.ncols() != n {
                    return Err(FrameError::DimensionMismatch(format!(
                        "operator must be {n}x{n}, got {}x{}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                if self.kind == DocKind::VectorFrame && m.ncols() == 0 {
                    return Err(parse_err("vector_frame needs at least one vector"));
                }
            }
            DocKind::FusionSystem => {
                let weights = self
                    .weights
                    .as_ref()
                    .ok_or_else(|| parse_err("fusion_system documents need weights"))?;
                if weights.len() != self.payload.len() {
                    return Err(FrameError::DimensionMismatch(format!(
                        "{} weights for {} members",
                        weights.len(),
                        self.payload.len()
                    )));
                }
                if self.payload.is_empty() {
                    return Err(parse_err("fusion_system needs at least one member"));
                }
                for (index, &value) in weights.iter().enumerate() {
                    if !(value.is_finite() && value > 0.0) {
                        return Err(FrameError::InvalidWeight { index, value });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FrameError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical_string()).map_err(|e| FrameError::Io(format!("{}: {e}", path.display())))
    }

    pub fn interpret(&self, tol: &Tolerances) -> Result<Loaded> {
        match self.kind {
            DocKind::VectorFrame => Ok(Loaded::Frame(VectorFrame::new(self.payload[0].clone())?)),
            DocKind::Operator => Ok(Loaded::Operator(self.payload[0].clone())),
            DocKind::FusionSystem => {
                let weights = self.weights.as_deref().unwrap_or_default();
                let members = self
                    .payload
                    .iter()
                    .zip(weights)
                    .map(|(m, &weight)| {
                        Ok(Member {
                            subspace: Subspace::span(m, tol)?,
                            weight,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Loaded::Fusion(FusionSystem::new(members)?))
            }
        }
    }

    pub fn to_canonical_string(&self) -> String {
        let complex = self.field_tag == Field::Complex;
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"ambient_dim\": {},", self.ambient_dim);
        let _ = writeln!(out, "  \"field_tag\": \"{}\",", self.field_tag.as_str());
        let _ = writeln!(out, "  \"kind\": \"{}\",", self.kind.as_str());
        out.push_str("  \"payload\": [");
        for (idx, m) in self.payload.iter().enumerate() {
            out.push_str(if idx == 0 { "\n    [" } else { ",\n    [" });
            for r in 0..m.nrows() {
                out.push_str(if r == 0 { "\n      [" } else { ",\n      [" });
                for col in 0..m.ncols() {
                    if col > 0 {
                        out.push_str(", ");
                    }
                    let z = m[(r, col)];
                    if complex {
                        let _ = write!(out, "[{}, {}]", float(z.re), float(z.im));
                    } else {
                        out.push_str(&float(z.re));
                    }
                }
                out.push(']');
            }
            out.push_str(if m.nrows() == 0 { "]" } else { "\n    ]" });
        }
        out.push_str(if self.payload.is_empty() { "],\n" } else { "\n  ],\n" });
        let _ = write!(out, "  \"schema_version\": {SCHEMA_VERSION}");
        if let Some(w) = &self.weights {
            let list: Vec<String> = w.iter().map(|&x| float(x)).collect();
            let _ = write!(out, ",\n  \"weights\": [{}]", list.join(", "));
        }
        out.push_str("\n}\n");
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn matrix_from_rows(rows: &[Vec<Entry>], n: usize, field: Field, idx: usize) -> Result<Mat> {
    if rows.len() != n {
        return Err(FrameError::DimensionMismatch(format!(
            "payload matrix {idx} has {} rows, ambient_dim is {n}",
            rows.len()
        )));
    }
    let cols = rows[0].len();
    let mut m = Mat::zeros(n, cols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(parse_err(format!("payload matrix {idx} is ragged at row {r}")));
        }
        for (col, e) in row.iter().enumerate() {
            m[(r, col)] = entry(*e, field)?;
        }
    }
    Ok(m)
}

fn entry(e: Entry, field: Field) -> Result<C64> {
    let z = match (e, field) {
        (Entry::Real(x), _) => C64::new(x, 0.0),
        (Entry::Pair([re, im]), Field::Complex) => C64::new(re, im),
        (Entry::Pair(_), Field::Real) => return Err(parse_err("complex entry in a real document")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(FrameError::NonFinite)
    }
}

/// Signal file: a JSON array of numbers or of `[re, im]` pairs.
pub fn parse_signal(text: &str) -> Result<Vector> {
    let entries: Vec<Entry> = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    if entries.is_empty() {
        return Err(FrameError::EmptyInput("signal has no entries"));
    }
    let values = entries
        .into_iter()
        .map(|e| entry(e, Field::Complex))
        .collect::<Result<Vec<_>>>()?;
    Ok(Vector::from_vec(values))
}

pub fn load_signal(path: &Path) -> Result<Vector> {
    let text = std::fs::read_to_string(path).map_err(|e| FrameError::Io(format!("{}: {e}", path.display())))?;
    parse_signal(&text)
}
