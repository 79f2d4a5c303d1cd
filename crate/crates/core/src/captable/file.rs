//! TOML lookup-table format.
//!
//! ```toml
//! name = "transmon"
//! nodes = ["Q"]
//! ports = ["P"]
//!
//! [[dim]]
//! name = "pad_size"   # µm
//! low = 300.0
//! high = 420.0
//!
//! [[corner]]           # 2^n entries, index bit k = high value on dim k
//! index = 0
//! matrix = [[60.0, -1.0], [-1.0, 1.0]]   # fF, rows over nodes then ports
//! ```

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use super::{GeometryDim, GeometryLUT};
use crate::io::{line_at, parse_toml};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLut {
    name: String,
    nodes: Vec<String>,
    #[serde(default)]
    ports: Vec<String>,
    #[serde(rename = "dim")]
    dims: Vec<RawDim>,
    #[serde(rename = "corner")]
    corners: Vec<Spanned<RawCorner>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawDim {
    name: String,
    low: f64,
    high: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCorner {
    index: usize,
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct OutLut<'a> {
    name: &'a str,
    nodes: &'a [String],
    ports: &'a [String],
    #[serde(rename = "dim")]
    dims: Vec<RawDim>,
    #[serde(rename = "corner")]
    corners: Vec<RawCorner>,
}

impl GeometryLUT {
    pub fn from_toml_str(text: &str, file: &str) -> Result<Self> {
        let raw: RawLut = parse_toml(text, file)?;
        let n = raw.dims.len();
        let m = raw.nodes.len() + raw.ports.len();
        let at = |span: std::ops::Range<usize>, message: String| Error::Validation {
            file: file.to_string(),
            line: line_at(text, span.start),
            message,
        };
        if raw.corners.len() != 1 << n {
            return Err(Error::Validation {
                file: file.to_string(),
                line: 1,
                message: format!(
                    "{} corners for {n} dimensions, expected {}",
                    raw.corners.len(),
                    1usize << n
                ),
            });
        }
        let mut corners: Vec<Option<DMatrix<f64>>> = vec![None; 1 << n];
        for c in &raw.corners {
            let span = c.span();
            let c = c.get_ref();
            if c.index >= corners.len() || corners[c.index].is_some() {
                return Err(at(
                    span,
                    format!("corner index {} is out of range or repeated", c.index),
                ));
            }
            if c.matrix.len() != m || c.matrix.iter().any(|row| row.len() != m) {
                return Err(at(
                    span,
                    format!("corner {} must be a {m}x{m} matrix", c.index),
                ));
            }
            let mat = DMatrix::from_fn(m, m, |i, j| c.matrix[i][j]);
            let scale = mat.amax().max(f64::MIN_POSITIVE);
            if (&mat - mat.transpose()).amax() > super::SYMMETRY_TOL * scale {
                return Err(at(span, format!("corner {} is not symmetric", c.index)));
            }
            corners[c.index] = Some(mat);
        }
        let lut = GeometryLUT {
            name: raw.name,
            dims: raw
                .dims
                .into_iter()
                .map(|d| GeometryDim {
                    name: d.name,
                    low: d.low,
                    high: d.high,
                })
                .collect(),
            nodes: raw.nodes,
            ports: raw.ports,
            corner_capacitances: corners.into_iter().flatten().collect(),
        };
        lut.validate().map_err(|e| Error::Validation {
            file: file.to_string(),
            line: 1,
            message: e.to_string(),
        })?;
        Ok(lut)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn to_toml_string(&self) -> String {
        let out = OutLut {
            name: &self.name,
            nodes: &self.nodes,
            ports: &self.ports,
            dims: self
                .dims
                .iter()
                .map(|d| RawDim {
                    name: d.name.clone(),
                    low: d.low,
                    high: d.high,
                })
                .collect(),
            corners: self
                .corner_capacitances
                .iter()
                .enumerate()
                .map(|(index, c)| RawCorner {
                    index,
                    matrix: (0..c.nrows())
                        .map(|i| c.row(i).iter().copied().collect())
                        .collect(),
                })
                .collect(),
        };
        toml::to_string(&out).expect("lookup tables serialise")
    }
}
