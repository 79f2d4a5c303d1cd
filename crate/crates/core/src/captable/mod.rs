//! Capacitance matrices from pre-simulated lookup tables.
//!
//! A [`GeometryLUT`] stores the Maxwell capacitance matrix of one element (transmon or coupler)
//! at the `2^n` corners of a box of `n` geometry dimensions. Inside the box the matrix is the
//! multilinear interpolant of the corners. Element blocks are stamped into a global matrix
//! ([`assemble`]), inverted into charging and coupling energies ([`energies_from_capacitance`]),
//! and mapped to exchange couplings ([`coupling_strengths`]). [`design_search`] inverts the whole
//! chain toward target couplings.
//!
//! Capacitances are in fF, dimensions in µm, energies in GHz and couplings in MHz.

mod assembly;
mod design;
mod file;
mod synthetic;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::{Error, Result};

pub use assembly::{
    assemble, coupling_strengths, energies_from_capacitance, exchange_coupling,
    AssembledCapacitance, CouplingStrengths, EnergySet, E2_OVER_H,
};
pub use design::{design_search, DesignProblem, DesignResult, DesignTargets};
pub use synthetic::{SyntheticCoupler, SyntheticPair, SyntheticTransmon};

/// Relative asymmetry tolerated in a corner matrix.
const SYMMETRY_TOL: f64 = 1e-9;

/// One geometry dimension of a LUT, µm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryDim {
    pub name: String,
    pub low: f64,
    pub high: f64,
}

/// Corner capacitance matrices of one element. Bit `k` of a corner index selects `high` on
/// axis `k`. Rows and columns run over `nodes` followed by `ports`: nodes belong to the element,
/// ports are nodes of neighbouring elements reached by its coupling pads.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryLUT {
    pub name: String,
    pub dims: Vec<GeometryDim>,
    pub nodes: Vec<String>,
    pub ports: Vec<String>,
    pub corner_capacitances: Vec<DMatrix<f64>>,
}

/// Interpolated capacitance of one element with its node labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitanceBlock {
    pub source: String,
    /// Dimension values the block was interpolated at.
    pub dims: Vec<f64>,
    pub nodes: Vec<String>,
    pub ports: Vec<String>,
    /// fF, over `nodes ++ ports`.
    pub matrix: DMatrix<f64>,
}

impl CapacitanceBlock {
    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.nodes.iter().chain(&self.ports)
    }

    /// Renames labels through `map`; labels not in `map` are kept.
    pub fn relabel(mut self, map: &[(&str, &str)]) -> Self {
        let rename = |l: &mut String| {
            if let Some((_, to)) = map.iter().find(|(from, _)| *from == l.as_str()) {
                *l = to.to_string();
            }
        };
        self.nodes.iter_mut().for_each(rename);
        self.ports.iter_mut().for_each(rename);
        self
    }
}

impl GeometryLUT {
    pub fn n_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn dim_names(&self) -> Vec<&str> {
        self.dims.iter().map(|d| d.name.as_str()).collect()
    }

    pub fn corner_low(&self) -> Vec<f64> {
        self.dims.iter().map(|d| d.low).collect()
    }

    pub fn corner_high(&self) -> Vec<f64> {
        self.dims.iter().map(|d| d.high).collect()
    }

    fn size(&self) -> usize {
        self.nodes.len() + self.ports.len()
    }

    /// Corner count, box, label and symmetry checks.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_dims();
        if n > 24 {
            return Err(Error::InvalidParameter(format!(
                "{}: {n} dimensions is too many for a corner table",
                self.name
            )));
        }
        if self.corner_capacitances.len() != 1 << n {
            return Err(Error::InvalidParameter(format!(
                "{}: {} corner matrices for {n} dimensions, expected {}",
                self.name,
                self.corner_capacitances.len(),
                1usize << n
            )));
        }
        for d in &self.dims {
            if !(d.low.is_finite() && d.high.is_finite() && d.high > d.low) {
                return Err(Error::InvalidParameter(format!(
                    "{}: dimension `{}` needs low < high",
                    self.name, d.name
                )));
            }
        }
        let mut labels: Vec<&String> = self.nodes.iter().chain(&self.ports).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) || self.nodes.is_empty() {
            return Err(Error::LabelMismatch(format!(
                "{}: node and port labels must be distinct and non-empty",
                self.name
            )));
        }
        let m = self.size();
        for (k, c) in self.corner_capacitances.iter().enumerate() {
            if c.nrows() != m || c.ncols() != m {
                return Err(Error::InvalidParameter(format!(
                    "{}: corner {k} is {}x{}, expected {m}x{m}",
                    self.name,
                    c.nrows(),
                    c.ncols()
                )));
            }
            let scale = c.amax().max(f64::MIN_POSITIVE);
            if (c - c.transpose()).amax() > SYMMETRY_TOL * scale || c.iter().any(|x| !x.is_finite())
            {
                return Err(Error::InvalidParameter(format!(
                    "{}: corner {k} is not symmetric",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Rows of corner matrices whose diagonal is smaller than the summed magnitude of the
    /// off-diagonal entries. Physical Maxwell matrices never trigger this; it is reported, not
    /// rejected.
    pub fn dominance_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, c) in self.corner_capacitances.iter().enumerate() {
            for i in 0..c.nrows() {
                let off: f64 = (0..c.ncols())
                    .filter(|&j| j != i)
                    .map(|j| c[(i, j)].abs())
                    .sum();
                if c[(i, i)] < off * (1.0 - 1e-12) {
                    let label = self
                        .nodes
                        .iter()
                        .chain(&self.ports)
                        .nth(i)
                        .map_or("?", |s| s.as_str());
                    out.push(format!(
                        "{}: corner {k}, row {label}: diagonal {} < {}",
                        self.name,
                        c[(i, i)],
                        off
                    ));
                }
            }
        }
        out
    }

    /// Normalised coordinates in `[0, 1]` per axis.
    fn unit(&self, dims: &[f64]) -> Result<Vec<f64>> {
        if dims.len() != self.n_dims() {
            return Err(Error::InvalidParameter(format!(
                "{}: {} dimension values for {} dimensions",
                self.name,
                dims.len(),
                self.n_dims()
            )));
        }
        self.dims
            .iter()
            .zip(dims)
            .map(|(d, &x)| {
                if !(d.low..=d.high).contains(&x) {
                    return Err(Error::OutOfRange {
                        dim: d.name.clone(),
                        value: x,
                        low: d.low,
                        high: d.high,
                    });
                }
                Ok((x - d.low) / (d.high - d.low))
            })
            .collect()
    }

    /// Multilinear interpolant at `dims`.
    pub fn interpolate(&self, dims: &[f64]) -> Result<CapacitanceBlock> {
        let u = self.unit(dims)?;
        let m = self.size();
        let mut c = DMatrix::zeros(m, m);
        for (k, corner) in self.corner_capacitances.iter().enumerate() {
            let w = corner_weight(&u, k, usize::MAX);
            if w != 0.0 {
                c += corner * w;
            }
        }
        Ok(self.block(dims, c))
    }

    /// Interpolant and its derivative along each axis, per µm.
    pub fn interpolate_with_gradient(
        &self,
        dims: &[f64],
    ) -> Result<(CapacitanceBlock, Vec<DMatrix<f64>>)> {
        let u = self.unit(dims)?;
        let m = self.size();
        let mut grad = vec![DMatrix::zeros(m, m); self.n_dims()];
        for (axis, g) in grad.iter_mut().enumerate() {
            let width = self.dims[axis].high - self.dims[axis].low;
            for (k, corner) in self.corner_capacitances.iter().enumerate() {
                let sign = if k >> axis & 1 == 1 { 1.0 } else { -1.0 };
                let w = corner_weight(&u, k, axis);
                if w != 0.0 {
                    *g += corner * (sign * w / width);
                }
            }
        }
        Ok((self.interpolate(dims)?, grad))
    }

    fn block(&self, dims: &[f64], matrix: DMatrix<f64>) -> CapacitanceBlock {
        CapacitanceBlock {
            source: self.name.clone(),
            dims: dims.to_vec(),
            nodes: self.nodes.clone(),
            ports: self.ports.clone(),
            matrix,
        }
    }
}

/// Weight of corner `k` at `u`, leaving out axis `skip`.
fn corner_weight(u: &[f64], k: usize, skip: usize) -> f64 {
    u.iter()
        .enumerate()
        .filter(|&(axis, _)| axis != skip)
        .map(|(axis, &t)| if k >> axis & 1 == 1 { t } else { 1.0 - t })
        .product()
}
