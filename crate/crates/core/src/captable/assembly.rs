use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::CapacitanceBlock;
use crate::{Error, Result};

const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
const PLANCK: f64 = 6.62607015e-34;

/// `e^2 / h` in GHz·fF.
pub const E2_OVER_H: f64 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / PLANCK * 1e15 * 1e-9;

/// Global Maxwell capacitance matrix over the nodes of a qubit–coupler–qubit unit.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledCapacitance {
    pub labels: Vec<String>,
    /// fF.
    pub matrix: DMatrix<f64>,
    /// LUT name and dimension values of each stamped block.
    pub provenance: Vec<(String, Vec<f64>)>,
}

impl AssembledCapacitance {
    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::LabelMismatch(format!("no node `{label}`")))
    }

    /// Maxwell entry between two nodes, fF.
    pub fn get(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.matrix[(self.index(a)?, self.index(b)?)])
    }
}

/// Stamps three element blocks into one matrix ordered `q_i`, `coupler`, `q_j`. Shared entries
/// add, so each port's self term joins the diagonal of the node it lands on. Entries between
/// nodes that share no block stay zero.
pub fn assemble(
    q_i: &CapacitanceBlock,
    coupler: &CapacitanceBlock,
    q_j: &CapacitanceBlock,
) -> Result<AssembledCapacitance> {
    let blocks = [q_i, coupler, q_j];
    let labels: Vec<String> = blocks
        .iter()
        .flat_map(|b| b.nodes.iter().cloned())
        .collect();
    let mut sorted: Vec<&String> = labels.iter().collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::LabelMismatch(format!(
            "node `{}` is owned by two blocks",
            w[0]
        )));
    }
    for b in blocks {
        if b.matrix.nrows() != b.nodes.len() + b.ports.len() {
            return Err(Error::LabelMismatch(format!(
                "{}: matrix size does not match its labels",
                b.source
            )));
        }
        if let Some(p) = b
            .ports
            .iter()
            .find(|p| b.nodes.contains(p) || !labels.contains(p))
        {
            return Err(Error::LabelMismatch(format!(
                "{}: port `{p}` matches no node of another block",
                b.source
            )));
        }
    }

    let n = labels.len();
    let mut matrix = DMatrix::zeros(n, n);
    for b in blocks {
        let map: Vec<usize> = b
            .labels()
            .map(|l| labels.iter().position(|g| g == l).unwrap())
            .collect();
        for (i, &gi) in map.iter().enumerate() {
            for (j, &gj) in map.iter().enumerate() {
                matrix[(gi, gj)] += b.matrix[(i, j)];
            }
        }
    }
    if (0..n).any(|i| matrix[(i, i)] <= 0.0) {
        return Err(Error::InvalidParameter(
            "assembled capacitance has a non-positive diagonal".into(),
        ));
    }
    Ok(AssembledCapacitance {
        labels,
        matrix,
        provenance: blocks
            .iter()
            .map(|b| (b.source.clone(), b.dims.clone()))
            .collect(),
    })
}

/// Charging and coupling energies from the inverse capacitance matrix, GHz:
/// `E_C,i = (e^2/2) (C^-1)_ii` and `E_ij = e^2 (C^-1)_ij`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySet {
    pub labels: Vec<String>,
    pub e_c: Vec<f64>,
    pub e_j: Vec<f64>,
    /// Zero diagonal.
    pub coupling: Vec<Vec<f64>>,
}

impl EnergySet {
    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::LabelMismatch(format!("no node `{label}`")))
    }

    pub fn e_c_of(&self, label: &str) -> Result<f64> {
        Ok(self.e_c[self.index(label)?])
    }

    pub fn coupling_between(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.coupling[self.index(a)?][self.index(b)?])
    }

    /// `E_J / E_C` of a node.
    pub fn ratio(&self, label: &str) -> Result<f64> {
        let i = self.index(label)?;
        Ok(self.e_j[i] / self.e_c[i])
    }
}

/// `josephson` maps every node to its Josephson energy in GHz.
pub fn energies_from_capacitance(
    c: &AssembledCapacitance,
    josephson: &BTreeMap<String, f64>,
) -> Result<EnergySet> {
    let e_j = c
        .labels
        .iter()
        .map(|l| match josephson.get(l) {
            Some(&e) if e > 0.0 => Ok(e),
            Some(&e) => Err(Error::InvalidParameter(format!(
                "E_J of `{l}` is {e}, must be positive"
            ))),
            None => Err(Error::InvalidParameter(format!(
                "no Josephson energy for node `{l}`"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    // a Maxwell matrix is positive definite; anything else has no physical inverse
    let inv = c
        .matrix
        .clone()
        .cholesky()
        .ok_or(Error::SingularMatrix)?
        .inverse();
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    let n = c.labels.len();
    Ok(EnergySet {
        labels: c.labels.clone(),
        e_c: (0..n).map(|i| 0.5 * E2_OVER_H * inv[(i, i)]).collect(),
        e_j,
        coupling: (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0.0 } else { E2_OVER_H * inv[(i, j)] })
                    .collect()
            })
            .collect(),
    })
}

/// `g = (E_ab / sqrt 2) (E_Ja/E_Ca · E_Jb/E_Cb)^(1/4)` in the units of `e_ab`; ratios must be
/// positive.
pub fn exchange_coupling(e_ab: f64, ratio_a: f64, ratio_b: f64) -> f64 {
    e_ab / std::f64::consts::SQRT_2 * (ratio_a * ratio_b).powf(0.25)
}

/// Couplings of one tunable-coupler unit, MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingStrengths {
    pub g_qq: f64,
    pub g_qc_i: f64,
    pub g_qc_j: f64,
}

pub fn coupling_strengths(
    e: &EnergySet,
    q_i: &str,
    coupler: &str,
    q_j: &str,
) -> Result<CouplingStrengths> {
    let (ri, rc, rj) = (e.ratio(q_i)?, e.ratio(coupler)?, e.ratio(q_j)?);
    Ok(CouplingStrengths {
        g_qq: 1e3 * exchange_coupling(e.coupling_between(q_i, q_j)?, ri, rj),
        g_qc_i: 1e3 * exchange_coupling(e.coupling_between(q_i, coupler)?, ri, rc),
        g_qc_j: 1e3 * exchange_coupling(e.coupling_between(q_j, coupler)?, rj, rc),
    })
}
