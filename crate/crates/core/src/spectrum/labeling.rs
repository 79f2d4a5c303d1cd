use std::f64::consts::TAU;

use serde::Serialize;

use crate::device::Hamiltonian;
use crate::linalg::Eigen;
use crate::{Error, Result};

/// Overlap at or below which a label is considered unresolved.
pub const AMBIGUITY_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DressedState {
    pub label: Vec<usize>,
    pub eigenindex: usize,
    /// GHz.
    pub energy: f64,
    /// `|<bare|dressed>|^2`.
    pub overlap: f64,
}

/// Maximum-overlap assignment of bare occupation tuples to eigenstates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DressedLabeling {
    pub states: Vec<DressedState>,
}

impl DressedLabeling {
    pub fn new(h: &Hamiltonian, eig: &Eigen, labels: &[Vec<usize>]) -> Result<Self> {
        let mut states = Vec::with_capacity(labels.len());
        for label in labels {
            let i = h.basis.index(label).ok_or_else(|| {
                Error::InvalidParameter(format!("label {label:?} outside the truncation"))
            })?;
            let row = eig.vectors.row(i);
            let (k, amp) = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("non-empty basis");
            states.push(DressedState {
                label: label.clone(),
                eigenindex: k,
                energy: eig.values[k] / TAU,
                overlap: amp * amp,
            });
        }
        Ok(DressedLabeling { states })
    }

    pub fn get(&self, label: &[usize]) -> Option<&DressedState> {
        self.states.iter().find(|s| s.label == label)
    }

    /// Energy in GHz of a label known to be present.
    pub fn energy(&self, label: &[usize]) -> f64 {
        self.get(label).expect("label was requested").energy
    }

    /// Fails if any overlap is at or below the threshold or two labels claim one eigenstate.
    pub fn check(&self) -> Result<()> {
        for (n, s) in self.states.iter().enumerate() {
            let shared = self.states[..n]
                .iter()
                .any(|o| o.eigenindex == s.eigenindex);
            if s.overlap <= AMBIGUITY_THRESHOLD || shared {
                return Err(Error::AmbiguousLabeling {
                    label: s.label.clone(),
                    overlap: s.overlap,
                });
            }
        }
        Ok(())
    }
}
