use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::graph::DeviceGraph;
use crate::linalg::Eigen;
use crate::{Error, Result};

/// Default cap on the truncated Hilbert-space dimension (3 levels on 5 modes).
pub const DEFAULT_DIMENSION_CAP: usize = 243;

/// Mixed-radix product basis; mode 0 is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub dims: Vec<usize>,
}

impl Basis {
    pub fn new(dims: Vec<usize>) -> Self {
        Basis { dims }
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    /// Index of an occupation tuple, or `None` if any occupation exceeds the truncation.
    pub fn index(&self, occ: &[usize]) -> Option<usize> {
        if occ.len() != self.dims.len() {
            return None;
        }
        let mut idx = 0;
        for (&n, &d) in occ.iter().zip(&self.dims) {
            if n >= d {
                return None;
            }
            idx = idx * d + n;
        }
        Some(idx)
    }

    pub fn occupations(&self, mut idx: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            occ[k] = idx % d;
            idx /= d;
        }
        occ
    }

    /// Ground state with `n` excitations in `mode` (other modes empty).
    pub fn single(&self, mode: usize, n: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        occ[mode] = n;
        occ
    }
}

/// Truncated multi-mode Hamiltonian in angular units (rad/ns).
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub basis: Basis,
    pub matrix: DMatrix<f64>,
}

impl Hamiltonian {
    pub fn eigen(&self) -> Eigen {
        Eigen::new(&self.matrix)
    }
}

impl DeviceGraph {
    /// Hamiltonian with each mode at the given frequency (GHz, in mode order).
    pub fn hamiltonian(&self, frequencies: &[f64]) -> Result<Hamiltonian> {
        self.hamiltonian_capped(frequencies, DEFAULT_DIMENSION_CAP)
    }

    /// Every mode is a Kerr oscillator `w n + (alpha/2) n (n - 1)`; every coupling is the full
    /// quadrature product `g (a + a^dag)(b + b^dag)` including counter-rotating terms.
    pub fn hamiltonian_capped(&self, frequencies: &[f64], cap: usize) -> Result<Hamiltonian> {
        if frequencies.len() != self.modes.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} mode frequencies, got {}",
                self.modes.len(),
                frequencies.len()
            )));
        }
        let basis = Basis::new(self.modes.iter().map(|m| m.n_levels).collect());
        let dim = basis.size();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let mut h = DMatrix::zeros(dim, dim);
        let occs: Vec<Vec<usize>> = (0..dim).map(|i| basis.occupations(i)).collect();

        for (i, occ) in occs.iter().enumerate() {
            let mut e = 0.0;
            for (k, m) in self.modes.iter().enumerate() {
                let n = occ[k] as f64;
                e += frequencies[k] * n + 0.5 * m.anharmonicity * n * (n - 1.0);
            }
            h[(i, i)] = TAU * e;
        }

        for (a, b, g_mhz) in self.pair_couplings() {
            let g = TAU * g_mhz * 1e-3;
            for (i, occ) in occs.iter().enumerate() {
                // (a + a^dag)(b + b^dag)|occ>, only the upper-triangle partner is stored twice
                for da in [-1i64, 1] {
                    for db in [-1i64, 1] {
                        let na = occ[a] as i64 + da;
                        let nb = occ[b] as i64 + db;
                        if na < 0 || nb < 0 {
                            continue;
                        }
                        let mut target = occ.clone();
                        target[a] = na as usize;
                        target[b] = nb as usize;
                        let Some(j) = basis.index(&target) else {
                            continue;
                        };
                        let amp_a = (occ[a].max(na as usize) as f64).sqrt();
                        let amp_b = (occ[b].max(nb as usize) as f64).sqrt();
                        h[(j, i)] += g * amp_a * amp_b;
                    }
                }
            }
        }
        Ok(Hamiltonian { basis, matrix: h })
    }
}
