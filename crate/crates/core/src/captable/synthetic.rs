//! Closed-form stand-ins for finite-element capacitance simulations.
//!
//! Each element's capacitances are multilinear in the normalised dimensions plus an optional
//! quadratic bow (`curvature`) that the corner table cannot represent. Corner tables sampled
//! from these functions play the role of the pre-simulated lookup tables; the functions
//! themselves are the ground truth they are compared against.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GeometryDim, GeometryLUT};

fn dim(name: &str, low: f64, high: f64) -> GeometryDim {
    GeometryDim {
        name: name.into(),
        low,
        high,
    }
}

fn unit(dims: &[GeometryDim], x: &[f64]) -> Vec<f64> {
    dims.iter()
        .zip(x)
        .map(|(d, &v)| (v - d.low) / (d.high - d.low))
        .collect()
}

fn corner_point(dims: &[GeometryDim], k: usize) -> Vec<f64> {
    dims.iter()
        .enumerate()
        .map(|(a, d)| if k >> a & 1 == 1 { d.high } else { d.low })
        .collect()
}

/// Multiplies every entry by `1 + p r` with `r` uniform in `[-1, 1]`, keeping symmetry.
fn perturb(c: &mut DMatrix<f64>, p: f64, rng: &mut ChaCha8Rng) {
    for i in 0..c.nrows() {
        for j in i..c.ncols() {
            let f = 1.0 + p * rng.random_range(-1.0..=1.0);
            c[(i, j)] *= f;
            if i != j {
                c[(j, i)] *= f;
            }
        }
    }
}

fn sample(
    name: &str,
    dims: &[GeometryDim],
    nodes: Vec<String>,
    ports: Vec<String>,
    f: impl Fn(&[f64]) -> DMatrix<f64>,
    perturbation: f64,
    seed: u64,
) -> GeometryLUT {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corners = (0..1usize << dims.len())
        .map(|k| {
            let mut c = f(&corner_point(dims, k));
            if perturbation > 0.0 {
                perturb(&mut c, perturbation, &mut rng);
            }
            c
        })
        .collect();
    GeometryLUT {
        name: name.into(),
        dims: dims.to_vec(),
        nodes,
        ports,
        corner_capacitances: corners,
    }
}

/// Single-island transmon with one coupling pad toward a coupler. Seven dimensions: the main
/// pad sets the capacitance to ground, the coupler-pad width and length set the mutual
/// capacitance, and two more pads (readout and a second coupler) only load the island.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTransmon {
    pub dims: Vec<GeometryDim>,
    /// Relative bow of each capacitance at the centre of its axis.
    pub curvature: f64,
}

impl Default for SyntheticTransmon {
    fn default() -> Self {
        SyntheticTransmon {
            dims: vec![
                dim("pad_size", 300.0, 420.0),
                dim("cpl_width", 10.0, 40.0),
                dim("cpl_length", 50.0, 150.0),
                dim("ro_width", 10.0, 40.0),
                dim("ro_length", 50.0, 150.0),
                dim("aux_width", 10.0, 40.0),
                dim("aux_length", 50.0, 150.0),
            ],
            curvature: 0.0,
        }
    }
}

impl SyntheticTransmon {
    /// `(C_ground, C_pad)` in fF.
    pub fn capacitances(&self, x: &[f64]) -> (f64, f64) {
        let u = unit(&self.dims, x);
        let bow = |t: f64| self.curvature * 4.0 * t * (1.0 - t);
        let ground = (52.0 + 20.0 * u[0]) * (1.0 + bow(u[0]))
            + 2.0 * u[3]
            + 1.5 * u[4]
            + 1.5 * u[3] * u[4]
            + u[5]
            + u[6]
            + 0.5 * u[5] * u[6];
        let pad = (0.8 + 2.4 * u[1] + 1.0 * u[2] + 1.2 * u[1] * u[2]) * (1.0 + bow(u[1]));
        (ground, pad)
    }

    /// Maxwell matrix over `[island, coupler port]`.
    pub fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let (g, p) = self.capacitances(x);
        DMatrix::from_row_slice(2, 2, &[g + p, -p, -p, p])
    }

    pub fn lut(&self, island: &str, port: &str, perturbation: f64, seed: u64) -> GeometryLUT {
        sample(
            island,
            &self.dims,
            vec![island.into()],
            vec![port.into()],
            |x| self.matrix(x),
            perturbation,
            seed,
        )
    }

    pub fn centre(&self) -> Vec<f64> {
        self.dims.iter().map(|d| 0.5 * (d.low + d.high)).collect()
    }
}

/// Coupler island with a shared coupling pad that also couples its two qubits directly.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCoupler {
    pub dims: Vec<GeometryDim>,
    pub curvature: f64,
}

impl Default for SyntheticCoupler {
    fn default() -> Self {
        SyntheticCoupler {
            dims: vec![
                dim("island_size", 150.0, 300.0),
                dim("arm_length", 100.0, 300.0),
                dim("pad_overlap", 0.0, 20.0),
            ],
            curvature: 0.0,
        }
    }
}

impl SyntheticCoupler {
    /// `(C_ground, C_direct)` in fF: island to ground and qubit to qubit through the pad.
    pub fn capacitances(&self, x: &[f64]) -> (f64, f64) {
        let u = unit(&self.dims, x);
        let bow = |t: f64| self.curvature * 4.0 * t * (1.0 - t);
        let ground = (45.0 + 45.0 * u[0] + 6.0 * u[1] + 2.0 * u[0] * u[1]) * (1.0 + bow(u[0]));
        let direct = 0.02 + 0.16 * u[2] + 0.04 * u[1] * u[2];
        (ground, direct)
    }

    /// Maxwell matrix over `[island, qubit port a, qubit port b]`.
    pub fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let (g, d) = self.capacitances(x);
        DMatrix::from_row_slice(3, 3, &[g, 0.0, 0.0, 0.0, d, -d, 0.0, -d, d])
    }

    pub fn lut(&self, island: &str, ports: [&str; 2], perturbation: f64, seed: u64) -> GeometryLUT {
        let ports = ports.iter().map(|p| p.to_string()).collect();
        sample(
            island,
            &self.dims,
            vec![island.into()],
            ports,
            |x| self.matrix(x),
            perturbation,
            seed,
        )
    }

    pub fn centre(&self) -> Vec<f64> {
        self.dims.iter().map(|d| 0.5 * (d.low + d.high)).collect()
    }
}

/// Qubit–coupler–qubit unit. The full-structure truth adds `unaccounted` times each
/// qubit–coupler pad capacitance, standing in for field lines that leave the simulated pocket.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPair {
    pub labels: [String; 3],
    pub q_i: SyntheticTransmon,
    pub coupler: SyntheticCoupler,
    pub q_j: SyntheticTransmon,
    pub unaccounted: f64,
}

impl Default for SyntheticPair {
    fn default() -> Self {
        SyntheticPair {
            labels: ["Q1".into(), "C12".into(), "Q2".into()],
            q_i: SyntheticTransmon::default(),
            coupler: SyntheticCoupler::default(),
            q_j: SyntheticTransmon::default(),
            unaccounted: 0.0,
        }
    }
}

impl SyntheticPair {
    /// Corner tables of the three elements; each gets its own perturbation stream.
    pub fn luts(&self, perturbation: f64, seed: u64) -> [GeometryLUT; 3] {
        let [qi, c, qj] = &self.labels;
        [
            self.q_i.lut(qi, c, perturbation, seed),
            self.coupler
                .lut(c, [qi, qj], perturbation, seed.wrapping_add(1)),
            self.q_j.lut(qj, c, perturbation, seed.wrapping_add(2)),
        ]
    }

    /// Full-structure Maxwell matrix over `[q_i, coupler, q_j]`, fF.
    pub fn truth(&self, x_i: &[f64], x_c: &[f64], x_j: &[f64]) -> DMatrix<f64> {
        let (gi, pi) = self.q_i.capacitances(x_i);
        let (gj, pj) = self.q_j.capacitances(x_j);
        let (gc, d) = self.coupler.capacitances(x_c);
        let (pi, pj) = (pi * (1.0 + self.unaccounted), pj * (1.0 + self.unaccounted));
        DMatrix::from_row_slice(
            3,
            3,
            &[
                gi + pi + d,
                -pi,
                -d,
                -pi,
                gc + pi + pj,
                -pj,
                -d,
                -pj,
                gj + pj + d,
            ],
        )
    }
}
