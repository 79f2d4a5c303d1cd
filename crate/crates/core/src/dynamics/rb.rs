//! Single-qubit randomized benchmarking on three-level transmons.
//!
//! Each Clifford is an instantaneous ideal rotation on the qubit levels followed by `gate_time`
//! of free open-system evolution. Survival is the ground-state population after the
//! recovery Clifford, averaged over sequences, and is fit to `A p^m + B`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::device::NoiseSpec;
use crate::io::CsvTable;
use crate::linalg::{CMatrix, C64};
use crate::{Error, Result};

const LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbConfig {
    /// ns.
    pub gate_time: f64,
    pub lengths: Vec<usize>,
    pub n_seq: usize,
    pub seed: u64,
}

impl RbConfig {
    fn validate(&self) -> Result<()> {
        if !(self.gate_time > 0.0) || self.n_seq == 0 || self.lengths.is_empty() {
            return Err(Error::InvalidParameter(
                "RB needs a positive gate time, sequences and lengths".into(),
            ));
        }
        if self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "lengths must be ascending, got {:?}",
                self.lengths
            )));
        }
        Ok(())
    }
}

/// `A p^m + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub a: f64,
    pub p: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbResult {
    /// `(1 - p) / 2`.
    pub error_per_gate: f64,
    pub fit: DecayFit,
    pub lengths: Vec<usize>,
    pub survival: Vec<f64>,
    pub std_error: Vec<f64>,
}

impl RbResult {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(["length", "survival", "std_error", "fit"]);
        for (k, &m) in self.lengths.iter().enumerate() {
            let fit = self.fit.a * self.fit.p.powi(m as i32) + self.fit.b;
            t.push(vec![
                m.into(),
                self.survival[k].into(),
                self.std_error[k].into(),
                fit.into(),
            ]);
        }
        t
    }
}

/// Coherence-limited error per gate `(t/3)(1/T1 + 1/T_phi)` with `1/T_phi = 1/T2E - 1/(2 T1)`.
pub fn coherence_limit(noise: &NoiseSpec, gate_time: f64) -> f64 {
    gate_time / 3.0 * (noise.relaxation_rate() + noise.echo_dephasing_rate())
}

/// The 24 single-qubit Cliffords, global phase fixed so the first nonzero entry is real positive.
pub fn clifford_group() -> Vec<CMatrix> {
    let s = FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(
        2,
        2,
        &[C64::from(s), C64::from(s), C64::from(s), C64::from(-s)],
    );
    let p = CMatrix::from_row_slice(
        2,
        2,
        &[C64::from(1.0), C64::from(0.0), C64::from(0.0), C64::i()],
    );
    let normalise = |m: CMatrix| {
        let first = *m.iter().find(|z| z.norm() > 1e-9).expect("unitary");
        m * (first.conj() / first.norm())
    };
    let mut group = vec![CMatrix::identity(2, 2)];
    let mut k = 0;
    while k < group.len() {
        for g in [&h, &p] {
            let next = normalise(g * &group[k]);
            if !group.iter().any(|x| (x - &next).norm() < 1e-9) {
                group.push(next);
            }
        }
        k += 1;
    }
    group
}

fn embed(u: &CMatrix) -> CMatrix {
    let mut out = CMatrix::identity(LEVELS, LEVELS);
    out.view_mut((0, 0), (2, 2)).copy_from(u);
    out
}

fn lowering() -> CMatrix {
    CMatrix::from_fn(LEVELS, LEVELS, |i, j| {
        if j == i + 1 {
            C64::from((j as f64).sqrt())
        } else {
            C64::from(0.0)
        }
    })
}

fn number() -> CMatrix {
    CMatrix::from_fn(LEVELS, LEVELS, |i, j| {
        if i == j {
            C64::from(i as f64)
        } else {
            C64::from(0.0)
        }
    })
}

/// Superoperator of the Lindbladian on column-stacked density matrices.
fn lindbladian(h: &CMatrix, jumps: &[CMatrix]) -> CMatrix {
    let d = h.nrows();
    let id = CMatrix::identity(d, d);
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * C64::new(0.0, -1.0);
    for j in jumps {
        let jj = j.adjoint() * j;
        l += j.conjugate().kronecker(j)
            - id.kronecker(&jj) * C64::from(0.5)
            - jj.transpose().kronecker(&id) * C64::from(0.5);
    }
    l
}

/// Jump operators of one transmon: relaxation and echo-limited pure dephasing.
fn jumps(noise: Option<&NoiseSpec>) -> Vec<CMatrix> {
    let Some(n) = noise else { return Vec::new() };
    vec![
        lowering() * C64::from(n.relaxation_rate().sqrt()),
        number() * C64::from((2.0 * n.echo_dephasing_rate()).sqrt()),
    ]
}

/// Least-squares `A, B` for fixed `p`, and the residual sum of squares.
fn linear_part(ms: &[f64], ys: &[f64], p: f64) -> (f64, f64, f64) {
    let x = DMatrix::from_fn(ms.len(), 2, |i, j| if j == 0 { p.powf(ms[i]) } else { 1.0 });
    let y = DVector::from_column_slice(ys);
    let svd = x.clone().svd(true, true);
    let coef = svd.solve(&y, 1e-12).expect("svd with both factors");
    let r = &x * &coef - y;
    (coef[0], coef[1], r.norm_squared())
}

/// Variable-projection fit of `A p^m + B`.
pub fn fit_decay(lengths: &[usize], survival: &[f64]) -> Result<DecayFit> {
    let ms: Vec<f64> = lengths.iter().map(|&m| m as f64).collect();
    let spread = survival.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - survival.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if spread < 1e-10 {
        let mean = survival.iter().sum::<f64>() / survival.len() as f64;
        return Ok(DecayFit {
            a: 0.0,
            p: 1.0,
            b: mean,
        });
    }
    if lengths.len() < 3 {
        return Err(Error::FitFailure(
            "a decay fit needs at least three lengths".into(),
        ));
    }
    // p = 1 - 10^-x
    let ssr = |x: f64| linear_part(&ms, survival, 1.0 - 10f64.powf(-x)).2;
    let grid: Vec<f64> = (0..=240).map(|k| 0.05 * k as f64).collect();
    let k = (0..grid.len())
        .min_by(|&i, &j| ssr(grid[i]).total_cmp(&ssr(grid[j])))
        .expect("grid");
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if ssr(c) < ssr(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let p = 1.0 - 10f64.powf(-0.5 * (a + b));
    let (amp, offset, _) = linear_part(&ms, survival, p);
    if !(amp > 0.0) {
        return Err(Error::FitFailure(format!(
            "fitted amplitude {amp} does not describe a decay"
        )));
    }
    Ok(DecayFit {
        a: amp,
        p,
        b: offset,
    })
}

fn summarise(config: &RbConfig, per_seq: Vec<Vec<f64>>) -> Result<RbResult> {
    let n = config.n_seq as f64;
    let (mut survival, mut std_error) = (Vec::new(), Vec::new());
    for k in 0..config.lengths.len() {
        let vals: Vec<f64> = per_seq.iter().map(|s| s[k]).collect();
        let mean = vals.iter().sum::<f64>() / n;
        let var = if config.n_seq > 1 {
            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        survival.push(mean);
        std_error.push((var / n).sqrt());
    }
    for i in 0..survival.len() {
        for j in i + 1..survival.len() {
            let tol = 3.0 * (std_error[i].powi(2) + std_error[j].powi(2)).sqrt() + 1e-9;
            if survival[j] - survival[i] > tol {
                return Err(Error::FitFailure(format!(
                    "survival rises from {:.6} at m = {} to {:.6} at m = {}",
                    survival[i], config.lengths[i], survival[j], config.lengths[j]
                )));
            }
        }
    }
    let fit = fit_decay(&config.lengths, &survival)?;
    Ok(RbResult {
        error_per_gate: (1.0 - fit.p) / 2.0,
        fit,
        lengths: config.lengths.clone(),
        survival,
        std_error,
    })
}

fn sequence_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Random Clifford indices of one sequence and the recovery gate.
fn sample_sequence(rng: &mut ChaCha8Rng, group: &[CMatrix], m: usize) -> (Vec<usize>, CMatrix) {
    let idx: Vec<usize> = (0..m).map(|_| rng.random_range(0..group.len())).collect();
    let total = idx
        .iter()
        .fold(CMatrix::identity(2, 2), |acc, &k| &group[k] * acc);
    (idx, total.adjoint())
}

fn apply(rho: &CMatrix, u: &CMatrix, channel: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let r = u * rho * u.adjoint();
    let v = channel * DVector::from_column_slice(r.as_slice());
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Individual single-qubit RB; `noise = None` is the noise-free limit.
pub fn single_qubit_rb(noise: Option<&NoiseSpec>, config: &RbConfig) -> Result<RbResult> {
    config.validate()?;
    if let Some(n) = noise {
        n.validate()?;
    }
    let group: Vec<CMatrix> = clifford_group();
    let embedded: Vec<CMatrix> = group.iter().map(embed).collect();
    let idle = (lindbladian(&CMatrix::zeros(LEVELS, LEVELS), &jumps(noise))
        * C64::from(config.gate_time))
    .exp();
    let per_seq = (0..config.n_seq)
        .into_par_iter()
        .map(|s| {
            let mut rng = sequence_rng(config.seed, s);
            config
                .lengths
                .iter()
                .map(|&m| {
                    let (idx, recovery) = sample_sequence(&mut rng, &group, m);
                    let mut rho = CMatrix::zeros(LEVELS, LEVELS);
                    rho[(0, 0)] = C64::from(1.0);
                    for &k in &idx {
                        rho = apply(&rho, &embedded[k], &idle);
                    }
                    rho = apply(&rho, &embed(&recovery), &idle);
                    rho[(0, 0)].re
                })
                .collect()
        })
        .collect();
    summarise(config, per_seq)
}

/// Simultaneous RB of two transmons with a static `xi_ZZ` (kHz) between them. Returns the
/// results of both qubits.
pub fn simultaneous_rb(
    noise: [Option<&NoiseSpec>; 2],
    xi_zz_khz: f64,
    config: &RbConfig,
) -> Result<[RbResult; 2]> {
    config.validate()?;
    let group: Vec<CMatrix> = clifford_group();
    let embedded: Vec<CMatrix> = group.iter().map(embed).collect();
    let id = CMatrix::identity(LEVELS, LEVELS);
    let n = number();
    let h = n.kronecker(&n) * C64::from(TAU * xi_zz_khz * 1e-6);
    let mut ops: Vec<CMatrix> = jumps(noise[0]).iter().map(|j| j.kronecker(&id)).collect();
    ops.extend(jumps(noise[1]).iter().map(|j| id.kronecker(j)));
    let idle = (lindbladian(&h, &ops) * C64::from(config.gate_time)).exp();
    let d = LEVELS * LEVELS;
    let per_seq: Vec<[Vec<f64>; 2]> = (0..config.n_seq)
        .into_par_iter()
        .map(|s| {
            let mut rng = sequence_rng(config.seed, s);
            let mut out = [Vec::new(), Vec::new()];
            for &m in &config.lengths {
                let (ia, ra) = sample_sequence(&mut rng, &group, m);
                let (ib, rb) = sample_sequence(&mut rng, &group, m);
                let mut rho = CMatrix::zeros(d, d);
                rho[(0, 0)] = C64::from(1.0);
                for (&ka, &kb) in ia.iter().zip(&ib) {
                    rho = apply(&rho, &embedded[ka].kronecker(&embedded[kb]), &idle);
                }
                rho = apply(&rho, &embed(&ra).kronecker(&embed(&rb)), &idle);
                let pop = |a: usize, b: usize| rho[(a * LEVELS + b, a * LEVELS + b)].re;
                out[0].push((0..LEVELS).map(|b| pop(0, b)).sum());
                out[1].push((0..LEVELS).map(|a| pop(a, 0)).sum());
            }
            out
        })
        .collect();
    let (a, b): (Vec<_>, Vec<_>) = per_seq.into_iter().map(|[x, y]| (x, y)).unzip();
    Ok([summarise(config, a)?, summarise(config, b)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_group_has_24_elements() {
        let g = clifford_group();
        assert_eq!(g.len(), 24);
        for u in &g {
            assert!((u.adjoint() * u - CMatrix::identity(2, 2)).norm() < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_exact_decay() {
        let lengths = [1usize, 4, 10, 30, 80, 200];
        let ys: Vec<f64> = lengths
            .iter()
            .map(|&m| 0.48 * 0.995f64.powi(m as i32) + 0.5)
            .collect();
        let f = fit_decay(&lengths, &ys).unwrap();
        assert!(
            (f.p - 0.995).abs() < 1e-8 && (f.a - 0.48).abs() < 1e-6 && (f.b - 0.5).abs() < 1e-6
        );
    }

    #[test]
    fn lindbladian_decays_excited_state() {
        let noise = NoiseSpec::new(10.0, 10.0, 20.0);
        let l = lindbladian(&CMatrix::zeros(LEVELS, LEVELS), &jumps(Some(&noise)));
        let e = (l * C64::from(1000.0)).exp();
        let mut rho = CMatrix::zeros(LEVELS, LEVELS);
        rho[(1, 1)] = C64::from(1.0);
        let out = e * DVector::from_column_slice(rho.as_slice());
        assert!((out[4].re - (-0.1f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn descending_lengths_rejected() {
        let c = RbConfig {
            gate_time: 20.0,
            lengths: vec![10, 5],
            n_seq: 2,
            seed: 0,
        };
        assert!(single_qubit_rb(None, &c).is_err());
    }
}
