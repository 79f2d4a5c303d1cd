//! Measurement-induced exchange: a Stark-shifted transmon swept through a spectator resonance.
//!
//! The measured transmon is detuned by `2 chi n(t)` while its readout resonator rings up under
//! a square drive and rings down afterwards. The exchange partner states form a two-level
//! problem coupled by `J1` or `J2` at the given coupler frequency, with measurement-induced
//! dephasing `8 chi^2 n(t) / kappa` on their coherence.

use std::f64::consts::TAU;

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::DeviceGraph;
use crate::io::CsvTable;
use crate::linalg::C64;
use crate::spectrum::{exchange_coupling, DressedLabeling, EdgeProbe, Manifold};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReadoutSpec {
    /// Drive amplitudes in units of the square root of the steady-state photon number.
    pub amplitudes: Vec<f64>,
    /// Dispersive shift, MHz.
    pub chi: f64,
    /// Resonator linewidth, MHz.
    pub kappa: f64,
    /// Drive duration, ns.
    pub duration: f64,
    /// Free evolution after the drive, ns.
    pub ring_down: f64,
    /// ns.
    pub dt: f64,
}

impl Default for ReadoutSpec {
    fn default() -> Self {
        ReadoutSpec {
            amplitudes: (0..=20).map(|k| 0.5 * k as f64).collect(),
            chi: -1.0,
            kappa: 2.0,
            duration: 600.0,
            ring_down: 600.0,
            dt: 0.25,
        }
    }
}

impl ReadoutSpec {
    fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.duration >= 0.0 && self.ring_down >= 0.0 && self.dt > 0.0) {
            return Err(Error::InvalidParameter(
                "readout needs kappa > 0, dt > 0 and non-negative durations".into(),
            ));
        }
        if self.amplitudes.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::InvalidParameter(
                "readout amplitudes must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Mean photon number for a drive of amplitude `amp`.
    pub fn photons(&self, amp: f64, t: f64) -> f64 {
        let k = TAU * self.kappa * 1e-3;
        let n_ss = amp * amp;
        if t <= self.duration {
            n_ss * (1.0 - (-0.5 * k * t).exp()).powi(2)
        } else {
            let end = (1.0 - (-0.5 * k * self.duration).exp()).powi(2);
            n_ss * end * (-k * (t - self.duration)).exp()
        }
    }
}

/// Two-level exchange problem in angular units (rad/ns).
pub struct TwoLevelSweep<'a> {
    /// `E_initial - E_partner` versus time.
    pub detuning: &'a (dyn Fn(f64) -> f64 + Sync),
    /// Coherence decay rate versus time.
    pub dephasing: &'a (dyn Fn(f64) -> f64 + Sync),
    pub coupling: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl TwoLevelSweep<'_> {
    /// Population ending in the eigenstate of the final Hamiltonian that is mostly the partner,
    /// starting in the eigenstate of the initial Hamiltonian that is mostly the initial state.
    pub fn transfer(&self) -> f64 {
        let g = self.coupling;
        // eigenvector of [[d/2, g], [g, -d/2]] with the larger weight on basis state `k`
        let dressed = |d: f64, k: usize| {
            let theta = 0.5 * (2.0 * g).atan2(d);
            let (upper, lower) = ([theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]);
            if upper[k].abs() >= lower[k].abs() {
                upper
            } else {
                lower
            }
        };
        let v0 = dressed((self.detuning)(0.0), 0);
        let mut rho = Matrix2::new(
            C64::from(v0[0] * v0[0]),
            C64::from(v0[0] * v0[1]),
            C64::from(v0[0] * v0[1]),
            C64::from(v0[1] * v0[1]),
        );
        let n = ((self.t_end / self.dt).ceil() as usize).max(1);
        let h = self.t_end / n as f64;
        for k in 0..n {
            let t = (k as f64 + 0.5) * h;
            let d = (self.detuning)(t);
            let om = (0.25 * d * d + g * g).sqrt();
            // exp(-i H h) for H = (d/2) sz + g sx
            let (c, s) = ((om * h).cos(), (om * h).sin());
            let (nz, nx) = if om > 0.0 {
                (0.5 * d / om, g / om)
            } else {
                (0.0, 0.0)
            };
            let u = Matrix2::new(
                C64::new(c, -s * nz),
                C64::new(0.0, -s * nx),
                C64::new(0.0, -s * nx),
                C64::new(c, s * nz),
            );
            rho = u * rho * u.adjoint();
            let decay = (-(self.dephasing)(t) * h).exp();
            rho[(0, 1)] *= decay;
            rho[(1, 0)] *= decay;
        }
        let w = dressed((self.detuning)(self.t_end), 1);
        let p = w[0] * w[0] * rho[(0, 0)].re
            + w[1] * w[1] * rho[(1, 1)].re
            + 2.0 * w[0] * w[1] * rho[(0, 1)].re;
        p.clamp(0.0, 1.0)
    }
}

/// Transfer probability over `(coupler frequency, readout amplitude)`; `None` where the
/// exchange coupling could not be extracted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChevronMap {
    pub edge: String,
    pub manifold: Manifold,
    /// Transmon whose readout is driven.
    pub measured: String,
    /// GHz.
    pub coupler_freqs: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// MHz, per coupler frequency.
    pub coupling: Vec<Option<f64>>,
    /// Row per coupler frequency, column per amplitude.
    pub transfer: Vec<Vec<Option<f64>>>,
}

impl ChevronMap {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(["f_coupler_ghz", "amplitude", "coupling_mhz", "transfer"]);
        for (i, f) in self.coupler_freqs.iter().enumerate() {
            for (j, a) in self.amplitudes.iter().enumerate() {
                t.push(vec![
                    (*f).into(),
                    (*a).into(),
                    self.coupling[i].into(),
                    self.transfer[i][j].into(),
                ]);
            }
        }
        t
    }

    /// Largest transfer in the row nearest to coupler frequency `f`.
    pub fn max_transfer_near(&self, f: f64) -> Option<f64> {
        let i = (0..self.coupler_freqs.len()).min_by(|&a, &b| {
            (self.coupler_freqs[a] - f)
                .abs()
                .total_cmp(&(self.coupler_freqs[b] - f).abs())
        })?;
        self.transfer[i].iter().flatten().copied().reduce(f64::max)
    }
}

/// Exchange chevron of an edge when the readout of `measured` is driven.
///
/// One-excitation: the measured transmon starts excited with the partner empty. Two-excitation:
/// both transmons start excited and the partner state is `|0_lo 2_hi>`.
pub fn readout_stark_chevron(
    graph: &DeviceGraph,
    edge: &str,
    measured: &str,
    readout: &ReadoutSpec,
    manifold: Manifold,
    coupler_freqs: &[f64],
) -> Result<ChevronMap> {
    readout.validate()?;
    let e = graph.edge(edge)?.clone();
    if measured != e.qubit_a && measured != e.qubit_b {
        return Err(Error::InvalidParameter(format!(
            "{measured} is not a transmon of edge {}",
            e.name()
        )));
    }
    let probe = EdgeProbe::new(graph, edge)?;
    let sub = probe.subsystem().clone();
    let (fa, fb) = (sub.modes[0].f_sweetspot, sub.modes[2].f_sweetspot);
    let (lo, hi) = if fa <= fb { (0usize, 2usize) } else { (2, 0) };
    let m = if sub.modes[0].label == measured { 0 } else { 2 };
    let label = |occ: &[(usize, usize)]| {
        let mut l = vec![0; 3];
        for &(k, n) in occ {
            l[k] = n;
        }
        l
    };
    // (initial, partner, detuning slope per unit of measured-transmon shift)
    let (initial, partner, slope) = match manifold {
        Manifold::OneExcitation => {
            let other = 2 - m;
            (label(&[(m, 1)]), label(&[(other, 1)]), 1.0)
        }
        Manifold::TwoExcitation => {
            let s = if m == lo { 1.0 } else { -1.0 };
            (label(&[(lo, 1), (hi, 1)]), label(&[(hi, 2)]), s)
        }
    };
    let chi = TAU * readout.chi * 1e-3;
    let kappa = TAU * readout.kappa * 1e-3;
    let t_end = readout.duration + readout.ring_down;

    let rows = coupler_freqs
        .par_iter()
        .map(|&fc| -> Result<(Option<f64>, Vec<Option<f64>>)> {
            let f = probe.frequencies(fc);
            let j = match exchange_coupling(
                &sub,
                &f,
                &sub.modes[0].label,
                &sub.modes[2].label,
                manifold,
            ) {
                Ok(c) => c.j,
                Err(Error::NoCrossingInWindow | Error::AmbiguousLabeling { .. }) => {
                    return Ok((None, vec![None; readout.amplitudes.len()]))
                }
                Err(err) => return Err(err),
            };
            let h = sub.hamiltonian(&f)?;
            let eig = h.eigen();
            let dressed = DressedLabeling::new(&h, &eig, &[initial.clone(), partner.clone()])?;
            if dressed.check().is_err() {
                return Ok((Some(j), vec![None; readout.amplitudes.len()]));
            }
            let delta0 = TAU * (dressed.energy(&initial) - dressed.energy(&partner));
            let transfers = readout
                .amplitudes
                .iter()
                .map(|&amp| {
                    let detuning = |t: f64| delta0 + slope * 2.0 * chi * readout.photons(amp, t);
                    let dephasing = |t: f64| 8.0 * chi * chi * readout.photons(amp, t) / kappa;
                    let sweep = TwoLevelSweep {
                        detuning: &detuning,
                        dephasing: &dephasing,
                        coupling: TAU * j * 1e-3,
                        t_end,
                        dt: readout.dt,
                    };
                    Some(sweep.transfer())
                })
                .collect();
            Ok((Some(j), transfers))
        })
        .collect::<Result<Vec<_>>>()?;
    let (coupling, transfer) = rows.into_iter().unzip();
    Ok(ChevronMap {
        edge: e.name(),
        manifold,
        measured: measured.to_string(),
        coupler_freqs: coupler_freqs.to_vec(),
        amplitudes: readout.amplitudes.clone(),
        coupling,
        transfer,
    })
}
