//! Controlled-Z gates from coupler excursions: channel metrics, calibration and landscapes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::evolve::{block, evolve, Controls, EvolveOptions, Initial};
use crate::device::{DeviceGraph, EdgeCoupling, NoiseSpec};
use crate::io::CsvTable;
use crate::linalg::{to_complex, trace, CMatrix, C64};
use crate::pulses::{coupler_frequency_to_theta, FastAdiabaticSpec, PulseWaveform};
use crate::spectrum::{find_null, DressedLabeling, Quantity};
use crate::{Error, Result};

/// Diagonal of the ideal CZ in the order `|00>, |01>, |10>, |11>` (`|a b>`).
pub const CZ_DIAGONAL: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CzMetrics {
    /// Degrees in (-180, 180].
    pub conditional_phase: f64,
    /// Phases picked up by `|10>` and `|01>` relative to `|00>`, degrees.
    pub single_qubit_phases: [f64; 2],
    pub missing_fraction: f64,
    pub leakage_l1: f64,
    pub gate_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateMetrics {
    pub gate_error: f64,
    pub leakage_l1: f64,
}

/// A map on operators of the two-qubit computational block, stored as the images of `|i><j|`.
/// Outputs are restricted to the block, so population that leaks out is missing from them.
#[derive(Debug, Clone)]
pub struct CompChannel {
    blocks: Vec<CMatrix>,
}

fn wrap_degrees(x: f64) -> f64 {
    let y = x.rem_euclid(360.0);
    if y > 180.0 {
        y - 360.0
    } else {
        y
    }
}

impl CompChannel {
    /// `blocks[4 i + j]` is the image of `|i><j|`.
    pub fn from_blocks(blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != 16 || blocks.iter().any(|b| b.shape() != (4, 4)) {
            return Err(Error::InvalidParameter(
                "a two-qubit channel needs 16 blocks of 4x4".into(),
            ));
        }
        Ok(CompChannel { blocks })
    }

    pub fn from_unitary(m: &CMatrix) -> Self {
        let blocks = (0..16)
            .map(|k| {
                let (i, j) = (k / 4, k % 4);
                m.column(i) * m.column(j).adjoint()
            })
            .collect();
        CompChannel { blocks }
    }

    pub fn ideal(diagonal: [f64; 4]) -> Self {
        Self::from_unitary(&CMatrix::from_diagonal(&DVector::from_iterator(
            4,
            diagonal.map(C64::from),
        )))
    }

    pub fn image(&self, i: usize, j: usize) -> &CMatrix {
        &self.blocks[4 * i + j]
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                out += self.image(i, j) * rho[(i, j)];
            }
        }
        out
    }

    /// Composition with a two-qubit depolarizing channel of strength `p`.
    pub fn depolarized(&self, p: f64) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b * C64::from(1.0 - p) + CMatrix::identity(4, 4) * (trace(b) * (p / 4.0)))
            .collect();
        CompChannel { blocks }
    }

    /// Phases of `|k>` relative to `|0>` (radians), read from the coherences `|k><0|`.
    fn relative_phases(&self) -> [f64; 4] {
        [0usize, 1, 2, 3].map(|k| {
            if k == 0 {
                0.0
            } else {
                self.image(k, 0)[(k, 0)].arg()
            }
        })
    }

    /// Average population leaving the block over computational inputs.
    pub fn leakage(&self) -> f64 {
        let kept: f64 = (0..4).map(|i| trace(self.image(i, i)).re).sum();
        (1.0 - kept / 4.0).clamp(0.0, 1.0)
    }

    /// Conditional-oscillation readout with qubit `a` as control and qubit `b` as target.
    pub fn metrics(&self) -> CzMetrics {
        let target = [self.image(1, 0)[(1, 0)], self.image(3, 2)[(3, 2)]];
        let cp = wrap_degrees((target[1].arg() - target[0].arg()).to_degrees());
        let missing = if target[0].norm() > 0.0 {
            1.0 - target[1].norm() / target[0].norm()
        } else {
            1.0
        };
        let ph = self.relative_phases();
        let g = gate_error_and_leakage(self, CZ_DIAGONAL);
        CzMetrics {
            conditional_phase: if cp == -180.0 { 180.0 } else { cp },
            single_qubit_phases: [
                wrap_degrees(ph[2].to_degrees()),
                wrap_degrees(ph[1].to_degrees()),
            ],
            missing_fraction: missing.clamp(0.0, 1.0),
            leakage_l1: g.leakage_l1,
            gate_error: g.gate_error,
        }
    }
}

/// Average gate error against a diagonal target after virtual single-qubit Z corrections, and
/// leakage out of the computational block.
///
/// `F_avg = (d F_e + 1 - L1) / (d + 1)` with `d = 4`, which for a trace-preserving channel is
/// the usual `(d F_e + 1) / (d + 1)`; an ideal CZ followed by depolarizing of strength `p` has
/// error `3p/4`.
pub fn gate_error_and_leakage(channel: &CompChannel, target: [f64; 4]) -> GateMetrics {
    let ph = channel.relative_phases();
    let t_ph: [f64; 4] = target.map(|t| if t < 0.0 { PI } else { 0.0 });
    // local phases of the channel beyond those of the target
    let (pa, pb) = (ph[2] - t_ph[2], ph[1] - t_ph[1]);
    let corr = [0.0, pb, pa, pa + pb].map(|x| C64::from_polar(1.0, -x));
    let t = target.map(C64::from);
    let mut fe = C64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            fe += channel.image(i, j)[(i, j)] * corr[i] * corr[j].conj() * t[i].conj() * t[j];
        }
    }
    let l1 = channel.leakage();
    let f = (fe.re + 4.0 * (1.0 - l1)) / 20.0;
    GateMetrics {
        gate_error: (1.0 - f).max(0.0),
        leakage_l1: l1,
    }
}

/// Dressed frame of an edge at its idle point.
#[derive(Debug, Clone)]
pub struct CzFrame {
    /// `[qubit_a, coupler, qubit_b]`.
    pub subsystem: DeviceGraph,
    energies: DVector<f64>,
    vectors: CMatrix,
    /// Eigenindices of `|00>, |01>, |10>, |11>`.
    columns: [usize; 4],
}

impl CzFrame {
    pub fn new(graph: &DeviceGraph, edge: &EdgeCoupling, idle: &[f64]) -> Result<Self> {
        let subsystem = graph.edge_subsystem(edge)?;
        let h = subsystem.hamiltonian(idle)?;
        let eig = h.eigen();
        let labels: Vec<Vec<usize>> = [[0, 0, 0], [0, 0, 1], [1, 0, 0], [1, 0, 1]]
            .map(|l| l.to_vec())
            .into();
        let dressed = DressedLabeling::new(&h, &eig, &labels)?;
        dressed.check()?;
        let columns = [0, 1, 2, 3].map(|k| dressed.states[k].eigenindex);
        Ok(CzFrame {
            subsystem,
            energies: eig.values,
            vectors: to_complex(&eig.vectors),
            columns,
        })
    }

    /// Bare-basis operator to the idle dressed frame, with idle evolution over `t` removed.
    fn to_frame(&self, t: f64) -> CMatrix {
        let mut p = self.vectors.transpose();
        for (k, mut row) in p.row_iter_mut().enumerate() {
            row *= C64::from_polar(1.0, self.energies[k] * t);
        }
        p
    }

    pub fn channel(
        &self,
        waveforms: &BTreeMap<String, PulseWaveform>,
        noise: Option<&BTreeMap<String, NoiseSpec>>,
        options: &EvolveOptions,
    ) -> Result<CompChannel> {
        let c = self.columns;
        match noise {
            None => {
                let dim = self.vectors.nrows();
                let r = evolve(
                    &self.subsystem,
                    waveforms,
                    &Initial::Operators(Vec::new()),
                    None,
                    options,
                )?;
                let u = r.unitary.expect("coherent runs return the propagator");
                debug_assert_eq!(u.nrows(), dim);
                let ud = self.to_frame(r.duration) * u * &self.vectors;
                Ok(CompChannel::from_unitary(&block(&ud, &c)))
            }
            Some(noise) => {
                let pairs: Vec<(usize, usize)> =
                    (0..4).flat_map(|i| (i..4).map(move |j| (i, j))).collect();
                let ops = pairs
                    .iter()
                    .map(|&(i, j)| self.vectors.column(c[i]) * self.vectors.column(c[j]).adjoint())
                    .collect();
                let r = evolve(
                    &self.subsystem,
                    waveforms,
                    &Initial::Operators(ops),
                    Some(noise),
                    options,
                )?;
                let p = self.to_frame(r.duration);
                let mut blocks = vec![CMatrix::zeros(4, 4); 16];
                for (&(i, j), rho) in pairs.iter().zip(&r.states) {
                    let b = block(&(&p * rho * p.adjoint()), &c);
                    blocks[4 * j + i] = b.adjoint();
                    blocks[4 * i + j] = b;
                }
                CompChannel::from_blocks(blocks)
            }
        }
    }
}

/// Conditional-oscillation metrics of `waveforms` on an edge. The idle frame is the control
/// configuration at the start of the waveforms.
pub fn conditional_oscillation(
    graph: &DeviceGraph,
    edge: &str,
    waveforms: &BTreeMap<String, PulseWaveform>,
    noise: Option<&BTreeMap<String, NoiseSpec>>,
    options: &EvolveOptions,
) -> Result<CzMetrics> {
    let e = graph.edge(edge)?.clone();
    let sub = graph.edge_subsystem(&e)?;
    let idle = Controls::new(&sub, waveforms)?.frequencies(0.0);
    let frame = CzFrame::new(graph, &e, &idle)?;
    Ok(frame.channel(waveforms, noise, options)?.metrics())
}

/// Coupler window searched for the idle point below the sweetspot, GHz.
const IDLE_WINDOW: f64 = 0.65;
const IDLE_GRID: usize = 14;

/// Pulse geometry of one edge: the coupler idles at the one-excitation exchange null and
/// `theta` is measured from the higher transmon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CzDesign {
    pub edge: EdgeCoupling,
    /// GHz.
    pub f_idle: f64,
    /// GHz.
    pub f_q_high: f64,
    /// Coupling of the higher transmon to the coupler, MHz.
    pub g_qc: f64,
}

impl CzDesign {
    pub fn new(graph: &DeviceGraph, edge: &str) -> Result<Self> {
        let e = graph.edge(edge)?;
        let f_ss = graph.mode(&e.coupler)?.f_sweetspot;
        let null = find_null(
            graph,
            edge,
            Quantity::J1,
            (f_ss - IDLE_WINDOW, f_ss),
            IDLE_GRID,
        )?;
        let f_idle = null.frequency.ok_or_else(|| {
            Error::InvalidParameter(format!(
                "edge {} has no exchange null below its coupler sweetspot",
                e.name()
            ))
        })?;
        Self::with_idle(graph, edge, f_idle)
    }

    pub fn with_idle(graph: &DeviceGraph, edge: &str, f_idle: f64) -> Result<Self> {
        let e = graph.edge(edge)?.clone();
        let (fa, fb) = (
            graph.mode(&e.qubit_a)?.f_sweetspot,
            graph.mode(&e.qubit_b)?.f_sweetspot,
        );
        let (f_q_high, g_qc) = if fa >= fb {
            (fa, e.g_qc_a)
        } else {
            (fb, e.g_qc_b)
        };
        if f_idle <= f_q_high {
            return Err(Error::InvalidParameter(format!(
                "idle coupler frequency {f_idle} GHz must lie above the transmons"
            )));
        }
        Ok(CzDesign {
            edge: e,
            f_idle,
            f_q_high,
            g_qc,
        })
    }

    pub fn pulse(&self, theta_f: f64, t_p: f64) -> Result<FastAdiabaticSpec> {
        FastAdiabaticSpec::from_idle(self.f_idle, theta_f, t_p, self.g_qc, self.f_q_high)
    }

    pub fn waveforms(&self, spec: &FastAdiabaticSpec) -> BTreeMap<String, PulseWaveform> {
        BTreeMap::from([(self.edge.coupler.clone(), spec.coupler_waveform())])
    }

    /// Frame at the configuration where every waveform of `spec` starts.
    pub fn frame(&self, graph: &DeviceGraph, spec: &FastAdiabaticSpec) -> Result<CzFrame> {
        let sub = graph.edge_subsystem(&self.edge)?;
        let w = self.waveforms(spec);
        let idle = Controls::new(&sub, &w)?.frequencies(0.0);
        CzFrame::new(graph, &self.edge, &idle)
    }

    pub fn metrics(
        &self,
        graph: &DeviceGraph,
        spec: &FastAdiabaticSpec,
        noise: Option<&BTreeMap<String, NoiseSpec>>,
        options: &EvolveOptions,
    ) -> Result<CzMetrics> {
        let frame = self.frame(graph, spec)?;
        Ok(frame
            .channel(&self.waveforms(spec), noise, options)?
            .metrics())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CzCalibration {
    pub design: CzDesign,
    pub spec: FastAdiabaticSpec,
    pub metrics: CzMetrics,
    pub iterations: usize,
}

/// Distance of the conditional phase from 180 degrees, continuous across 180.
fn phase_residual(cp: f64) -> f64 {
    cp.rem_euclid(360.0) - 180.0
}

const CALIBRATION_GRID: usize = 24;
const PHASE_TOLERANCE: f64 = 1e-3;

/// Finds `theta_f` in `search_box` with a conditional phase of 180 degrees: a grid scan for the
/// first bracketing interval, then an Illinois secant solve.
pub fn calibrate_cz(
    graph: &DeviceGraph,
    design: &CzDesign,
    t_p: f64,
    search_box: (f64, f64),
    options: &EvolveOptions,
) -> Result<CzCalibration> {
    let (lo, hi) = search_box;
    let theta_i = coupler_frequency_to_theta(design.f_idle, design.g_qc, design.f_q_high);
    if !(lo < hi) || lo < theta_i || hi >= PI / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "search box [{lo}, {hi}] must lie in [theta_i = {theta_i}, pi/2)"
        )));
    }
    let fixed = EvolveOptions {
        adaptive: false,
        ..*options
    };
    let residual = |theta: f64| -> Result<f64> {
        let spec = design.pulse(theta, t_p)?;
        Ok(phase_residual(
            design
                .metrics(graph, &spec, None, &fixed)?
                .conditional_phase,
        ))
    };
    let grid: Vec<f64> = (0..CALIBRATION_GRID)
        .map(|k| lo + (hi - lo) * k as f64 / (CALIBRATION_GRID - 1) as f64)
        .collect();
    let values = grid
        .par_iter()
        .map(|&t| residual(t))
        .collect::<Result<Vec<_>>>()?;
    // a jump through +-180 is the phase wrap at 0 degrees, not a root
    let k = (0..grid.len() - 1)
        .find(|&k| values[k] * values[k + 1] <= 0.0 && (values[k] - values[k + 1]).abs() < 180.0)
        .ok_or(Error::NoBracket { low: lo, high: hi })?;

    let (mut a, mut fa, mut b, mut fb) = (grid[k], values[k], grid[k + 1], values[k + 1]);
    let mut iterations = 0;
    let mut x = if fa.abs() < fb.abs() { a } else { b };
    for _ in 0..80 {
        if fa.abs() < PHASE_TOLERANCE {
            x = a;
            break;
        }
        if fb.abs() < PHASE_TOLERANCE {
            x = b;
            break;
        }
        iterations += 1;
        x = (a * fb - b * fa) / (fb - fa);
        let fx = residual(x)?;
        if fx.abs() < PHASE_TOLERANCE || (b - a).abs() < 1e-12 {
            break;
        }
        if fx * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            // Illinois: damp the retained endpoint
            fa *= 0.5;
        }
        b = x;
        fb = fx;
    }
    let spec = design.pulse(x, t_p)?;
    let metrics = design.metrics(graph, &spec, None, options)?;
    Ok(CzCalibration {
        design: design.clone(),
        spec,
        metrics,
        iterations,
    })
}

/// CZ metrics over a `(t_p, theta_f)` grid.
#[derive(Debug, Clone, Serialize)]
pub struct Landscape {
    pub theta_f: Vec<f64>,
    pub t_p: Vec<f64>,
    /// Row per `t_p`, column per `theta_f`.
    pub metrics: Vec<Vec<CzMetrics>>,
}

pub fn landscape(
    graph: &DeviceGraph,
    design: &CzDesign,
    theta_f: &[f64],
    t_p: &[f64],
    options: &EvolveOptions,
) -> Result<Landscape> {
    let points: Vec<(f64, f64)> = t_p
        .iter()
        .flat_map(|&t| theta_f.iter().map(move |&th| (t, th)))
        .collect();
    let flat = points
        .par_iter()
        .map(|&(t, th)| design.metrics(graph, &design.pulse(th, t)?, None, options))
        .collect::<Result<Vec<_>>>()?;
    let metrics = flat
        .chunks(theta_f.len().max(1))
        .map(|c| c.to_vec())
        .collect();
    Ok(Landscape {
        theta_f: theta_f.to_vec(),
        t_p: t_p.to_vec(),
        metrics,
    })
}

impl Landscape {
    /// Interpolated `theta_f` of the first 180-degree crossing in each row.
    pub fn contour_180(&self) -> Vec<Option<f64>> {
        self.metrics
            .iter()
            .map(|row| {
                let r: Vec<f64> = row
                    .iter()
                    .map(|m| phase_residual(m.conditional_phase))
                    .collect();
                (0..r.len().saturating_sub(1))
                    .find(|&k| r[k] * r[k + 1] <= 0.0 && (r[k] - r[k + 1]).abs() < 180.0)
                    .map(|k| {
                        let u = if r[k] == r[k + 1] {
                            0.0
                        } else {
                            r[k] / (r[k] - r[k + 1])
                        };
                        self.theta_f[k] + u * (self.theta_f[k + 1] - self.theta_f[k])
                    })
            })
            .collect()
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new([
            "t_p_ns",
            "theta_f_rad",
            "conditional_phase_deg",
            "missing_fraction",
            "leakage_l1",
            "gate_error",
        ]);
        for (i, row) in self.metrics.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                t.push(vec![
                    self.t_p[i].into(),
                    self.theta_f[j].into(),
                    m.conditional_phase.into(),
                    m.missing_fraction.into(),
                    m.leakage_l1.into(),
                    m.gate_error.into(),
                ]);
            }
        }
        t
    }
}
