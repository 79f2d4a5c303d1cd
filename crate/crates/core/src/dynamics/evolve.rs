//! Piecewise-constant propagation of the device Hamiltonian under control waveforms.
//!
//! A waveform is read as a piecewise-linear control through its sample centres `(k + 1/2) dt`,
//! held flat before the first and after the last centre. Each substep uses the Hamiltonian at
//! its midpoint. Open-system runs use a symmetric split per substep: half a step of coherent
//! evolution plus pure dephasing (both diagonal in the instantaneous eigenbasis), a full
//! second-order step of energy relaxation, and the remaining half step.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceGraph, Hamiltonian, NoiseSpec};
use crate::linalg::{to_complex, trace, unitarity_defect, CMatrix, Eigen, C64};
use crate::pulses::{PulseWaveform, WaveformKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Initial substep, ns.
    pub substep: f64,
    /// Halve the substep until successive runs agree to `tolerance`.
    pub adaptive: bool,
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            substep: 0.1,
            adaptive: true,
            tolerance: 1e-6,
            max_refinements: 4,
        }
    }
}

impl EvolveOptions {
    pub fn fixed(substep: f64) -> Self {
        EvolveOptions {
            substep,
            adaptive: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub enum Initial {
    Ket(DVector<C64>),
    Density(CMatrix),
    /// Arbitrary operators, e.g. `|i><j|` for channel reconstruction.
    Operators(Vec<CMatrix>),
}

impl Initial {
    fn operators(&self) -> Vec<CMatrix> {
        match self {
            Initial::Ket(psi) => vec![psi * psi.adjoint()],
            Initial::Density(rho) => vec![rho.clone()],
            Initial::Operators(ops) => ops.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Full propagator in the bare basis; coherent runs only.
    pub unitary: Option<CMatrix>,
    /// Evolved images of the initial operators, bare basis.
    pub states: Vec<CMatrix>,
    /// ns.
    pub duration: f64,
    /// Substep of the returned run, ns.
    pub substep: f64,
    /// Global order of the integrator in the substep.
    pub order: u32,
    pub refinements: usize,
}

impl EvolutionResult {
    /// `max |Tr rho_out - Tr rho_in|` over the evolved operators.
    pub fn trace_defect(&self, initial: &Initial) -> f64 {
        initial
            .operators()
            .iter()
            .zip(&self.states)
            .map(|(a, b)| (trace(a) - trace(b)).norm())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_defect(&self) -> Option<f64> {
        self.unitary.as_ref().map(unitarity_defect)
    }
}

/// Rows and columns `idx` of `m`.
pub fn block(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Frequencies of every mode as a function of time.
pub(crate) struct Controls<'a> {
    graph: &'a DeviceGraph,
    driven: Vec<(usize, &'a PulseWaveform)>,
    pub duration: f64,
}

impl<'a> Controls<'a> {
    pub fn new(
        graph: &'a DeviceGraph,
        waveforms: &'a BTreeMap<String, PulseWaveform>,
    ) -> Result<Self> {
        let mut driven = Vec::new();
        let mut shape: Option<(f64, usize)> = None;
        for (label, w) in waveforms {
            w.validate()?;
            if w.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "waveform for {label} is empty"
                )));
            }
            match shape {
                None => shape = Some((w.dt, w.len())),
                Some((dt, n)) if (dt - w.dt).abs() > 1e-12 * dt || n != w.len() => {
                    return Err(Error::InvalidParameter(format!(
                        "waveform for {label} has dt = {} ns and {} samples, expected {dt} ns and {n}",
                        w.dt,
                        w.len()
                    )));
                }
                _ => {}
            }
            driven.push((graph.mode_index(label)?, w));
        }
        let (dt, n) = shape.ok_or_else(|| Error::InvalidParameter("no waveforms given".into()))?;
        Ok(Controls {
            graph,
            driven,
            duration: dt * n as f64,
        })
    }

    fn sample(w: &PulseWaveform, t: f64) -> f64 {
        let x = t / w.dt - 0.5;
        let last = w.len() - 1;
        if x <= 0.0 {
            return w.samples[0];
        }
        if x >= last as f64 {
            return w.samples[last];
        }
        let k = x.floor() as usize;
        let u = x - k as f64;
        w.samples[k] + u * (w.samples[k + 1] - w.samples[k])
    }

    pub fn frequencies(&self, t: f64) -> Vec<f64> {
        let mut f = self.graph.sweetspot_frequencies();
        for &(m, w) in &self.driven {
            let v = Self::sample(w, t);
            f[m] = match w.kind {
                WaveformKind::FluxAmplitude => self.graph.modes[m].frequency_at_flux(v),
                _ => v,
            };
        }
        f
    }
}

/// Ladder operator as `(from, to, amplitude)` triples.
type Sparse = Vec<(usize, usize, f64)>;

/// Lowering operator of one mode.
fn lowering(h: &Hamiltonian, mode: usize) -> Sparse {
    let stride: usize = h.basis.dims[mode + 1..].iter().product();
    (0..h.basis.size())
        .filter_map(|i| {
            let n = h.basis.occupations(i)[mode];
            (n > 0).then(|| (i, i - stride, (n as f64).sqrt()))
        })
        .collect()
}

struct Dissipation {
    /// `(rate, lowering operator, occupation per basis state)` for each relaxing mode.
    relax: Vec<(f64, Sparse, Vec<f64>)>,
    /// `(mode, noise)` for each dephasing mode.
    dephase: Vec<(usize, NoiseSpec)>,
    occupations: Vec<Vec<f64>>,
}

impl Dissipation {
    fn new(
        graph: &DeviceGraph,
        h: &Hamiltonian,
        noise: &BTreeMap<String, NoiseSpec>,
    ) -> Result<Self> {
        let occupations: Vec<Vec<f64>> = (0..graph.modes.len())
            .map(|m| {
                (0..h.basis.size())
                    .map(|i| h.basis.occupations(i)[m] as f64)
                    .collect()
            })
            .collect();
        let mut relax = Vec::new();
        let mut dephase = Vec::new();
        for (label, spec) in noise {
            let Ok(m) = graph.mode_index(label) else {
                continue;
            };
            spec.validate()?;
            relax.push((
                spec.relaxation_rate(),
                lowering(h, m),
                occupations[m].clone(),
            ));
            dephase.push((m, *spec));
        }
        Ok(Dissipation {
            relax,
            dephase,
            occupations,
        })
    }

    /// `sum_m G_m (a rho a^dag - {n, rho} / 2)`.
    fn relaxation(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let mut out = CMatrix::zeros(d, d);
        for (rate, low, n) in &self.relax {
            for &(i, li, ai) in low {
                for &(j, lj, aj) in low {
                    out[(li, lj)] += rho[(i, j)] * (rate * ai * aj);
                }
            }
            for j in 0..d {
                for i in 0..d {
                    out[(i, j)] -= rho[(i, j)] * (0.5 * rate * (n[i] + n[j]));
                }
            }
        }
        out
    }

    fn relaxation_step(&self, rho: &CMatrix, h: f64) -> CMatrix {
        let k1 = self.relaxation(rho);
        let k2 = self.relaxation(&(rho + &k1 * C64::from(h)));
        rho + (k1 + k2) * C64::from(0.5 * h)
    }

    /// Elementwise factors of half a step in the eigenbasis: phase and dephasing with
    /// `L_m = sqrt(2 G_m) sum_k <k|n_m|k> |k><k|`.
    fn half_step_factors(
        &self,
        graph: &DeviceGraph,
        eig: &Eigen,
        freqs: &[f64],
        h: f64,
    ) -> CMatrix {
        let d = eig.dim();
        let mut decay = DMatrix::<f64>::zeros(d, d);
        for &(m, spec) in &self.dephase {
            let slope = graph.modes[m].flux_sensitivity_at(freqs[m]);
            let rate = spec.echo_dephasing_rate() + spec.flux_dephasing_rate(slope);
            if rate == 0.0 {
                continue;
            }
            let n = &self.occupations[m];
            let mean: Vec<f64> = (0..d)
                .map(|k| (0..d).map(|i| eig.vectors[(i, k)].powi(2) * n[i]).sum())
                .collect();
            for l in 0..d {
                for k in 0..d {
                    decay[(k, l)] += rate * (mean[k] - mean[l]).powi(2);
                }
            }
        }
        CMatrix::from_fn(d, d, |k, l| {
            C64::from_polar(
                (-0.5 * h * decay[(k, l)]).exp(),
                -0.5 * h * (eig.values[k] - eig.values[l]),
            )
        })
    }
}

fn run_once(
    graph: &DeviceGraph,
    controls: &Controls,
    initial: &Initial,
    noise: Option<&BTreeMap<String, NoiseSpec>>,
    n_steps: usize,
) -> Result<EvolutionResult> {
    let h = controls.duration / n_steps as f64;
    let probe = graph.hamiltonian(&controls.frequencies(0.0))?;
    let dim = probe.basis.size();
    let ops = initial.operators();
    if let Some(bad) = ops.iter().find(|o| o.nrows() != dim || o.ncols() != dim) {
        return Err(Error::InvalidParameter(format!(
            "initial operator is {}x{}, Hilbert space has dimension {dim}",
            bad.nrows(),
            bad.ncols()
        )));
    }
    let result = |unitary, states| EvolutionResult {
        unitary,
        states,
        duration: controls.duration,
        substep: h,
        order: 2,
        refinements: 0,
    };

    match noise {
        None => {
            let mut u = CMatrix::identity(dim, dim);
            for k in 0..n_steps {
                let t = (k as f64 + 0.5) * h;
                let eig = graph.hamiltonian(&controls.frequencies(t))?.eigen();
                u = eig.propagator(h) * u;
            }
            let states = ops.iter().map(|o| &u * o * u.adjoint()).collect();
            Ok(result(Some(u), states))
        }
        Some(noise) => {
            let diss = Dissipation::new(graph, &probe, noise)?;
            let mut states = ops;
            for k in 0..n_steps {
                let t = (k as f64 + 0.5) * h;
                let freqs = controls.frequencies(t);
                let eig = graph.hamiltonian(&freqs)?.eigen();
                let factors = diss.half_step_factors(graph, &eig, &freqs, h);
                let v = to_complex(&eig.vectors);
                let vt = v.transpose();
                let half = |rho: &CMatrix| -> CMatrix {
                    let mut r = &vt * rho * &v;
                    r.component_mul_assign(&factors);
                    &v * r * &vt
                };
                states.par_iter_mut().for_each(|rho| {
                    let r = half(rho);
                    let r = diss.relaxation_step(&r, h);
                    *rho = half(&r);
                });
            }
            Ok(result(None, states))
        }
    }
}

/// Change between two runs: gate infidelity for propagators, otherwise the largest
/// `||a - b||_F^2 / 2`, which equals the infidelity when both outputs are pure.
fn change(a: &EvolutionResult, b: &EvolutionResult) -> f64 {
    if let (Some(u), Some(v)) = (&a.unitary, &b.unitary) {
        let d = u.nrows() as f64;
        return (1.0 - (trace(&(u.adjoint() * v)) / d).norm_sqr()).abs();
    }
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| 0.5 * (x - y).norm_squared())
        .fold(0.0, f64::max)
}

/// Evolves `initial` under `waveforms` (mode label -> waveform); undriven modes stay at their
/// sweetspots. `noise` switches on the open-system integrator for the listed modes.
pub fn evolve(
    graph: &DeviceGraph,
    waveforms: &BTreeMap<String, PulseWaveform>,
    initial: &Initial,
    noise: Option<&BTreeMap<String, NoiseSpec>>,
    options: &EvolveOptions,
) -> Result<EvolutionResult> {
    if !(options.substep > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "substep must be positive, got {}",
            options.substep
        )));
    }
    let controls = Controls::new(graph, waveforms)?;
    let mut n = ((controls.duration / options.substep).round() as usize).max(1);
    let mut current = run_once(graph, &controls, initial, noise, n)?;
    if !options.adaptive {
        return Ok(current);
    }
    let mut last_change = f64::INFINITY;
    for refinement in 1..=options.max_refinements {
        n *= 2;
        let finer = run_once(graph, &controls, initial, noise, n)?;
        last_change = change(&current, &finer);
        current = finer;
        current.refinements = refinement;
        if last_change < options.tolerance {
            return Ok(current);
        }
    }
    Err(Error::NonConvergedStep {
        refinements: options.max_refinements,
        change: last_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::ModeSpec;

    fn single(f: f64) -> DeviceGraph {
        DeviceGraph::new(vec![ModeSpec::transmon("Q", f, -0.25)], vec![]).unwrap()
    }

    #[test]
    fn controls_interpolate_between_centres() {
        let g = single(5.0);
        let w = PulseWaveform::new(vec![4.0, 4.2, 4.6], 1.0, WaveformKind::QubitFrequency).unwrap();
        let map = BTreeMap::from([("Q".to_string(), w)]);
        let c = Controls::new(&g, &map).unwrap();
        assert_eq!(c.duration, 3.0);
        assert_eq!(c.frequencies(0.2)[0], 4.0);
        assert!((c.frequencies(1.0)[0] - 4.1).abs() < 1e-12);
        assert!((c.frequencies(2.25)[0] - 4.5).abs() < 1e-12);
        assert_eq!(c.frequencies(2.9)[0], 4.6);
    }

    #[test]
    fn mismatched_waveforms_rejected() {
        let g = DeviceGraph::new(
            vec![
                ModeSpec::transmon("A", 5.0, -0.25),
                ModeSpec::transmon("B", 5.1, -0.25),
            ],
            vec![],
        )
        .unwrap();
        let map = BTreeMap::from([
            (
                "A".to_string(),
                PulseWaveform::constant(5.0, 4, 0.5, WaveformKind::QubitFrequency),
            ),
            (
                "B".to_string(),
                PulseWaveform::constant(5.1, 5, 0.5, WaveformKind::QubitFrequency),
            ),
        ]);
        assert!(Controls::new(&g, &map).is_err());
    }

    #[test]
    fn relaxation_is_trace_free() {
        let g = single(5.0).with_levels(4);
        let h = g.hamiltonian(&[5.0]).unwrap();
        let noise = BTreeMap::from([("Q".to_string(), NoiseSpec::new(1.0, 1.0, 1.5))]);
        let diss = Dissipation::new(&g, &h, &noise).unwrap();
        let rho = CMatrix::from_fn(4, 4, |i, j| {
            C64::new((i + 2 * j) as f64, i as f64 - j as f64)
        });
        assert!(trace(&diss.relaxation(&rho)).norm() < 1e-15);
        // |3><3| decays into |2><2| at rate 3 G
        let mut top = CMatrix::zeros(4, 4);
        top[(3, 3)] = C64::from(1.0);
        let d = diss.relaxation(&top);
        assert!((d[(2, 2)].re - 3e-3).abs() < 1e-15 && (d[(3, 3)].re + 3e-3).abs() < 1e-15);
    }
}
