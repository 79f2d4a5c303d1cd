//! Ramsey fringes of a transmon with CZ gates embedded between the two pi/2 pulses.
//!
//! The fringe decays from three sources: white dephasing and relaxation at rate
//! `1/(2 T1) + 1/T_phi` over the whole sequence, the quasi-static part left between Ramsey and
//! echo (Gaussian in the total time), and 1/f flux noise picked up while the transmon is
//! detuned during the gates (Gaussian in the accumulated excursion time, because the
//! excursions sample the same quasi-static flux).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::device::{DeviceGraph, NoiseSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamseyProtocol {
    pub n_cz: usize,
    /// Detuning of the probed transmon during each gate, MHz (zero or negative).
    pub qubit_detuning: f64,
    /// Time the transmon spends detuned per gate, ns.
    pub cz_duration: f64,
    /// Sequence time per gate including buffers, ns.
    pub slot: f64,
    /// Free evolution outside the gates, ns.
    pub base_delay: f64,
}

impl Default for RamseyProtocol {
    fn default() -> Self {
        RamseyProtocol {
            n_cz: 12,
            qubit_detuning: 0.0,
            cz_duration: 60.0,
            slot: 100.0,
            base_delay: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamseyTrace {
    pub amplitude: f64,
    /// Degrees.
    pub phase: f64,
    /// Second pulse phase (degrees) and excited-state probability.
    pub fringe: Vec<(f64, f64)>,
}

const FRINGE_POINTS: usize = 16;

pub fn ramsey_with_cz(
    graph: &DeviceGraph,
    qubit: &str,
    protocol: &RamseyProtocol,
    noise: Option<&NoiseSpec>,
) -> Result<RamseyTrace> {
    let mode = graph.mode(qubit)?;
    if protocol.qubit_detuning > 0.0 {
        return Err(Error::InvalidParameter(
            "a transmon can only be detuned below its sweetspot".into(),
        ));
    }
    if !(protocol.cz_duration >= 0.0
        && protocol.slot >= protocol.cz_duration
        && protocol.base_delay >= 0.0)
    {
        return Err(Error::InvalidParameter(
            "need 0 <= cz_duration <= slot and base_delay >= 0".into(),
        ));
    }
    let total = protocol.base_delay + protocol.n_cz as f64 * protocol.slot;
    let exposed = protocol.n_cz as f64 * protocol.cz_duration;
    let detuned = mode.f_sweetspot + protocol.qubit_detuning * 1e-3;
    if detuned < mode.arc_minimum() {
        return Err(Error::OutOfArcRange {
            mode: qubit.to_string(),
            target: detuned,
            min: mode.arc_minimum(),
            max: mode.f_sweetspot,
        });
    }
    let amplitude = match noise.or_else(|| graph.noise_for(qubit)) {
        None => 1.0,
        Some(n) => {
            n.validate()?;
            let white = 0.5 * n.relaxation_rate() + n.echo_dephasing_rate();
            let quasi = n.quasistatic_rate();
            let flux = n.flux_dephasing_rate(mode.flux_sensitivity_at(detuned));
            (-white * total - (quasi * total).powi(2) - (flux * exposed).powi(2)).exp()
        }
    };
    let phase = (TAU * protocol.qubit_detuning * 1e-3 * exposed)
        .to_degrees()
        .rem_euclid(360.0);
    let fringe = (0..FRINGE_POINTS)
        .map(|k| {
            let phi = 360.0 * k as f64 / FRINGE_POINTS as f64;
            (
                phi,
                0.5 * (1.0 + amplitude * (phi - phase).to_radians().cos()),
            )
        })
        .collect();
    Ok(RamseyTrace {
        amplitude,
        phase,
        fringe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::ModeSpec;

    fn device() -> DeviceGraph {
        let mut g =
            DeviceGraph::new(vec![ModeSpec::transmon("Q2", 5.181, -0.286)], vec![]).unwrap();
        let mut n = NoiseSpec::new(68.2, 33.7, 95.9);
        n.flux_noise_amp = 1e-5;
        g.noise.insert("Q2".into(), n);
        g
    }

    #[test]
    fn no_gates_is_bare_decay() {
        let g = device();
        let p = RamseyProtocol {
            n_cz: 0,
            base_delay: 5000.0,
            ..Default::default()
        };
        let r = ramsey_with_cz(&g, "Q2", &p, None).unwrap();
        let n = g.noise["Q2"];
        let t = 5000.0;
        let expected = (-(0.5 * n.relaxation_rate() + n.echo_dephasing_rate()) * t
            - (n.quasistatic_rate() * t).powi(2))
        .exp();
        assert!((r.amplitude - expected).abs() < 1e-12);
        assert_eq!(r.phase, 0.0);
    }

    #[test]
    fn fringe_spans_amplitude() {
        let r = ramsey_with_cz(&device(), "Q2", &RamseyProtocol::default(), None).unwrap();
        let (lo, hi) = r
            .fringe
            .iter()
            .fold((1.0f64, 0.0f64), |(a, b), &(_, p)| (a.min(p), b.max(p)));
        assert!((hi - lo - r.amplitude).abs() < 1e-12);
    }
}
