use serde::{Deserialize, Serialize};

use super::{run_parity, DefectCurve, ParityExperiment, TogglePattern};
use crate::dynamics::ChevronMap;
use crate::io::CsvTable;
use crate::spectrum::InteractionProfile;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasPoint {
    /// GHz.
    pub bias: f64,
    /// kHz.
    pub xi_zz: f64,
    pub j2_exchange_prob: f64,
    pub untoggled: DefectCurve,
    pub toggled: DefectCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasScan {
    pub points: Vec<BiasPoint>,
}

/// Rounds used for slopes: after the leakage transient, up to the end.
const SLOPE_FROM: usize = 20;

impl BiasScan {
    /// Bias with the lowest final-round toggled defect rate.
    pub fn toggled_argmin(&self) -> Option<&BiasPoint> {
        self.points
            .iter()
            .min_by(|a, b| a.toggled.last().total_cmp(&b.toggled.last()))
    }

    /// One row per bias: final-round defect rates and slopes of both variants.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new([
            "bias_ghz",
            "xi_zz_khz",
            "j2_exchange_prob",
            "untoggled_final",
            "toggled_final",
            "untoggled_slope",
            "toggled_slope",
        ]);
        for p in &self.points {
            let n = p.toggled.defect_rate.len();
            t.push(vec![
                p.bias.into(),
                p.xi_zz.into(),
                p.j2_exchange_prob.into(),
                p.untoggled.last().into(),
                p.toggled.last().into(),
                p.untoggled.slope(SLOPE_FROM, n).into(),
                p.toggled.slope(SLOPE_FROM, n).into(),
            ]);
        }
        t
    }

    /// Per-round curves, long format.
    pub fn curves_csv(&self) -> CsvTable {
        let mut t = CsvTable::new([
            "bias_ghz",
            "toggled",
            "round",
            "defect_rate",
            "leak_population",
        ]);
        for p in &self.points {
            for (toggled, c) in [(false, &p.untoggled), (true, &p.toggled)] {
                for (k, (d, l)) in c.defect_rate.iter().zip(&c.leak_population).enumerate() {
                    t.push(vec![
                        p.bias.into(),
                        toggled.into(),
                        (k + 1).into(),
                        (*d).into(),
                        (*l).into(),
                    ]);
                }
            }
        }
        t
    }
}

/// Transfer of the chevron row nearest `bias` in the column nearest `amplitude`; zero where the
/// exchange coupling is undefined.
fn exchange_at(chevron: &ChevronMap, bias: f64, amplitude: f64) -> f64 {
    let nearest = |xs: &[f64], x: f64| {
        (0..xs.len()).min_by(|&a, &b| (xs[a] - x).abs().total_cmp(&(xs[b] - x).abs()))
    };
    match (
        nearest(&chevron.coupler_freqs, bias),
        nearest(&chevron.amplitudes, amplitude),
    ) {
        (Some(i), Some(j)) => chevron.transfer[i][j].unwrap_or(0.0),
        _ => 0.0,
    }
}

/// Untoggled and spectator-toggled runs at each spectator-coupler bias. The residual ZZ comes
/// from `profile` and the measurement exchange from `chevron` at `readout_amplitude`.
pub fn defect_rate_vs_bias(
    template: &ParityExperiment,
    bias_grid: &[f64],
    profile: &InteractionProfile,
    chevron: Option<&ChevronMap>,
    readout_amplitude: f64,
) -> Result<BiasScan> {
    template.validate()?;
    let points = bias_grid
        .iter()
        .map(|&bias| {
            let xi = profile.xi_zz_at(bias).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "bias {bias} GHz has no xi_zz sample in the profile of {}",
                    profile.edge
                ))
            })?;
            let j2 = chevron.map_or(0.0, |c| exchange_at(c, bias, readout_amplitude));
            let mut exp = template.clone();
            exp.coupler_bias = bias;
            exp.toggle_parity = TogglePattern::EveryRound;
            exp.error_params.xi_zz_spectator = xi;
            exp.error_params.j2_exchange_prob = j2;
            exp.toggle_spectator = false;
            let untoggled = run_parity(&exp)?.curve();
            exp.toggle_spectator = true;
            let toggled = run_parity(&exp)?.curve();
            Ok(BiasPoint {
                bias,
                xi_zz: xi,
                j2_exchange_prob: j2,
                untoggled,
                toggled,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BiasScan { points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetuningScan {
    /// MHz.
    pub detunings: Vec<f64>,
    pub curves: Vec<DefectCurve>,
}

impl DetuningScan {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(["detuning_mhz", "round", "defect_rate", "leak_population"]);
        for (d, c) in self.detunings.iter().zip(&self.curves) {
            for (k, (rate, l)) in c.defect_rate.iter().zip(&c.leak_population).enumerate() {
                t.push(vec![
                    (*d).into(),
                    (k + 1).into(),
                    (*rate).into(),
                    (*l).into(),
                ]);
            }
        }
        t
    }
}

/// Replaces the spectator by an ancilla detuning on odd rounds, one run per detuning (MHz).
pub fn emulated_zz_detuning(
    template: &ParityExperiment,
    detuning_grid: &[f64],
) -> Result<DetuningScan> {
    if template.toggle_parity != TogglePattern::OddRoundsDetuning {
        return Err(Error::InvalidParameter(
            "detuning emulation needs toggle_parity = odd_rounds_detuning".into(),
        ));
    }
    let curves = detuning_grid
        .iter()
        .map(|&d| {
            let mut exp = template.clone();
            exp.ancilla_detuning = d;
            Ok(run_parity(&exp)?.curve())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DetuningScan {
        detunings: detuning_grid.to_vec(),
        curves,
    })
}

/// Assignment error and measurement-induced leakage versus readout amplitude: a signal-to-noise
/// term that falls with amplitude and a leakage term that grows as a power of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutErrorModel {
    pub eps_floor: f64,
    /// Amplitude at which the overlap error has fallen by `1/e`.
    pub snr_amplitude: f64,
    pub leak_coeff: f64,
    pub leak_power: f64,
}

impl Default for ReadoutErrorModel {
    fn default() -> Self {
        ReadoutErrorModel {
            eps_floor: 0.015,
            snr_amplitude: 1.5,
            leak_coeff: 1e-5,
            leak_power: 3.0,
        }
    }
}

impl ReadoutErrorModel {
    /// `(eps_ro, p_leak_meas)` at amplitude `amp`.
    pub fn errors(&self, amp: f64) -> (f64, f64) {
        let eps = self.eps_floor + 0.5 * (-(amp / self.snr_amplitude).powi(2)).exp();
        let leak = self.leak_coeff * amp.powf(self.leak_power);
        (eps.min(0.5), leak.min(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeScan {
    pub amplitudes: Vec<f64>,
    pub eps_ro: Vec<f64>,
    pub p_leak_meas: Vec<f64>,
    pub curves: Vec<DefectCurve>,
    /// Amplitude with the lowest final-round defect rate.
    pub argmin: f64,
}

impl AmplitudeScan {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new([
            "amplitude",
            "eps_ro",
            "p_leak_meas",
            "final_defect_rate",
            "slope",
        ]);
        for (k, c) in self.curves.iter().enumerate() {
            let n = c.defect_rate.len();
            t.push(vec![
                self.amplitudes[k].into(),
                self.eps_ro[k].into(),
                self.p_leak_meas[k].into(),
                c.last().into(),
                c.slope(SLOPE_FROM, n).into(),
            ]);
        }
        t
    }
}

/// Final-round defect rate versus readout amplitude; `errors` maps an amplitude to
/// `(eps_ro, p_leak_meas)`.
pub fn readout_amplitude_sweep(
    template: &ParityExperiment,
    amp_grid: &[f64],
    errors: impl Fn(f64) -> (f64, f64),
) -> Result<AmplitudeScan> {
    if amp_grid.is_empty() {
        return Err(Error::InvalidParameter("amplitude grid is empty".into()));
    }
    let mut scan = AmplitudeScan {
        amplitudes: amp_grid.to_vec(),
        eps_ro: Vec::new(),
        p_leak_meas: Vec::new(),
        curves: Vec::new(),
        argmin: amp_grid[0],
    };
    for &a in amp_grid {
        let (eps, leak) = errors(a);
        let mut exp = template.clone();
        exp.error_params.eps_ro = eps;
        exp.error_params.p_leak_meas = leak;
        scan.eps_ro.push(eps);
        scan.p_leak_meas.push(leak);
        scan.curves.push(run_parity(&exp)?.curve());
    }
    let best = (0..amp_grid.len())
        .min_by(|&a, &b| scan.curves[a].last().total_cmp(&scan.curves[b].last()))
        .unwrap_or(0);
    scan.argmin = amp_grid[best];
    Ok(scan)
}
