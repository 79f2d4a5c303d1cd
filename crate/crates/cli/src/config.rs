//! Run-configuration files.
//!
//! A run file is TOML like the device files. Top-level keys set the shared flags; one optional
//! table per subcommand holds its parameters. Every table and key is optional.
//!
//! ```toml
//! device = "five_qubit_star.toml"   # relative to this file
//! out = "results"
//! seed = 7
//! jobs = 4
//!
//! [cz]
//! edge = "C02"
//! mode = "landscape"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tcsim_core::captable::DesignTargets;
use tcsim_core::dynamics::{EvolveOptions, ReadoutSpec};
use tcsim_core::io::parse_toml;
use tcsim_core::parity::{ErrorChannelSet, ReadoutErrorModel};
use tcsim_core::spectrum::Manifold;
use tcsim_core::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunFile {
    pub device: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub sweep_interactions: SweepConfig,
    pub cz: CzConfig,
    pub readout_exchange: ReadoutConfig,
    pub parity: ParityConfig,
    pub lut_design: LutConfig,
}

impl RunFile {
    /// Parses `path`; relative paths inside resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut run: RunFile = parse_toml(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let mut paths: Vec<&mut PathBuf> =
            run.device.iter_mut().chain(run.out.iter_mut()).collect();
        if let Some(f) = run.lut_design.luts.as_mut() {
            paths.extend([&mut f.q_i, &mut f.coupler, &mut f.q_j]);
        }
        paths.into_iter().for_each(rebase);
        Ok(run)
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, n: usize) -> Self {
        Grid { start, stop, n }
    }

    pub fn points(&self, what: &str) -> Result<Vec<f64>> {
        if self.n == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{what}: grid needs finite ends and n >= 1"
            )));
        }
        if self.n == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.n - 1) as f64;
        Ok((0..self.n).map(|k| self.start + step * k as f64).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Edge names or coupler labels; empty means every edge.
    pub edges: Vec<String>,
    /// Coupler window in GHz; defaults to `span` below each coupler sweetspot.
    pub window: Option<[f64; 2]>,
    /// GHz.
    pub span: f64,
    pub n_points: usize,
    /// Closest two nulls may sit and still count as distinct, GHz.
    pub min_separation: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            edges: Vec::new(),
            window: None,
            span: 0.65,
            n_points: 27,
            min_separation: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CzMode {
    Calibrate,
    Landscape,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CzConfig {
    pub edge: String,
    pub mode: CzMode,
    /// Pulse length for calibration, ns.
    pub t_p: f64,
    /// `theta_f` bracket for calibration, rad.
    pub search_box: [f64; 2],
    /// Coupler idle frequency, GHz; defaults to the exchange null.
    pub f_idle: Option<f64>,
    /// Also evaluate the calibrated gate with the device coherence times.
    pub noisy: bool,
    pub theta_f: Grid,
    /// Pulse lengths of the landscape, ns.
    pub t_p_grid: Grid,
    pub evolve: Option<EvolveOptions>,
}

impl Default for CzConfig {
    fn default() -> Self {
        CzConfig {
            edge: "C01".into(),
            mode: CzMode::Calibrate,
            t_p: 60.0,
            search_box: [0.15, 1.4],
            f_idle: None,
            noisy: true,
            theta_f: Grid::new(0.15, 1.4, 41),
            t_p_grid: Grid::new(20.0, 100.0, 41),
            evolve: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldArg {
    OneExcitation,
    TwoExcitation,
}

impl From<ManifoldArg> for Manifold {
    fn from(m: ManifoldArg) -> Self {
        match m {
            ManifoldArg::OneExcitation => Manifold::OneExcitation,
            ManifoldArg::TwoExcitation => Manifold::TwoExcitation,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReadoutConfig {
    pub edge: String,
    /// Transmon whose readout is driven.
    pub measured: String,
    pub manifold: ManifoldArg,
    /// Coupler frequencies, GHz; defaults to `span` below the coupler sweetspot.
    pub coupler: Option<Grid>,
    pub span: f64,
    pub n_points: usize,
    pub readout: ReadoutSpec,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        ReadoutConfig {
            edge: "C01".into(),
            measured: "Q0".into(),
            manifold: ManifoldArg::OneExcitation,
            coupler: None,
            span: 0.65,
            n_points: 27,
            readout: ReadoutSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ParityMode {
    /// Toggled and untoggled defect rates versus spectator-coupler bias.
    Bias,
    /// Odd-round ancilla detuning next to the equivalent toggled spectator.
    Detuning,
    /// Defect rate versus readout amplitude.
    Amplitude,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParityConfig {
    pub mode: ParityMode,
    pub n_rounds: usize,
    pub n_shots: usize,
    pub data_qubits: [String; 2],
    pub ancilla: String,
    pub spectator: String,
    /// Coupler between ancilla and spectator.
    pub spectator_edge: String,
    pub error_params: Option<ErrorChannelSet>,
    /// Spectator-coupler biases, GHz; defaults to every other profile sample.
    pub bias: Option<Grid>,
    pub span: f64,
    pub profile_points: usize,
    /// Include measurement-induced exchange with the spectator.
    pub exchange: bool,
    pub readout_amplitude: f64,
    /// Odd-round ancilla detunings, MHz.
    pub detunings: Vec<f64>,
    pub amplitudes: Grid,
    pub readout_model: Option<ReadoutErrorModel>,
}

impl Default for ParityConfig {
    fn default() -> Self {
        ParityConfig {
            mode: ParityMode::Bias,
            n_rounds: 100,
            n_shots: 4000,
            data_qubits: ["Q1".into(), "Q2".into()],
            ancilla: "Q0".into(),
            spectator: "Q4".into(),
            spectator_edge: "C04".into(),
            error_params: None,
            bias: None,
            span: 0.65,
            profile_points: 27,
            exchange: true,
            readout_amplitude: 3.0,
            detunings: vec![0.0, 0.05, 0.1, 0.2, 0.4],
            amplitudes: Grid::new(0.5, 6.0, 12),
            readout_model: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LutFiles {
    pub q_i: PathBuf,
    pub coupler: PathBuf,
    pub q_j: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    /// Relative corner perturbation.
    pub perturbation: f64,
    /// Bow of the synthetic truth that the corner tables cannot represent.
    pub curvature: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            perturbation: 0.0,
            curvature: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LutConfig {
    pub targets: DesignTargets,
    /// Corner-table files; the synthetic generator is used when absent.
    pub luts: Option<LutFiles>,
    pub synthetic: SyntheticConfig,
    /// GHz per island label.
    pub josephson: BTreeMap<String, f64>,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub self_test: bool,
}

impl Default for LutConfig {
    fn default() -> Self {
        LutConfig {
            targets: DesignTargets {
                g_qq: 6.0,
                g_qc: 70.0,
                e_c: None,
            },
            luts: None,
            synthetic: SyntheticConfig::default(),
            josephson: BTreeMap::from([
                ("Q1".into(), 14.4),
                ("C12".into(), 21.5),
                ("Q2".into(), 14.4),
            ]),
            max_iterations: 200,
            tolerance: 1e-4,
            self_test: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_include_both_ends() {
        let p = Grid::new(1.0, 2.0, 5).points("g").unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!((p[0], p[4]), (1.0, 2.0));
        assert_eq!(Grid::new(3.0, 9.0, 1).points("g").unwrap(), vec![3.0]);
        assert!(Grid::new(0.0, 1.0, 0).points("g").is_err());
        assert!(Grid::new(0.0, f64::NAN, 3).points("g").is_err());
    }

    #[test]
    fn every_table_is_optional() {
        let run: RunFile = parse_toml("", "empty.toml").unwrap();
        assert_eq!(run.cz.t_p, 60.0);
        assert_eq!(run.parity.mode, ParityMode::Bias);
        let run: RunFile =
            parse_toml("[readout_exchange.readout]\nkappa = 3.0\n", "r.toml").unwrap();
        assert_eq!(run.readout_exchange.readout.kappa, 3.0);
        assert_eq!(run.readout_exchange.readout.chi, ReadoutSpec::default().chi);
    }
}
