use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::mode::{ModeKind, ModeSpec};
use crate::{Error, Result};

/// Two transmons joined through a tunable coupler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCoupling {
    pub qubit_a: String,
    pub qubit_b: String,
    pub coupler: String,
    /// Direct qubit-qubit coupling, MHz.
    pub g_qq: f64,
    /// Coupling of `qubit_a` to the coupler, MHz.
    pub g_qc_a: f64,
    /// Coupling of `qubit_b` to the coupler, MHz.
    pub g_qc_b: f64,
}

impl EdgeCoupling {
    pub fn new(qubit_a: &str, qubit_b: &str, coupler: &str, g_qq: f64, g_qc: f64) -> Self {
        EdgeCoupling {
            qubit_a: qubit_a.into(),
            qubit_b: qubit_b.into(),
            coupler: coupler.into(),
            g_qq,
            g_qc_a: g_qc,
            g_qc_b: g_qc,
        }
    }

    pub fn name(&self) -> String {
        format!("{}-{}-{}", self.qubit_a, self.coupler, self.qubit_b)
    }
}

/// A plain pairwise capacitive coupling `g (a + a^dag)(b + b^dag)`, MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoupling {
    pub a: String,
    pub b: String,
    pub g: f64,
}

/// Coherence parameters of one mode. Times in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub t1: f64,
    pub t2_ramsey: f64,
    pub t2_echo: f64,
    /// 1/f flux-noise amplitude, flux quanta.
    pub flux_noise_amp: f64,
}

/// `sqrt(2 ln(f_uv / f_ir))` for the 1/f spectrum: a 1 Hz infrared cutoff and ~10 kHz
/// effective bandwidth of a microsecond-scale sequence.
pub const ONE_OVER_F_LOG_FACTOR: f64 = 4.3;

impl NoiseSpec {
    pub fn new(t1: f64, t2_ramsey: f64, t2_echo: f64) -> Self {
        NoiseSpec {
            t1,
            t2_ramsey,
            t2_echo,
            flux_noise_amp: 0.0,
        }
    }

    /// Messages for violated `T2R <= T2E <= 2 T1`; measured tables can miss these marginally,
    /// so they are reported rather than rejected.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.t2_ramsey > self.t2_echo {
            out.push(format!(
                "T2 Ramsey {} us exceeds T2 echo {} us",
                self.t2_ramsey, self.t2_echo
            ));
        }
        if self.t2_echo > 2.0 * self.t1 {
            out.push(format!(
                "T2 echo {} us exceeds 2 T1 = {} us",
                self.t2_echo,
                2.0 * self.t1
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t1", self.t1),
            ("t2_ramsey", self.t2_ramsey),
            ("t2_echo", self.t2_echo),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.flux_noise_amp >= 0.0) {
            return Err(Error::InvalidParameter(
                "flux noise amplitude must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Energy relaxation rate, 1/ns.
    pub fn relaxation_rate(&self) -> f64 {
        1.0 / (self.t1 * 1e3)
    }

    /// White pure-dephasing rate from the echo time, `1/T2E - 1/(2 T1)`, 1/ns (clamped at zero).
    pub fn echo_dephasing_rate(&self) -> f64 {
        (1.0 / self.t2_echo - 0.5 / self.t1).max(0.0) * 1e-3
    }

    /// Quasi-static dephasing rate left over between Ramsey and echo, 1/ns.
    pub fn quasistatic_rate(&self) -> f64 {
        (1.0 / self.t2_ramsey - 1.0 / self.t2_echo).max(0.0) * 1e-3
    }

    /// Dephasing rate (1/ns) from 1/f flux noise at flux sensitivity `slope` (GHz per flux quantum).
    pub fn flux_dephasing_rate(&self, slope: f64) -> f64 {
        std::f64::consts::TAU * self.flux_noise_amp * slope.abs() * ONE_OVER_F_LOG_FACTOR
    }
}

/// Modes, tunable-coupler edges and extra pairwise couplings of a device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceGraph {
    pub modes: Vec<ModeSpec>,
    pub edges: Vec<EdgeCoupling>,
    #[serde(default)]
    pub extra_couplings: Vec<ModeCoupling>,
    #[serde(default)]
    pub noise: BTreeMap<String, NoiseSpec>,
}

impl DeviceGraph {
    pub fn new(modes: Vec<ModeSpec>, edges: Vec<EdgeCoupling>) -> Result<Self> {
        let graph = DeviceGraph {
            modes,
            edges,
            extra_couplings: Vec::new(),
            noise: BTreeMap::new(),
        };
        graph.validate()?;
        Ok(graph)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.modes.iter().enumerate() {
            m.validate()?;
            if self.modes[..i].iter().any(|o| o.label == m.label) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate mode label {}",
                    m.label
                )));
            }
        }
        for e in &self.edges {
            let ids = [&e.qubit_a, &e.qubit_b, &e.coupler];
            for id in ids {
                self.mode_index(id)?;
            }
            if e.qubit_a == e.qubit_b || e.qubit_a == e.coupler || e.qubit_b == e.coupler {
                return Err(Error::InvalidParameter(format!(
                    "edge {} repeats a mode",
                    e.name()
                )));
            }
            if !(e.g_qc_a > 0.0 && e.g_qc_b > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge {}: qubit-coupler couplings must be positive",
                    e.name()
                )));
            }
        }
        for c in &self.extra_couplings {
            self.mode_index(&c.a)?;
            self.mode_index(&c.b)?;
            if c.a == c.b {
                return Err(Error::InvalidParameter(format!("self coupling on {}", c.a)));
            }
        }
        for (label, n) in &self.noise {
            self.mode_index(label)?;
            n.validate()?;
        }
        Ok(())
    }

    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn mode(&self, label: &str) -> Result<&ModeSpec> {
        Ok(&self.modes[self.mode_index(label)?])
    }

    pub fn edge(&self, name_or_coupler: &str) -> Result<&EdgeCoupling> {
        self.edges
            .iter()
            .find(|e| e.coupler == name_or_coupler || e.name() == name_or_coupler)
            .ok_or_else(|| Error::UnknownMode(name_or_coupler.to_string()))
    }

    pub fn noise_for(&self, label: &str) -> Option<&NoiseSpec> {
        self.noise.get(label)
    }

    /// All pairwise couplings as `(mode_i, mode_j, g in MHz)`.
    pub fn pair_couplings(&self) -> Vec<(usize, usize, f64)> {
        let idx = |l: &str| self.mode_index(l).expect("validated graph");
        let mut out = Vec::new();
        for e in &self.edges {
            let (a, b, c) = (idx(&e.qubit_a), idx(&e.qubit_b), idx(&e.coupler));
            if e.g_qq != 0.0 {
                out.push((a, b, e.g_qq));
            }
            out.push((a, c, e.g_qc_a));
            out.push((b, c, e.g_qc_b));
        }
        for c in &self.extra_couplings {
            out.push((idx(&c.a), idx(&c.b), c.g));
        }
        out
    }

    pub fn sweetspot_frequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.f_sweetspot).collect()
    }

    /// Restriction to `labels` (in that order), keeping every coupling between kept modes.
    pub fn subgraph(&self, labels: &[&str]) -> Result<DeviceGraph> {
        let modes = labels
            .iter()
            .map(|l| self.mode(l).cloned())
            .collect::<Result<Vec<_>>>()?;
        let kept = |l: &String| labels.contains(&l.as_str());
        let mut edges = Vec::new();
        let mut extra = Vec::new();
        for e in &self.edges {
            let (a, b, c) = (kept(&e.qubit_a), kept(&e.qubit_b), kept(&e.coupler));
            if a && b && c {
                edges.push(e.clone());
                continue;
            }
            if a && b && e.g_qq != 0.0 {
                extra.push(ModeCoupling {
                    a: e.qubit_a.clone(),
                    b: e.qubit_b.clone(),
                    g: e.g_qq,
                });
            }
            if a && c {
                extra.push(ModeCoupling {
                    a: e.qubit_a.clone(),
                    b: e.coupler.clone(),
                    g: e.g_qc_a,
                });
            }
            if b && c {
                extra.push(ModeCoupling {
                    a: e.qubit_b.clone(),
                    b: e.coupler.clone(),
                    g: e.g_qc_b,
                });
            }
        }
        for c in &self.extra_couplings {
            if kept(&c.a) && kept(&c.b) {
                extra.push(c.clone());
            }
        }
        let noise = self
            .noise
            .iter()
            .filter(|(k, _)| kept(k))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        Ok(DeviceGraph {
            modes,
            edges,
            extra_couplings: extra,
            noise,
        })
    }

    /// Three-mode subsystem `[qubit_a, coupler, qubit_b]` of an edge.
    pub fn edge_subsystem(&self, edge: &EdgeCoupling) -> Result<DeviceGraph> {
        self.subgraph(&[&edge.qubit_a, &edge.coupler, &edge.qubit_b])
    }

    pub fn with_levels(mut self, n_levels: usize) -> Self {
        for m in &mut self.modes {
            m.n_levels = n_levels;
        }
        self
    }

    pub fn transmons(&self) -> impl Iterator<Item = &ModeSpec> {
        self.modes.iter().filter(|m| m.kind == ModeKind::Transmon)
    }
}
