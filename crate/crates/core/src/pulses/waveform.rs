use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::ModeSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformKind {
    CouplerFrequency,
    QubitFrequency,
    FluxAmplitude,
}

impl WaveformKind {
    pub fn name(self) -> &'static str {
        match self {
            WaveformKind::CouplerFrequency => "coupler_frequency",
            WaveformKind::QubitFrequency => "qubit_frequency",
            WaveformKind::FluxAmplitude => "flux_amplitude",
        }
    }

    pub fn units(self) -> &'static str {
        match self {
            WaveformKind::FluxAmplitude => "Phi0",
            _ => "GHz",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Self::CouplerFrequency,
            Self::QubitFrequency,
            Self::FluxAmplitude,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Uniformly sampled control trajectory; sample `k` holds the value on `[k dt, (k + 1) dt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseWaveform {
    pub samples: Vec<f64>,
    /// ns.
    pub dt: f64,
    pub kind: WaveformKind,
}

impl PulseWaveform {
    pub fn new(samples: Vec<f64>, dt: f64, kind: WaveformKind) -> Result<Self> {
        let w = PulseWaveform { samples, dt, kind };
        w.validate()?;
        Ok(w)
    }

    pub fn constant(value: f64, n: usize, dt: f64, kind: WaveformKind) -> Self {
        PulseWaveform {
            samples: vec![value; n],
            dt,
            kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample spacing must be positive, got {}",
                self.dt
            )));
        }
        if let Some(k) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample {k} is not finite")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// ns.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    /// Flux amplitude of every sample through the arc of `spec`.
    pub fn frequency_to_amplitude(&self, spec: &ModeSpec) -> Result<PulseWaveform> {
        if self.kind == WaveformKind::FluxAmplitude {
            return Err(Error::InvalidParameter(
                "waveform already holds flux amplitudes".into(),
            ));
        }
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(index, &f)| {
                spec.flux_for_frequency(f)
                    .map_err(|_| Error::OutOfArcRangeAt {
                        mode: spec.label.clone(),
                        index,
                        value: f,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PulseWaveform {
            samples,
            dt: self.dt,
            kind: WaveformKind::FluxAmplitude,
        })
    }

    /// Inverse of [`frequency_to_amplitude`](Self::frequency_to_amplitude).
    pub fn amplitude_to_frequency(
        &self,
        spec: &ModeSpec,
        kind: WaveformKind,
    ) -> Result<PulseWaveform> {
        if self.kind != WaveformKind::FluxAmplitude || kind == WaveformKind::FluxAmplitude {
            return Err(Error::InvalidParameter(
                "expected a flux waveform and a frequency target kind".into(),
            ));
        }
        let samples = self
            .samples
            .iter()
            .map(|&phi| spec.frequency_at_flux(phi))
            .collect();
        Ok(PulseWaveform {
            samples,
            dt: self.dt,
            kind,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# kind = {}", self.kind.name()).unwrap();
        writeln!(out, "# dt_ns = {:?}", self.dt).unwrap();
        writeln!(out, "# units = {}", self.kind.units()).unwrap();
        out.push_str("index,value\n");
        for (k, v) in self.samples.iter().enumerate() {
            writeln!(out, "{k},{v:?}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str, file: &str) -> Result<PulseWaveform> {
        let bad = |line: usize, message: String| Error::Validation {
            file: file.to_string(),
            line,
            message,
        };
        let (mut kind, mut dt) = (None, None);
        let mut samples = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw == "index,value" {
                continue;
            }
            if let Some(meta) = raw.strip_prefix('#') {
                let Some((key, value)) = meta.split_once('=') else {
                    continue;
                };
                match key.trim() {
                    "kind" => {
                        kind = Some(WaveformKind::parse(value.trim()).ok_or_else(|| {
                            bad(line, format!("unknown waveform kind `{}`", value.trim()))
                        })?)
                    }
                    "dt_ns" => {
                        dt = Some(
                            value
                                .trim()
                                .parse::<f64>()
                                .map_err(|e| bad(line, e.to_string()))?,
                        )
                    }
                    _ => {}
                }
                continue;
            }
            let (idx, value) = raw
                .split_once(',')
                .ok_or_else(|| bad(line, "expected `index,value`".into()))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| bad(line, format!("bad index `{idx}`")))?;
            if idx != samples.len() {
                return Err(bad(
                    line,
                    format!("expected index {}, found {idx}", samples.len()),
                ));
            }
            samples.push(
                value
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| bad(line, e.to_string()))?,
            );
        }
        let kind = kind.ok_or_else(|| bad(1, "missing `# kind` header".into()))?;
        let dt = dt.ok_or_else(|| bad(1, "missing `# dt_ns` header".into()))?;
        PulseWaveform::new(samples, dt, kind)
    }

    pub fn load(path: &Path) -> Result<PulseWaveform> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&text, &path.display().to_string())
    }
}
