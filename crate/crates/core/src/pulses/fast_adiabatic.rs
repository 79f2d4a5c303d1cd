use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::waveform::{PulseWaveform, WaveformKind};
use crate::{Error, Result};

pub const DEFAULT_SAMPLE_DT: f64 = 0.5;

/// Coupler frequency for mixing angle `theta = arctan(g_qc / (f_c - f_q))`.
///
/// `g_qc` in MHz, frequencies in GHz.
pub fn theta_to_coupler_frequency(theta: f64, g_qc: f64, f_q: f64) -> f64 {
    f_q + 1e-3 * g_qc / theta.tan()
}

pub fn coupler_frequency_to_theta(f_c: f64, g_qc: f64, f_q: f64) -> f64 {
    (1e-3 * g_qc).atan2(f_c - f_q)
}

/// Unipolar fast-adiabatic coupler excursion
/// `theta(t) = theta_i + (theta_f - theta_i)/2 (1 - cos(2 pi t / t_p))`, which starts and ends at
/// `theta_i` and peaks at `theta_f` halfway through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastAdiabaticSpec {
    pub theta_i: f64,
    pub theta_f: f64,
    /// ns.
    pub t_p: f64,
    /// ns.
    pub sample_dt: f64,
    /// MHz.
    pub g_qc: f64,
    /// Frequency of the higher transmon of the pair, GHz.
    pub f_q_high: f64,
}

impl FastAdiabaticSpec {
    /// Spec whose idle point is the coupler frequency `f_idle`.
    pub fn from_idle(
        f_idle: f64,
        theta_f: f64,
        t_p: f64,
        g_qc: f64,
        f_q_high: f64,
    ) -> Result<Self> {
        let spec = FastAdiabaticSpec {
            theta_i: coupler_frequency_to_theta(f_idle, g_qc, f_q_high),
            theta_f,
            t_p,
            sample_dt: DEFAULT_SAMPLE_DT,
            g_qc,
            f_q_high,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_sample_dt(mut self, dt: f64) -> Result<Self> {
        self.sample_dt = dt;
        self.validate()?;
        Ok(self)
    }

    /// `theta_i == theta_f` is accepted as the zero-excursion pulse.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.theta_i > 0.0 && self.theta_i <= self.theta_f && self.theta_f < FRAC_PI_2) {
            return bad(format!(
                "need 0 < theta_i <= theta_f < pi/2, got theta_i = {}, theta_f = {}",
                self.theta_i, self.theta_f
            ));
        }
        if !(self.t_p > 0.0 && self.t_p.is_finite()) {
            return bad(format!(
                "pulse duration must be positive, got {} ns",
                self.t_p
            ));
        }
        if !(self.sample_dt > 0.0) {
            return bad(format!(
                "sample spacing must be positive, got {} ns",
                self.sample_dt
            ));
        }
        let n = self.t_p / self.sample_dt;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return bad(format!(
                "sample spacing {} ns does not divide t_p = {} ns",
                self.sample_dt, self.t_p
            ));
        }
        if !(self.g_qc > 0.0) {
            return bad(format!("g_qc must be positive, got {} MHz", self.g_qc));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        (self.t_p / self.sample_dt).round() as usize
    }

    pub fn theta_at(&self, t: f64) -> f64 {
        self.theta_i + 0.5 * (self.theta_f - self.theta_i) * (1.0 - (2.0 * PI * t / self.t_p).cos())
    }

    /// `theta` at the sample centres `(k + 1/2) dt`.
    pub fn theta_trajectory(&self) -> Vec<f64> {
        (0..self.n_samples())
            .map(|k| self.theta_at((k as f64 + 0.5) * self.sample_dt))
            .collect()
    }

    pub fn idle_frequency(&self) -> f64 {
        theta_to_coupler_frequency(self.theta_i, self.g_qc, self.f_q_high)
    }

    /// Coupler frequency waveform (GHz) on the sample grid.
    pub fn coupler_waveform(&self) -> PulseWaveform {
        let samples = self
            .theta_trajectory()
            .into_iter()
            .map(|th| theta_to_coupler_frequency(th, self.g_qc, self.f_q_high))
            .collect();
        PulseWaveform {
            samples,
            dt: self.sample_dt,
            kind: WaveformKind::CouplerFrequency,
        }
    }
}
