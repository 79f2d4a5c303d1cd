use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Transmon,
    Coupler,
}

/// One transmon-like mode: a qubit or a tunable coupler.
///
/// The flux arc is the asymmetric-SQUID transmon form
/// `f(phi) = sqrt(8 E_J E_C d(phi)) - E_C` with
/// `d(phi) = sqrt(cos^2(pi x) + a^2 sin^2(pi x))`, `x = phi - flux_offset`,
/// so the sweetspot (arc maximum) sits at `flux_offset` and the arc has period one flux quantum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub label: String,
    pub kind: ModeKind,
    /// Sweetspot 0-1 transition frequency, GHz.
    pub f_sweetspot: f64,
    /// Anharmonicity, GHz (negative).
    pub anharmonicity: f64,
    /// Junction asymmetry `a` in `[0, 1)`.
    pub squid_asymmetry: f64,
    /// Flux of the sweetspot, in flux quanta.
    pub flux_offset: f64,
    /// Number of levels kept in the truncated oscillator.
    pub n_levels: usize,
}

impl ModeSpec {
    pub fn new(
        label: impl Into<String>,
        kind: ModeKind,
        f_sweetspot: f64,
        anharmonicity: f64,
    ) -> Self {
        ModeSpec {
            label: label.into(),
            kind,
            f_sweetspot,
            anharmonicity,
            squid_asymmetry: 0.0,
            flux_offset: 0.0,
            n_levels: 3,
        }
    }

    pub fn transmon(label: impl Into<String>, f_sweetspot: f64, anharmonicity: f64) -> Self {
        Self::new(label, ModeKind::Transmon, f_sweetspot, anharmonicity)
    }

    pub fn coupler(label: impl Into<String>, f_sweetspot: f64, anharmonicity: f64) -> Self {
        Self::new(label, ModeKind::Coupler, f_sweetspot, anharmonicity)
    }

    pub fn with_levels(mut self, n_levels: usize) -> Self {
        self.n_levels = n_levels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| {
            Err(Error::InvalidParameter(format!(
                "mode {}: {msg}",
                self.label
            )))
        };
        if !(self.f_sweetspot > 0.0) {
            return bad(format!(
                "sweetspot frequency must be positive, got {}",
                self.f_sweetspot
            ));
        }
        if !(self.anharmonicity < 0.0) {
            return bad(format!(
                "anharmonicity must be negative, got {}",
                self.anharmonicity
            ));
        }
        if !(0.0..1.0).contains(&self.squid_asymmetry) {
            return bad(format!(
                "squid asymmetry must lie in [0, 1), got {}",
                self.squid_asymmetry
            ));
        }
        if self.n_levels < 2 {
            return bad(format!(
                "n_levels must be at least 2, got {}",
                self.n_levels
            ));
        }
        if !self.flux_offset.is_finite() {
            return bad("flux offset must be finite".into());
        }
        Ok(())
    }

    /// Charging energy `E_C = -alpha`, GHz.
    pub fn charging_energy(&self) -> f64 {
        -self.anharmonicity
    }

    /// Sweetspot Josephson energy from the transmon relation `f + E_C = sqrt(8 E_J E_C)`, GHz.
    pub fn josephson_energy(&self) -> f64 {
        let ec = self.charging_energy();
        (self.f_sweetspot + ec).powi(2) / (8.0 * ec)
    }

    fn squid_factor(&self, phi: f64) -> f64 {
        let x = PI * (phi - self.flux_offset);
        let (s, c) = x.sin_cos();
        (c * c + self.squid_asymmetry.powi(2) * s * s).sqrt()
    }

    pub fn frequency_at_flux(&self, phi: f64) -> f64 {
        let ec = self.charging_energy();
        (8.0 * self.josephson_energy() * ec * self.squid_factor(phi)).sqrt() - ec
    }

    /// Lowest frequency on the arc, reached half a flux quantum from the sweetspot.
    pub fn arc_minimum(&self) -> f64 {
        self.frequency_at_flux(self.flux_offset + 0.5)
    }

    /// Flux on the branch `[flux_offset, flux_offset + 0.5]` that tunes the mode to `f_target`.
    pub fn flux_for_frequency(&self, f_target: f64) -> Result<f64> {
        let (min, max) = (self.arc_minimum(), self.f_sweetspot);
        let tol = 1e-12 * max;
        if !(f_target <= max + tol && f_target >= min - tol) {
            return Err(Error::OutOfArcRange {
                mode: self.label.clone(),
                target: f_target,
                min,
                max,
            });
        }
        let ec = self.charging_energy();
        // d(phi) = ((f + E_C) / (f_ss + E_C))^2
        let d = ((f_target + ec) / (self.f_sweetspot + ec)).powi(2).min(1.0);
        let a2 = self.squid_asymmetry.powi(2);
        let cos2 = ((d * d - a2) / (1.0 - a2)).clamp(0.0, 1.0);
        Ok(self.flux_offset + cos2.sqrt().acos() / PI)
    }

    /// `df/dphi` in GHz per flux quantum.
    pub fn flux_slope(&self, phi: f64) -> f64 {
        let ec = self.charging_energy();
        let x = PI * (phi - self.flux_offset);
        let d = self.squid_factor(phi);
        if d == 0.0 {
            return 0.0;
        }
        let a2 = self.squid_asymmetry.powi(2);
        // d'(phi) = pi (a^2 - 1) sin(2x) / (2 d)
        let dd = PI * (a2 - 1.0) * (2.0 * x).sin() / (2.0 * d);
        let scale = (8.0 * self.josephson_energy() * ec).sqrt();
        scale * dd / (2.0 * d.sqrt())
    }

    /// `|df/dphi|` at the flux that places the mode at `f`; zero above the sweetspot.
    pub fn flux_sensitivity_at(&self, f: f64) -> f64 {
        if f >= self.f_sweetspot {
            return 0.0;
        }
        match self.flux_for_frequency(f.max(self.arc_minimum())) {
            Ok(phi) => self.flux_slope(phi).abs(),
            Err(_) => 0.0,
        }
    }
}
