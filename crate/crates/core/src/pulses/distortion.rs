//! Exponential-overshoot distortion of flux lines and its exact discrete inverse.
//!
//! A model with gain `g` and terms `(a_k, tau_k)` has the sampled step response
//! `s[n] = g (1 + sum_k a_k r_k^n)` with `r_k = exp(-dt / tau_k)`, i.e. the transfer function
//! `H(z) = g (1 + sum_k a_k (1 - z^-1) / (1 - r_k z^-1))`. Inputs are taken to be zero before the
//! first sample.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::waveform::PulseWaveform;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialTerm {
    pub amplitude: f64,
    /// ns.
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionModel {
    pub gain: f64,
    pub terms: Vec<ExponentialTerm>,
}

impl Default for DistortionModel {
    fn default() -> Self {
        DistortionModel {
            gain: 1.0,
            terms: Vec::new(),
        }
    }
}

/// Coefficients of `prod_k (1 - r_k z^-1)`, lowest power of `z^-1` first.
fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut p = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= r * c;
        }
        p = next;
    }
    p
}

impl DistortionModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gain must be positive, got {}",
                self.gain
            )));
        }
        for t in &self.terms {
            if !(t.tau > 0.0) || !(t.amplitude.abs() < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "terms need tau > 0 and |a| < 1, got a = {}, tau = {}",
                    t.amplitude, t.tau
                )));
            }
        }
        Ok(())
    }

    fn poles(&self, dt: f64) -> Vec<f64> {
        self.terms.iter().map(|t| (-dt / t.tau).exp()).collect()
    }

    /// Numerator and denominator of `H(z) / g` in powers of `z^-1`.
    fn rational(&self, dt: f64) -> (Vec<f64>, Vec<f64>) {
        let r = self.poles(dt);
        let den = poly_from_roots(&r);
        let mut num = den.clone();
        for (k, t) in self.terms.iter().enumerate() {
            let others: Vec<f64> = r
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &x)| x)
                .collect();
            let part = poly_from_roots(&others);
            // a_k (1 - z^-1) prod_{j != k} (1 - r_j z^-1)
            for (i, &c) in part.iter().enumerate() {
                num[i] += t.amplitude * c;
                num[i + 1] -= t.amplitude * c;
            }
        }
        (num, den)
    }

    /// Largest pole magnitude of the inverse filter.
    pub fn inverse_pole_radius(&self, dt: f64) -> f64 {
        let (num, _) = self.rational(dt);
        let order = num.len() - 1;
        if order == 0 {
            return 0.0;
        }
        // companion matrix of z^K + (n_1/n_0) z^(K-1) + ... + n_K/n_0
        let mut c = DMatrix::zeros(order, order);
        for j in 0..order {
            c[(0, j)] = -num[j + 1] / num[0];
        }
        for i in 1..order {
            c[(i, i - 1)] = 1.0;
        }
        c.complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, w: &PulseWaveform) -> Result<PulseWaveform> {
        self.validate()?;
        let r = self.poles(w.dt);
        let mut state = vec![0.0; r.len()];
        let mut prev = 0.0;
        let samples = w
            .samples
            .iter()
            .map(|&x| {
                let mut y = x;
                for (k, t) in self.terms.iter().enumerate() {
                    state[k] = r[k] * state[k] + t.amplitude * (x - prev);
                    y += state[k];
                }
                prev = x;
                self.gain * y
            })
            .collect();
        Ok(PulseWaveform {
            samples,
            dt: w.dt,
            kind: w.kind,
        })
    }

    /// Input that [`apply`](Self::apply) maps onto `w`.
    pub fn predistort(&self, w: &PulseWaveform) -> Result<PulseWaveform> {
        self.validate()?;
        let pole = self.inverse_pole_radius(w.dt);
        if pole >= 1.0 {
            return Err(Error::UnstableInverse { pole });
        }
        // step-by-step algebraic inverse of the recursion in `apply`
        let r = self.poles(w.dt);
        let a_sum: f64 = self.terms.iter().map(|t| t.amplitude).sum();
        let mut state = vec![0.0; r.len()];
        let mut prev = 0.0;
        let mut x = Vec::with_capacity(w.samples.len());
        for &y in &w.samples {
            let mut rhs = y / self.gain + a_sum * prev;
            for (k, s) in state.iter().enumerate() {
                rhs -= r[k] * s;
            }
            let xn = rhs / (1.0 + a_sum);
            for (k, t) in self.terms.iter().enumerate() {
                state[k] = r[k] * state[k] + t.amplitude * (xn - prev);
            }
            prev = xn;
            x.push(xn);
        }
        Ok(PulseWaveform {
            samples: x,
            dt: w.dt,
            kind: w.kind,
        })
    }
}
