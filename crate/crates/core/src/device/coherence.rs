use serde::Serialize;

use super::graph::DeviceGraph;
use super::mode::ModeKind;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayShape {
    Exponential,
    GaussianDominated,
}

/// Coherence of a transmon dressed by its neighbouring couplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridizedCoherence {
    /// Coupler participation `sin^2(theta)` summed over neighbouring couplers.
    pub coupler_weight: f64,
    /// Microseconds.
    pub t1_eff: f64,
    /// 1/e time of `exp(-G_w t - (G_f t)^2)`, microseconds.
    pub t2_eff: f64,
    /// Exponential (white) decay rate, 1/us.
    pub white_rate: f64,
    /// Gaussian (1/f flux) decay rate, 1/us.
    pub flux_rate: f64,
    pub decay_shape: DecayShape,
}

impl DeviceGraph {
    /// Effective `T1` and Ramsey `T2` of transmon `mode` with every mode at `frequencies`
    /// (GHz, graph order).
    ///
    /// The single-excitation dressed state of the transmon is decomposed over the bare
    /// excitations of the transmon and its couplers. Relaxation rates mix with those weights.
    /// The coupler-induced 1/f flux noise enters with the coupler weight as the sensitivity of
    /// the dressed transmon frequency to the coupler frequency.
    pub fn hybridized_coherence(
        &self,
        frequencies: &[f64],
        mode: &str,
    ) -> Result<HybridizedCoherence> {
        let m = self.mode(mode)?;
        if m.kind != ModeKind::Transmon {
            return Err(Error::InvalidParameter(format!("{mode} is not a transmon")));
        }
        if frequencies.len() != self.modes.len() {
            return Err(Error::InvalidParameter(
                "one frequency per mode is required".into(),
            ));
        }
        let qubit_noise = *self
            .noise_for(mode)
            .ok_or_else(|| Error::InvalidParameter(format!("no noise parameters for {mode}")))?;
        let couplers: Vec<&str> = self
            .edges
            .iter()
            .filter(|e| e.qubit_a == mode || e.qubit_b == mode)
            .map(|e| e.coupler.as_str())
            .collect();
        if couplers.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{mode} has no neighbouring coupler"
            )));
        }

        let mut labels = vec![mode];
        labels.extend(&couplers);
        let sub = self.subgraph(&labels)?.with_levels(2);
        let sub_freqs: Vec<f64> = labels
            .iter()
            .map(|l| frequencies[self.mode_index(l).expect("label from graph")])
            .collect();
        let h = sub.hamiltonian(&sub_freqs)?;
        let eig = h.eigen();
        let bare_q = h.basis.index(&h.basis.single(0, 1)).expect("in basis");
        let k = (0..eig.dim())
            .max_by(|&a, &b| {
                eig.vectors[(bare_q, a)]
                    .abs()
                    .total_cmp(&eig.vectors[(bare_q, b)].abs())
            })
            .expect("non-empty");

        let weight = |mode_idx: usize| {
            let i = h
                .basis
                .index(&h.basis.single(mode_idx, 1))
                .expect("in basis");
            eig.vectors[(i, k)].powi(2)
        };
        let w_q = weight(0);
        let mut norm = w_q;
        let mut relax = w_q * qubit_noise.relaxation_rate();
        let mut flux = 0.0;
        let mut coupler_weight = 0.0;
        for (c, label) in couplers.iter().enumerate() {
            let w = weight(c + 1);
            norm += w;
            coupler_weight += w;
            let spec = self.mode(label)?;
            let f_c = frequencies[self.mode_index(label)?];
            if let Some(n) = self.noise_for(label) {
                relax += w * n.relaxation_rate();
                flux += w * n.flux_dephasing_rate(spec.flux_sensitivity_at(f_c));
            } else {
                relax += w * qubit_noise.relaxation_rate();
            }
        }
        relax /= norm;
        flux /= norm;
        coupler_weight /= norm;

        // rates converted from 1/ns to 1/us
        let gamma1 = relax * 1e3;
        let bare_phi = (1.0 / qubit_noise.t2_ramsey - 0.5 / qubit_noise.t1).max(0.0);
        let white_rate = 0.5 * gamma1 + bare_phi;
        let flux_rate = flux * 1e3;
        let t2_eff = if flux_rate == 0.0 {
            1.0 / white_rate
        } else {
            let g2 = flux_rate * flux_rate;
            (-white_rate + (white_rate * white_rate + 4.0 * g2).sqrt()) / (2.0 * g2)
        };
        let decay_shape = if flux_rate > white_rate {
            DecayShape::GaussianDominated
        } else {
            DecayShape::Exponential
        };
        Ok(HybridizedCoherence {
            coupler_weight,
            t1_eff: 1.0 / gamma1,
            t2_eff,
            white_rate,
            flux_rate,
            decay_shape,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{EdgeCoupling, ModeSpec, NoiseSpec};

    fn pair(t1_c: f64) -> DeviceGraph {
        let mut g = DeviceGraph::new(
            vec![
                ModeSpec::transmon("Q1", 5.218, -0.285),
                ModeSpec::coupler("C01", 6.275, -0.250),
                ModeSpec::transmon("Q0", 5.295, -0.275),
            ],
            vec![EdgeCoupling::new("Q1", "Q0", "C01", 6.0, 70.0)],
        )
        .unwrap();
        g.noise
            .insert("Q1".into(), NoiseSpec::new(76.2, 29.2, 70.0));
        let mut c = NoiseSpec::new(t1_c, 6.8, 14.0);
        c.flux_noise_amp = 1e-5;
        g.noise.insert("C01".into(), c);
        g
    }

    #[test]
    fn sweetspot_coupler_leaves_ramsey_unchanged() {
        let g = pair(37.4);
        let c = g
            .hybridized_coherence(&[5.218, 6.275, 5.295], "Q1")
            .unwrap();
        assert_eq!(c.flux_rate, 0.0);
        assert_eq!(c.decay_shape, DecayShape::Exponential);
        assert!((c.t2_eff - 29.2).abs() / 29.2 < 0.02);
    }

    #[test]
    fn close_coupler_is_gaussian() {
        let g = pair(37.4);
        let c = g
            .hybridized_coherence(&[5.218, 5.518, 5.295], "Q1")
            .unwrap();
        assert_eq!(c.decay_shape, DecayShape::GaussianDominated);
        assert!(c.t2_eff < 29.2);
        assert!(c.coupler_weight > 0.02 && c.coupler_weight < 0.1);
    }

    #[test]
    fn equal_t1_is_invariant() {
        let g = pair(76.2);
        for f_c in [5.4, 5.8, 6.2] {
            let c = g.hybridized_coherence(&[5.218, f_c, 5.295], "Q1").unwrap();
            assert!((c.t1_eff - 76.2).abs() < 1e-9);
        }
    }

    #[test]
    fn coupler_is_rejected() {
        let g = pair(37.4);
        assert!(g.hybridized_coherence(&[5.218, 6.0, 5.295], "C01").is_err());
    }
}
