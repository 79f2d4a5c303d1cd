use std::path::PathBuf;

use serde::Serialize;
use tcsim_core::dynamics::{readout_stark_chevron, ReadoutSpec};
use tcsim_core::io::CsvTable;
use tcsim_core::parity::{
    defect_rate_vs_bias, emulated_zz_detuning, readout_amplitude_sweep, run_parity,
    ParityExperiment, TogglePattern,
};
use tcsim_core::spectrum::{interaction_profile, Manifold};
use tcsim_core::{Error, Result};

use super::{below_sweetspot, output};
use crate::config::{ParityConfig, ParityMode};
use crate::Context;

fn template(ctx: &Context, cfg: &ParityConfig) -> Result<ParityExperiment> {
    let mut e = ParityExperiment::reference(cfg.n_rounds, cfg.n_shots, ctx.seed);
    e.data_qubits = cfg.data_qubits.clone();
    e.ancilla = cfg.ancilla.clone();
    e.spectator = cfg.spectator.clone();
    if let Some(p) = cfg.error_params {
        e.error_params = p;
    }
    for q in e.data_qubits.iter().chain([&e.ancilla, &e.spectator]) {
        ctx.device.mode(q)?;
    }
    e.validate()?;
    Ok(e)
}

#[derive(Debug, Serialize)]
struct BiasSummary {
    spectator_edge: String,
    /// Bias with the lowest final-round toggled defect rate, GHz.
    toggled_argmin: f64,
    xi_zz_at_argmin: f64,
    max_untoggled_defect_rate: f64,
}

pub fn run(ctx: &Context) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = &ctx.run.parity;
    let base = template(ctx, cfg)?;
    let mut out = output(ctx, "parity", cfg)?;
    match cfg.mode {
        ParityMode::Bias => {
            let edge = ctx.device.edge(&cfg.spectator_edge)?;
            let window = below_sweetspot(&ctx.device, &edge.coupler, cfg.span)?;
            let profile =
                interaction_profile(&ctx.device, &cfg.spectator_edge, window, cfg.profile_points)?;
            let grid = match cfg.bias {
                Some(g) => g.points("parity.bias")?,
                None => profile.coupler_freqs.iter().step_by(2).copied().collect(),
            };
            // exchange with an excited spectator happens in the two-excitation manifold
            let chevron = if cfg.exchange {
                let readout = ReadoutSpec {
                    amplitudes: vec![cfg.readout_amplitude],
                    ..ReadoutSpec::default()
                };
                Some(readout_stark_chevron(
                    &ctx.device,
                    &cfg.spectator_edge,
                    &base.ancilla,
                    &readout,
                    Manifold::TwoExcitation,
                    &grid,
                )?)
            } else {
                None
            };
            let scan = defect_rate_vs_bias(
                &base,
                &grid,
                &profile,
                chevron.as_ref(),
                cfg.readout_amplitude,
            )?;
            let best = scan.toggled_argmin().expect("bias grid is non-empty");
            let summary = BiasSummary {
                spectator_edge: profile.edge.clone(),
                toggled_argmin: best.bias,
                xi_zz_at_argmin: best.xi_zz,
                max_untoggled_defect_rate: scan
                    .points
                    .iter()
                    .map(|p| p.untoggled.last())
                    .fold(0.0, f64::max),
            };
            println!(
                "toggled minimum at {:.4} GHz (xi_zz {:.1} kHz); untoggled final defect rate <= {:.4}",
                summary.toggled_argmin, summary.xi_zz_at_argmin, summary.max_untoggled_defect_rate
            );
            out.csv("parity_bias.csv", &scan.to_csv())?;
            out.csv("parity_bias_curves.csv", &scan.curves_csv())?;
            out.csv(&format!("profile_{}.csv", edge.coupler), &profile.to_csv())?;
            out.json("parity_bias_summary.json", &summary)?;
        }
        ParityMode::Detuning => {
            if !(base.error_params.t_exposure > 0.0) {
                return Err(Error::InvalidParameter(
                    "detuning mode converts to an equivalent xi_zz and needs t_exposure > 0".into(),
                )
                .into());
            }
            let mut emulated = base.clone();
            emulated.toggle_parity = TogglePattern::OddRoundsDetuning;
            emulated.toggle_spectator = false;
            let scan = emulated_zz_detuning(&emulated, &cfg.detunings)?;
            let mut t = CsvTable::new([
                "detuning_mhz",
                "equivalent_xi_zz_khz",
                "round",
                "emulated_defect_rate",
                "spectator_defect_rate",
                "emulated_leak_population",
                "spectator_leak_population",
            ]);
            for (&d, emu) in cfg.detunings.iter().zip(&scan.curves) {
                // same phase per toggled round: 2 pi xi t_exposure = 2 (2 pi d t_cz)
                let xi = 2e3 * d * base.t_cz / base.error_params.t_exposure;
                let mut real = base.clone();
                real.toggle_spectator = true;
                real.error_params.xi_zz_spectator = xi;
                let spec = run_parity(&real)?.curve();
                for r in 0..emu.defect_rate.len() {
                    t.push(vec![
                        d.into(),
                        xi.into(),
                        (r + 1).into(),
                        emu.defect_rate[r].into(),
                        spec.defect_rate[r].into(),
                        emu.leak_population[r].into(),
                        spec.leak_population[r].into(),
                    ]);
                }
            }
            println!(
                "{} detunings emulated against a toggled spectator",
                cfg.detunings.len()
            );
            out.csv("parity_detuning.csv", &t)?;
        }
        ParityMode::Amplitude => {
            let grid = cfg.amplitudes.points("parity.amplitudes")?;
            let model = cfg.readout_model.unwrap_or_default();
            let scan = readout_amplitude_sweep(&base, &grid, |a| model.errors(a))?;
            println!(
                "lowest final defect rate at readout amplitude {}",
                scan.argmin
            );
            out.csv("parity_amplitude.csv", &scan.to_csv())?;
        }
    }
    Ok(out.into_written())
}
