use std::path::PathBuf;

use anyhow::Context as _;
use serde::Serialize;
use tcsim_core::dynamics::{calibrate_cz, landscape, CzDesign, CzMetrics};
use tcsim_core::io::CsvTable;
use tcsim_core::pulses::FastAdiabaticSpec;
use tcsim_core::Error;

use super::output;
use crate::config::CzMode;
use crate::Context;

#[derive(Debug, Serialize)]
struct CalibrationReport<'a> {
    design: &'a CzDesign,
    spec: FastAdiabaticSpec,
    iterations: usize,
    coherent: CzMetrics,
    /// With the device coherence times; absent when the device has none or `noisy` is off.
    noisy: Option<CzMetrics>,
}

pub fn run(ctx: &Context) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = &ctx.run.cz;
    let design = match cfg.f_idle {
        Some(f) => CzDesign::with_idle(&ctx.device, &cfg.edge, f)?,
        None => CzDesign::new(&ctx.device, &cfg.edge)?,
    };
    let options = cfg.evolve.unwrap_or_default();
    let mut out = output(ctx, "cz", cfg)?;
    match cfg.mode {
        CzMode::Calibrate => {
            if !(cfg.t_p > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "t_p must be positive, got {} ns",
                    cfg.t_p
                ))
                .into());
            }
            let [lo, hi] = cfg.search_box;
            let cal = calibrate_cz(&ctx.device, &design, cfg.t_p, (lo, hi), &options).with_context(|| {
                format!(
                    "calibrating {} at t_p = {} ns; widen cz.search_box or run `cz --mode landscape` \
                     to see where the conditional phase crosses 180 degrees",
                    design.edge.name(),
                    cfg.t_p
                )
            })?;
            let noisy = if cfg.noisy && !ctx.device.noise.is_empty() {
                Some(design.metrics(&ctx.device, &cal.spec, Some(&ctx.device.noise), &options)?)
            } else {
                None
            };
            let m = &cal.metrics;
            println!(
                "{}: theta_f = {:.6} rad, conditional phase {:.4} deg, error {:.3e}, L1 {:.3e}",
                design.edge.name(),
                cal.spec.theta_f,
                m.conditional_phase,
                m.gate_error,
                m.leakage_l1
            );
            if let Some(n) = &noisy {
                println!(
                    "  with decoherence: error {:.3e}, L1 {:.3e}",
                    n.gate_error, n.leakage_l1
                );
            }
            let report = CalibrationReport {
                design: &design,
                spec: cal.spec,
                iterations: cal.iterations,
                coherent: cal.metrics,
                noisy,
            };
            out.json("cz_calibration.json", &report)?;
            let pulse = out.meta().csv_header() + &cal.spec.coupler_waveform().to_csv();
            out.raw("cz_pulse.csv", pulse)?;
        }
        CzMode::Landscape => {
            let theta = cfg.theta_f.points("cz.theta_f")?;
            let t_p = cfg.t_p_grid.points("cz.t_p_grid")?;
            if let Some(t) = t_p.iter().find(|t| !(**t > 0.0)) {
                return Err(
                    Error::InvalidParameter(format!("t_p must be positive, got {t} ns")).into(),
                );
            }
            let map = landscape(&ctx.device, &design, &theta, &t_p, &options)?;
            out.csv("cz_landscape.csv", &map.to_csv())?;
            let mut contour = CsvTable::new(["t_p_ns", "theta_f_180_rad"]);
            for (t, th) in t_p.iter().zip(map.contour_180()) {
                contour.push(vec![(*t).into(), th.into()]);
            }
            println!(
                "{}: {} x {} landscape, 180-degree contour found for {} of {} pulse lengths",
                design.edge.name(),
                t_p.len(),
                theta.len(),
                contour
                    .rows
                    .iter()
                    .filter(|r| r[1] != tcsim_core::io::CsvValue::Missing)
                    .count(),
                t_p.len()
            );
            out.csv("cz_contour.csv", &contour)?;
        }
    }
    Ok(out.into_written())
}
