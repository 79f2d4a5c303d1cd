use std::path::PathBuf;

use serde::Serialize;
use tcsim_core::spectrum::{interaction_profile, Nulls, Quantity};

use super::{below_sweetspot, output};
use crate::Context;

#[derive(Debug, Serialize)]
struct EdgeNulls {
    edge: String,
    coupler: String,
    window: (f64, f64),
    nulls: Nulls,
    pairwise_distinct: bool,
    warnings: Vec<String>,
}

/// One profile CSV per edge and a `nulls.json` over all of them.
pub fn run(ctx: &Context) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = &ctx.run.sweep_interactions;
    let edges: Vec<String> = if cfg.edges.is_empty() {
        ctx.device.edges.iter().map(|e| e.coupler.clone()).collect()
    } else {
        cfg.edges.clone()
    };
    let mut out = output(ctx, "sweep-interactions", cfg)?;
    let mut report = Vec::new();
    for name in &edges {
        let edge = ctx.device.edge(name)?;
        let window = match cfg.window {
            Some([lo, hi]) => (lo, hi),
            None => below_sweetspot(&ctx.device, &edge.coupler, cfg.span)?,
        };
        let profile = interaction_profile(&ctx.device, name, window, cfg.n_points)?;
        let mut warnings = Vec::new();
        for q in Quantity::ALL {
            let null = profile.nulls.get(q);
            if null.degenerate {
                warnings.push(format!(
                    "{}: {} vanishes across the whole window",
                    profile.edge,
                    q.name()
                ));
            } else if null.frequency.is_none() {
                warnings.push(format!(
                    "{}: no {} null in the window",
                    profile.edge,
                    q.name()
                ));
            }
        }
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        out.csv(&format!("profile_{}.csv", edge.coupler), &profile.to_csv())?;
        report.push(EdgeNulls {
            edge: profile.edge.clone(),
            coupler: edge.coupler.clone(),
            window,
            pairwise_distinct: profile.nulls.pairwise_distinct(cfg.min_separation),
            nulls: profile.nulls,
            warnings,
        });
    }
    for r in &report {
        let f = |q: Quantity| {
            r.nulls
                .get(q)
                .frequency
                .map_or("-".into(), |f| format!("{f:.4}"))
        };
        println!(
            "{}: xi_zz null {} GHz, J1 null {} GHz, J2 null {} GHz, distinct: {}",
            r.edge,
            f(Quantity::XiZz),
            f(Quantity::J1),
            f(Quantity::J2),
            r.pairwise_distinct
        );
    }
    out.json("nulls.json", &report)?;
    Ok(out.into_written())
}
