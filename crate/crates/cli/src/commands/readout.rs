use std::path::PathBuf;

use serde::Serialize;
use tcsim_core::dynamics::readout_stark_chevron;
use tcsim_core::spectrum::{find_null, Manifold, Null, Quantity};

use super::{below_sweetspot, output};
use crate::config::Grid;
use crate::Context;

#[derive(Debug, Serialize)]
struct ChevronSummary {
    edge: String,
    measured: String,
    manifold: Manifold,
    /// Exchange null of the driven manifold, where the chevron should vanish.
    null: Null,
    /// Largest transfer over all amplitudes in the row nearest the null.
    max_transfer_at_null: Option<f64>,
    /// Largest transfer anywhere in the map.
    max_transfer: Option<f64>,
}

pub fn run(ctx: &Context) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = &ctx.run.readout_exchange;
    let edge = ctx.device.edge(&cfg.edge)?;
    let window = below_sweetspot(&ctx.device, &edge.coupler, cfg.span)?;
    let grid = cfg
        .coupler
        .unwrap_or(Grid::new(window.0, window.1, cfg.n_points));
    let freqs = grid.points("readout_exchange.coupler")?;
    let manifold = Manifold::from(cfg.manifold);
    let quantity = match manifold {
        Manifold::OneExcitation => Quantity::J1,
        Manifold::TwoExcitation => Quantity::J2,
    };
    let mut out = output(ctx, "readout-exchange", cfg)?;
    let map = readout_stark_chevron(
        &ctx.device,
        &cfg.edge,
        &cfg.measured,
        &cfg.readout,
        manifold,
        &freqs,
    )?;
    let null = find_null(&ctx.device, &cfg.edge, quantity, window, cfg.n_points)?;
    let summary = ChevronSummary {
        edge: map.edge.clone(),
        measured: map.measured.clone(),
        manifold,
        max_transfer_at_null: null.frequency.and_then(|f| map.max_transfer_near(f)),
        max_transfer: map
            .transfer
            .iter()
            .flatten()
            .flatten()
            .copied()
            .reduce(f64::max),
        null,
    };
    match (summary.null.frequency, summary.max_transfer_at_null) {
        (Some(f), Some(t)) => println!(
            "{}: {} null at {f:.4} GHz, peak transfer there {t:.2e}",
            summary.edge,
            quantity.name()
        ),
        _ => eprintln!(
            "warning: {}: no {} null in the window",
            summary.edge,
            quantity.name()
        ),
    }
    out.csv("chevron.csv", &map.to_csv())?;
    out.json("chevron_summary.json", &summary)?;
    Ok(out.into_written())
}
