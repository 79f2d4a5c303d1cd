//! Subcommand bodies. Each takes the resolved [`Context`] and returns the files it wrote.

use serde::Serialize;
use tcsim_core::device::DeviceGraph;

use crate::output::{Meta, OutputDir};
use crate::Context;

pub mod cz;
pub mod lut;
pub mod parity;
pub mod readout;
pub mod sweep;

#[derive(Serialize)]
struct Resolved<'a, T: Serialize> {
    command: &'a str,
    params: &'a T,
    device: &'a DeviceGraph,
    seed: u64,
}

/// Output directory whose metadata hashes `params`, the device and the seed.
fn output(ctx: &Context, command: &str, params: &impl Serialize) -> tcsim_core::Result<OutputDir> {
    let resolved = Resolved {
        command,
        params,
        device: &ctx.device,
        seed: ctx.seed,
    };
    OutputDir::create(&ctx.out, Meta::new(command, &resolved, ctx.seed))
}

/// Default coupler window: `span` GHz below the sweetspot of `coupler`.
fn below_sweetspot(
    device: &DeviceGraph,
    coupler: &str,
    span: f64,
) -> tcsim_core::Result<(f64, f64)> {
    let f_ss = device.mode(coupler)?.f_sweetspot;
    Ok((f_ss - span, f_ss))
}
