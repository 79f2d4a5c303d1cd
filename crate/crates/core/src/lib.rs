//! Pulse-level simulation of a transmon processor with flux-tunable couplers.
//!
//! The crate is organised by experiment family:
//!
//! * [`device`] – mode parameters, flux arcs, Hamiltonian assembly and the device file format.
//! * [`captable`] – lookup-table capacitance matrices and coupling-strength design.
//! * [`spectrum`] – residual ZZ and exchange couplings versus coupler frequency.
//! * [`pulses`] – fast-adiabatic coupler waveforms and flux-distortion filters.
//! * [`dynamics`] – time evolution, CZ calibration, randomized benchmarking and readout exchange.
//! * [`parity`] – Monte Carlo of repeated weight-2 parity checks with a spectator.
//!
//! Frequencies at the public API are plain frequencies in GHz (couplings and anharmonicities are
//! documented per field). Internally Hamiltonians are built in angular units of rad/ns.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod captable;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod parity;
pub mod pulses;
pub mod spectrum;

pub use error::{Error, Result};
