//! Fast-adiabatic coupler waveforms, flux conversion and distortion filters.

mod distortion;
mod fast_adiabatic;
mod waveform;

pub use distortion::{DistortionModel, ExponentialTerm};
pub use fast_adiabatic::{
    coupler_frequency_to_theta, theta_to_coupler_frequency, FastAdiabaticSpec, DEFAULT_SAMPLE_DT,
};
pub use waveform::{PulseWaveform, WaveformKind};
