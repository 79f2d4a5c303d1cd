//! Time evolution under control waveforms and the experiments built on it.

mod cz;
mod evolve;
mod ramsey;
mod rb;
mod readout;

pub use cz::{
    calibrate_cz, conditional_oscillation, gate_error_and_leakage, landscape, CompChannel,
    CzCalibration, CzDesign, CzFrame, CzMetrics, GateMetrics, Landscape, CZ_DIAGONAL,
};
pub use evolve::{block, evolve, EvolutionResult, EvolveOptions, Initial};
pub use ramsey::{ramsey_with_cz, RamseyProtocol, RamseyTrace};
pub use rb::{
    clifford_group, coherence_limit, fit_decay, simultaneous_rb, single_qubit_rb, DecayFit,
    RbConfig, RbResult,
};
pub use readout::{readout_stark_chevron, ChevronMap, ReadoutSpec, TwoLevelSweep};
