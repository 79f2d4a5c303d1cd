//! Device parameters, flux arcs and the truncated multi-mode Hamiltonian.

mod coherence;
mod file;
mod graph;
mod hamiltonian;
mod mode;

pub use coherence::{DecayShape, HybridizedCoherence};
pub use file::{load_device, parse_device, LoadedDevice};
pub use graph::{DeviceGraph, EdgeCoupling, ModeCoupling, NoiseSpec, ONE_OVER_F_LOG_FACTOR};
pub use hamiltonian::{Basis, Hamiltonian, DEFAULT_DIMENSION_CAP};
pub use mode::{ModeKind, ModeSpec};
