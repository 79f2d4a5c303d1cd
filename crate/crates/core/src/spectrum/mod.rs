//! Residual ZZ and exchange couplings extracted from the dressed spectrum.

mod exchange;
mod labeling;
mod profile;

pub use exchange::{
    avoided_crossing, exchange_coupling, straddling, straddling_check, xi_zz, Crossing, Manifold,
    EXCHANGE_WINDOW,
};
pub use labeling::{DressedLabeling, DressedState, AMBIGUITY_THRESHOLD};
pub use profile::{
    find_null, interaction_profile, EdgeProbe, InteractionProfile, Null, Nulls, Quantity,
    NULL_TOLERANCE,
};
