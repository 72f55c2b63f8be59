//! Proportionate gain rules and the proportionate affine projection update.
//!
//! Two gain strategies are provided: the magnitude-proportional IPAPA rule
//! and the derivative-based rule, which assigns gains from how far each
//! coefficient moved since a periodically refreshed, delayed snapshot.

mod condition;
mod gains;
mod snapshot;
mod update;

pub use condition::{monotone_error_holds, necessary_condition_check};
pub use gains::{
    db_gains, db_normalization, ipapa_gains, DbNormalization, GainParams, ProportionateVector,
};
pub use snapshot::{derivative_vector, DerivativeVector, SnapshotStore};
pub use update::{proportionate_apa_update, DbIpapa, Ipapa};
