//! Proportionate affine projection filters for sparse impulse response
//! identification.
//!
//! The crate is organised bottom-up:
//!
//! * [`filter`] holds the regressor ring buffer, the adaptive coefficient
//!   vector, the small regularized normal-equation solve and the plain
//!   NLMS / APA recursions.
//! * [`proportionate`] holds the gain rules (IPAPA and the derivative-based
//!   rule with its snapshot store) and the proportionate APA update.
//! * [`channels`] models the unknown system and produces excitation and noise.
//! * [`harness`] runs single realizations and ensembles, computes misalignment
//!   curves and derivation diagnostics, and exports CSV.
//!
//! The filter math is generic over any [`Scalar`] (`f32`, `f64`). The
//! simulation harness works in `f64`; the aliases below name the concrete
//! types it uses.

// `!(x > 0.0)` guards are intentional: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod filter;
pub mod harness;
pub mod proportionate;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use filter::{ApaParams, ErrorVector, FilterState, RegressorBuffer};
pub use proportionate::{
    DbIpapa, DbNormalization, DerivativeVector, GainParams, Ipapa, ProportionateVector,
    SnapshotStore,
};

pub type FilterStateF64 = FilterState<f64>;
pub type FilterStateF32 = FilterState<f32>;
pub type RegressorBufferF64 = RegressorBuffer<f64>;
pub type RegressorBufferF32 = RegressorBuffer<f32>;
pub type ApaParamsF64 = ApaParams<f64>;
pub type GainParamsF64 = GainParams<f64>;
pub type ProportionateVectorF64 = ProportionateVector<f64>;
pub type SnapshotStoreF64 = SnapshotStore<f64>;
pub type DbIpapaF64 = DbIpapa<f64>;
pub type DbIpapaF32 = DbIpapa<f32>;
pub type IpapaF64 = Ipapa<f64>;
