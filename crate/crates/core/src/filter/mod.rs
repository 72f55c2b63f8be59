//! Input buffering, error computation, the regularized normal-equation solve
//! and the plain NLMS / APA recursions.

mod apa;
mod buffer;
mod solve;

pub use apa::{ApaParams, ErrorVector, FilterState};
pub use buffer::RegressorBuffer;
pub use solve::solve_regularized_normal;

pub(crate) use apa::affine_step;
