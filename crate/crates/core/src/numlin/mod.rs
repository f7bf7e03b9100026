//! Exact and floating dense complex matrices.

mod approx;
mod exact;
mod scalar;
pub mod svd;

pub use approx::{operator_norm, trace_norm, ApproxMatrix};
pub use exact::{family_rank_exact, ExactMatrix, SpanSolver};
pub use scalar::ExactScalar;
