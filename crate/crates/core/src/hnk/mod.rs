//! The spaces `H_n^k`, the `u_IJ` calculus of a rank-one grid, and the
//! splittings and projections built on them.

mod combination;
mod diag;
mod projection;
mod signature;
mod space;
mod split;
mod uij;

pub use combination::{binomial, combinations, Combination};
pub use diag::{diag_hnk, diag_rect};
pub use projection::{
    hnk_projection, hnk_projection_exact, projection_report, random_matrix, trace_formula_check,
    trace_formula_exact, TraceFormula, IDEMPOTENCE_TOL, NORM_TOL,
};
pub use signature::{permutation_parity, signature_one};
pub use space::{build_hnk, verify_hnk, HnkSpace, RankOneRealization, Side, SignedUnit, HNK_MAX_N, INDEX_MAX_N};
pub use split::{peirce_split, rect_split, PeirceSplit, RectSplit};
pub use uij::{
    build_uij, decompose_into_ones, signature_general, verify_hnk_uij, verify_uij_grid, OneFactor,
    OnesDecomposition, UIJ_VERIFY_MAX_N,
};
