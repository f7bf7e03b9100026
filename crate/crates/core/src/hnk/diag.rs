use crate::error::{Error, Result};
use crate::grids::{Grid, GridIndex, GridKind};
use crate::numlin::ExactMatrix;

use super::space::{build_hnk, RankOneRealization};

/// `u_i = diag(U_i^{(k_1)}, …, U_i^{(k_m)})` for `k_1 > ⋯ > k_m`.
pub fn diag_hnk(n: usize, ks: &[usize]) -> Result<RankOneRealization> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("diag_hnk needs at least one k".into()));
    }
    if ks.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument(format!("ks {ks:?} are not strictly decreasing")));
    }
    let spaces = ks.iter().map(|&k| build_hnk(n, k)).collect::<Result<Vec<_>>>()?;
    let elements = (1..=n)
        .map(|i| {
            let blocks: Vec<ExactMatrix> = spaces.iter().map(|s| s.element(i).clone()).collect();
            ExactMatrix::block_diag(&blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    RankOneRealization::new(elements)
}

/// `u_ij = diag(E_ij, E_ji)`, realizing `{(x, x^t)}` for `p×q` matrices `x`.
pub fn diag_rect(p: usize, q: usize) -> Result<Grid> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidArgument(format!("diag_rect needs p, q >= 2, got {p}x{q}")));
    }
    let mut members = Vec::with_capacity(p * q);
    for i in 1..=p {
        for j in 1..=q {
            let x = ExactMatrix::unit(p, q, i - 1, j - 1);
            members.push((GridIndex::Pair(i, j), ExactMatrix::block_diag(&[x.clone(), x.transpose()])?));
        }
    }
    Grid::new(GridKind::Rectangular { rows: p, cols: q }, members)
}
