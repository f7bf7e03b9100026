use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::{rank_one_grid, verify_grid, Grid};
use crate::numlin::{ExactMatrix, ExactScalar};
use crate::report::{Check, VerificationReport};
use crate::triple::{classify_relation, family_rank, is_minimal_in_family, GridRelation, PartialIsometry};

use super::combination::{binomial, combinations, Combination};
use super::signature::signature_one;

pub const HNK_MAX_N: usize = 8;
pub const INDEX_MAX_N: usize = 12;

/// Which support projections a product runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `u_j* u_j`
    Left,
    /// `u_j u_j*`
    Right,
}

/// A finite rectangular grid of rank one, `u_1, …, u_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneRealization {
    elements: Vec<PartialIsometry>,
}

impl RankOneRealization {
    /// Checks that the elements are partial isometries of one shape,
    /// pairwise colinear and minimal in the family.
    pub fn new(elements: Vec<ExactMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument("a realization needs at least one element".into()));
        }
        let shape = elements[0].shape();
        let elements = elements
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                if m.shape() != shape {
                    return Err(Error::dim("RankOneRealization", format!("u_{} is {:?}, u_1 is {shape:?}", i + 1, m.shape())));
                }
                PartialIsometry::new(m).map_err(|e| Error::Construction(format!("u_{}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..elements.len() {
            for b in a + 1..elements.len() {
                let rel = classify_relation(&elements[a], &elements[b])?;
                if rel != GridRelation::Colinear {
                    return Err(Error::Construction(format!(
                        "u_{} and u_{} are {rel:?}, expected colinear",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        if let Some(i) = (0..elements.len()).find(|&i| !is_minimal_in_family(&elements[i], &elements)) {
            return Err(Error::Construction(format!("u_{} is not minimal", i + 1)));
        }
        Ok(Self { elements })
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.elements[0].shape()
    }

    pub fn elements(&self) -> &[PartialIsometry] {
        &self.elements
    }

    /// One-based.
    pub fn element(&self, j: usize) -> &ExactMatrix {
        self.elements[j - 1].mat()
    }

    pub fn matrices(&self) -> Vec<ExactMatrix> {
        self.elements.iter().map(|u| u.mat().clone()).collect()
    }

    pub fn grid(&self) -> Result<Grid> {
        rank_one_grid(&self.matrices())
    }

    /// `(uu*)_S` for [`Side::Right`], `(u*u)_S` for [`Side::Left`], in
    /// increasing order of `S`; the empty product is the identity.
    pub fn support_product(&self, side: Side, s: &Combination) -> ExactMatrix {
        let (rows, cols) = self.shape();
        let dim = match side {
            Side::Right => rows,
            Side::Left => cols,
        };
        let mut acc = ExactMatrix::identity(dim);
        for &j in s.members() {
            let u = &self.elements[j - 1];
            let proj = match side {
                Side::Right => u.left_support(),
                Side::Left => u.right_support(),
            };
            acc = &acc * &proj;
        }
        acc
    }

    /// `(i_R, i_L)`: the largest `r` with `(uu*)_{1..r} ≠ 0`, and the same
    /// for `u*u`.
    pub fn indices(&self) -> Result<(usize, usize)> {
        let n = self.n();
        if n > INDEX_MAX_N {
            return Err(Error::Capacity(format!(
                "indices are computed for n <= {INDEX_MAX_N}, got {n}"
            )));
        }
        let index = |side: Side| {
            let (rows, cols) = self.shape();
            let mut acc = ExactMatrix::identity(if side == Side::Right { rows } else { cols });
            let mut last = 0;
            for u in &self.elements {
                let proj = match side {
                    Side::Right => u.left_support(),
                    Side::Left => u.right_support(),
                };
                acc = &acc * &proj;
                if acc.is_zero() {
                    break;
                }
                last += 1;
            }
            last
        };
        Ok((index(Side::Right), index(Side::Left)))
    }
}

/// `sign · E_{J,I}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedUnit {
    pub row: Combination,
    pub col: Combination,
    pub sign: i8,
}

/// The basis `U_1, …, U_n` of `H_n^k`.
#[derive(Clone, Debug)]
pub struct HnkSpace {
    n: usize,
    k: usize,
    rows: Vec<Combination>,
    cols: Vec<Combination>,
    units: Vec<Vec<SignedUnit>>,
    realization: RankOneRealization,
}

pub fn build_hnk(n: usize, k: usize) -> Result<HnkSpace> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    if n > HNK_MAX_N {
        return Err(Error::Capacity(format!("H_n^k is built for n <= {HNK_MAX_N}, got {n}")));
    }
    let rows = combinations(n, n - k)?;
    let cols = combinations(n, k - 1)?;
    let mut units = Vec::with_capacity(n);
    let mut basis = Vec::with_capacity(n);
    for c in 1..=n {
        let mut m = ExactMatrix::zeros(rows.len(), cols.len());
        let mut list = Vec::new();
        for (r, j_set) in rows.iter().enumerate() {
            if j_set.contains(c) {
                continue;
            }
            for (q, i_set) in cols.iter().enumerate() {
                if i_set.contains(c) || !i_set.is_disjoint(j_set) {
                    continue;
                }
                let sign = signature_one(i_set, c, j_set)?;
                m.set(r, q, ExactScalar::from_int(sign.into()));
                list.push(SignedUnit {
                    row: j_set.clone(),
                    col: i_set.clone(),
                    sign,
                });
            }
        }
        units.push(list);
        basis.push(m);
    }
    let realization = RankOneRealization::new(basis)?;
    let space = HnkSpace {
        n,
        k,
        rows,
        cols,
        units,
        realization,
    };
    space.validate()?;
    Ok(space)
}

impl HnkSpace {
    fn validate(&self) -> Result<()> {
        let m = self.multiplicity();
        for (i, u) in self.basis().enumerate() {
            let ones = u.entries().iter().filter(|e| !e.is_zero()).count();
            let unit = u
                .entries()
                .iter()
                .all(|e| e.is_zero() || *e == ExactScalar::one() || *e == ExactScalar::from_int(-1));
            if ones != m || !unit {
                return Err(Error::Construction(format!(
                    "U_{} has {ones} nonzero entries, expected {m} of modulus one",
                    i + 1
                )));
            }
        }
        let rank = family_rank(self.realization.elements())?;
        if rank != 1 {
            return Err(Error::Construction(format!("family rank is {rank}, expected 1")));
        }
        let idx = self.realization.indices()?;
        if idx != (self.k, self.n - self.k + 1) {
            return Err(Error::Construction(format!(
                "indices {idx:?}, expected ({}, {})",
                self.k,
                self.n - self.k + 1
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Row labels `J`, `|J| = n − k`.
    pub fn rows(&self) -> &[Combination] {
        &self.rows
    }

    /// Column labels `I`, `|I| = k − 1`.
    pub fn cols(&self) -> &[Combination] {
        &self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    /// `C(n−1, k−1)`, the number of units in each `U_i`.
    pub fn multiplicity(&self) -> usize {
        binomial(self.n - 1, self.k - 1)
    }

    pub fn basis(&self) -> impl Iterator<Item = &ExactMatrix> {
        self.realization.elements().iter().map(|u| u.mat())
    }

    /// One-based.
    pub fn element(&self, i: usize) -> &ExactMatrix {
        self.realization.element(i)
    }

    /// The signed units making up `U_i`, one-based.
    pub fn units(&self, i: usize) -> &[SignedUnit] {
        &self.units[i - 1]
    }

    pub fn realization(&self) -> &RankOneRealization {
        &self.realization
    }

    pub fn grid(&self) -> Result<Grid> {
        self.realization.grid()
    }

    /// `E_{J,I}` in the ambient shape.
    pub fn matrix_unit(&self, j_set: &Combination, i_set: &Combination) -> Result<ExactMatrix> {
        let (rows, cols) = self.shape();
        if j_set.n() != self.n || i_set.n() != self.n || j_set.len() != self.n - self.k || i_set.len() != self.k - 1 {
            return Err(Error::InvalidArgument(format!(
                "E_{{{j_set},{i_set}}} is not an index of H_{}^{}",
                self.n, self.k
            )));
        }
        Ok(ExactMatrix::unit(rows, cols, j_set.rank(), i_set.rank()))
    }
}

/// Construction invariants, grid axioms, indices and the support sums
/// `Σ u_i u_i* = k·1`, `Σ u_i* u_i = (n−k+1)·1`.
pub fn verify_hnk(space: &HnkSpace) -> Result<VerificationReport> {
    let (n, k, m) = (space.n, space.k, space.multiplicity());
    let mut report = VerificationReport::new(format!("H_{n}^{k}"));
    let mut bad = Vec::new();
    for (i, u) in space.basis().enumerate() {
        let unit = u
            .entries()
            .iter()
            .all(|e| e.is_zero() || *e == ExactScalar::one() || *e == ExactScalar::from_int(-1));
        if u.nnz() != m || !unit {
            bad.push(format!("U_{}", i + 1));
        }
    }
    report.push(Check::tally(format!("{m} entries of modulus one per element"), bad, n));
    report.absorb("grid", verify_grid(&space.grid()?));
    let rank = family_rank(space.realization.elements())?;
    report.push(Check::from_bool("family rank 1", rank == 1, 0.0, format!("rank {rank}")));
    let (i_r, i_l) = space.realization.indices()?;
    report.push(Check::from_bool(
        "indices (k, n-k+1)",
        (i_r, i_l) == (k, n - k + 1),
        0.0,
        format!("i_R = {i_r}, i_L = {i_l}"),
    ));
    report.push(Check::from_bool("i_R + i_L >= n + 1", i_r + i_l > n, 0.0, ""));
    let (rows, cols) = space.shape();
    let mut right = ExactMatrix::zeros(rows, rows);
    let mut left = ExactMatrix::zeros(cols, cols);
    for u in space.basis() {
        right = &right + &(u * &u.adjoint());
        left = &left + &(&u.adjoint() * u);
    }
    let want_r = ExactMatrix::identity(rows).scale(&ExactScalar::from_int(k as i64));
    let want_l = ExactMatrix::identity(cols).scale(&ExactScalar::from_int((n - k + 1) as i64));
    report.push(Check::from_bool("sum u_i u_i* = k", right == want_r, right.residual(&want_r), ""));
    report.push(Check::from_bool(
        "sum u_i* u_i = n-k+1",
        left == want_l,
        left.residual(&want_l),
        "",
    ));
    Ok(report)
}
