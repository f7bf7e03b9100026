//! Matrix-level norms of operator spaces spanned by a finite basis, and the
//! witnesses separating `H_n^k` from `R_n` and `C_n`.

use crate::error::{Error, Result};
use crate::hnk::{build_hnk, HnkSpace};
use crate::numlin::svd::power_iteration_norm;
use crate::numlin::{ExactMatrix, ExactScalar, SpanSolver};
use crate::report::{Check, VerificationReport};

pub const DEGENERATE_NORM: f64 = 1e-12;
pub const WITNESS_TOL: f64 = 1e-9;
pub const WITNESS_MAX_N: usize = 6;

/// Coefficient transport `b_i ↦ c_i` between two independent families.
#[derive(Clone, Debug)]
pub struct BasisMap {
    domain: Vec<ExactMatrix>,
    codomain: Vec<ExactMatrix>,
}

fn check_family(name: &str, family: &[ExactMatrix]) -> Result<()> {
    let Some(first) = family.first() else {
        return Err(Error::InvalidArgument(format!("{name} basis is empty")));
    };
    if let Some(b) = family.iter().find(|b| b.shape() != first.shape()) {
        return Err(Error::dim("BasisMap", format!("{name} mixes {:?} and {:?}", first.shape(), b.shape())));
    }
    if !SpanSolver::new(family)?.is_independent() {
        return Err(Error::InvalidArgument(format!("{name} basis is linearly dependent")));
    }
    Ok(())
}

impl BasisMap {
    pub fn new(domain: Vec<ExactMatrix>, codomain: Vec<ExactMatrix>) -> Result<Self> {
        if domain.len() != codomain.len() {
            return Err(Error::InvalidArgument(format!(
                "bases have {} and {} elements",
                domain.len(),
                codomain.len()
            )));
        }
        check_family("domain", &domain)?;
        check_family("codomain", &codomain)?;
        Ok(Self { domain, codomain })
    }

    pub fn identity(basis: Vec<ExactMatrix>) -> Result<Self> {
        Self::new(basis.clone(), basis)
    }

    pub fn inverse(&self) -> Self {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
        }
    }

    pub fn domain(&self) -> &[ExactMatrix] {
        &self.domain
    }

    pub fn codomain(&self) -> &[ExactMatrix] {
        &self.codomain
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }
}

/// A `p×q` array of coefficient vectors; it stands for the element of
/// `M_m(X)`, `m = max(p, q)`, padded with zero blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplifiedElement {
    block_rows: usize,
    block_cols: usize,
    coeffs: Vec<Vec<ExactScalar>>,
}

impl AmplifiedElement {
    /// `coeffs` is row-major over the blocks.
    pub fn new(block_rows: usize, block_cols: usize, coeffs: Vec<Vec<ExactScalar>>) -> Result<Self> {
        if block_rows == 0 || block_cols == 0 || coeffs.len() != block_rows * block_cols {
            return Err(Error::dim(
                "AmplifiedElement",
                format!("{} coefficient vectors for {block_rows}x{block_cols} blocks", coeffs.len()),
            ));
        }
        if coeffs.iter().any(|c| c.len() != coeffs[0].len()) {
            return Err(Error::dim("AmplifiedElement", "coefficient vectors differ in length"));
        }
        Ok(Self {
            block_rows,
            block_cols,
            coeffs,
        })
    }

    /// `[b_1 … b_d]`.
    pub fn basis_row(d: usize) -> Self {
        Self {
            block_rows: 1,
            block_cols: d,
            coeffs: (0..d).map(|j| unit_vector(d, j)).collect(),
        }
    }

    /// `[b_1; …; b_d]`.
    pub fn basis_column(d: usize) -> Self {
        Self {
            block_rows: d,
            block_cols: 1,
            coeffs: (0..d).map(|j| unit_vector(d, j)).collect(),
        }
    }

    pub fn level(&self) -> usize {
        self.block_rows.max(self.block_cols)
    }

    pub fn block_shape(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    pub fn coeffs(&self, r: usize, c: usize) -> &[ExactScalar] {
        &self.coeffs[r * self.block_cols + c]
    }

    pub fn materialize(&self, basis: &[ExactMatrix]) -> Result<ExactMatrix> {
        let Some(first) = basis.first() else {
            return Err(Error::InvalidArgument("empty basis".into()));
        };
        if self.coeffs[0].len() != basis.len() {
            return Err(Error::dim(
                "materialize",
                format!("{} coefficients for {} basis elements", self.coeffs[0].len(), basis.len()),
            ));
        }
        let (rows, cols) = first.shape();
        let blocks: Vec<Vec<ExactMatrix>> = (0..self.block_rows)
            .map(|r| {
                (0..self.block_cols)
                    .map(|c| {
                        basis
                            .iter()
                            .zip(self.coeffs(r, c))
                            .fold(ExactMatrix::zeros(rows, cols), |acc, (b, x)| &acc + &b.scale(x))
                    })
                    .collect()
            })
            .collect();
        ExactMatrix::block_grid(&blocks)
    }
}

fn unit_vector(d: usize, j: usize) -> Vec<ExactScalar> {
    (0..d)
        .map(|i| if i == j { ExactScalar::one() } else { ExactScalar::zero() })
        .collect()
}

/// Operator norm of the materialized block matrix.
pub fn level_norm(basis: &[ExactMatrix], elem: &AmplifiedElement) -> Result<f64> {
    elem.materialize(basis)?.to_approx().operator_norm()
}

/// `‖φ_m(x)‖ / ‖x‖`, a lower bound for `‖φ‖_cb`.
pub fn amplified_ratio(map: &BasisMap, elem: &AmplifiedElement) -> Result<f64> {
    let below = level_norm(map.domain(), elem)?;
    if below < DEGENERATE_NORM {
        return Err(Error::DegenerateInput(format!("domain norm {below:e} is numerically zero")));
    }
    Ok(level_norm(map.codomain(), elem)? / below)
}

/// `E_11, …, E_1n` in `1×n` matrices.
pub fn row_space_basis(n: usize) -> Vec<ExactMatrix> {
    (0..n).map(|j| ExactMatrix::unit(1, n, 0, j)).collect()
}

/// `E_11, …, E_n1` in `n×1` matrices.
pub fn column_space_basis(n: usize) -> Vec<ExactMatrix> {
    (0..n).map(|j| ExactMatrix::unit(n, 1, j, 0)).collect()
}

/// The block row `[u_1 … u_n]`.
pub fn row_witness(space: &HnkSpace) -> AmplifiedElement {
    AmplifiedElement::basis_row(space.n())
}

/// The block column `[u_1; …; u_n]`.
pub fn col_witness(space: &HnkSpace) -> AmplifiedElement {
    AmplifiedElement::basis_column(space.n())
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub target: &'static str,
    pub element: ExactMatrix,
    pub image: ExactMatrix,
    pub norm: f64,
    pub image_norm: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct CbSeparation {
    pub n: usize,
    pub k: usize,
    pub row: Witness,
    pub col: Witness,
    pub report: VerificationReport,
}

fn witness(
    target: &'static str,
    space: &HnkSpace,
    codomain: Vec<ExactMatrix>,
    elem: &AmplifiedElement,
) -> Result<Witness> {
    let map = BasisMap::new(space.basis().cloned().collect(), codomain)?;
    let element = elem.materialize(map.domain())?;
    let image = elem.materialize(map.codomain())?;
    let norm = level_norm(map.domain(), elem)?;
    let image_norm = level_norm(map.codomain(), elem)?;
    Ok(Witness {
        target,
        element,
        image,
        norm,
        image_norm,
        ratio: amplified_ratio(&map, elem)?,
    })
}

/// Row and column witnesses for `H_n^k` against `R_n` and `C_n`.
pub fn cb_separation(n: usize, k: usize) -> Result<CbSeparation> {
    if n > WITNESS_MAX_N {
        return Err(Error::Capacity(format!("witnesses are computed for n <= {WITNESS_MAX_N}, got {n}")));
    }
    let space = build_hnk(n, k)?;
    let mut report = VerificationReport::new(format!("cb witnesses for H_{n}^{k}"));
    let (rows, cols) = space.shape();
    let mut right = ExactMatrix::zeros(rows, rows);
    let mut left = ExactMatrix::zeros(cols, cols);
    for u in space.basis() {
        right = &right + &(u * &u.adjoint());
        left = &left + &(&u.adjoint() * u);
    }
    let k_id = ExactMatrix::identity(rows).scale(&ExactScalar::from_int(k as i64));
    let l_id = ExactMatrix::identity(cols).scale(&ExactScalar::from_int((n - k + 1) as i64));
    report.push(Check::from_bool("sum u_i u_i* = k I", right == k_id, right.residual(&k_id), ""));
    report.push(Check::from_bool("sum u_i* u_i = (n-k+1) I", left == l_id, left.residual(&l_id), ""));

    let row = witness("R_n", &space, row_space_basis(n), &row_witness(&space))?;
    let col = witness("C_n", &space, column_space_basis(n), &col_witness(&space))?;
    let nf = n as f64;
    let lf = (n - k + 1) as f64;
    for (w, own, name) in [(&row, k as f64, "row"), (&col, lf, "column")] {
        let expect = own.sqrt();
        report.push(Check::within(
            format!("{name} witness norm"),
            (w.norm - expect).abs(),
            WITNESS_TOL,
            format!("{:.12} vs sqrt({own})", w.norm),
        ));
        report.push(Check::within(
            format!("{name} witness image norm in {}", w.target),
            (w.image_norm - nf.sqrt()).abs(),
            WITNESS_TOL,
            format!("{:.12} vs sqrt({n})", w.image_norm),
        ));
        let oracle = power_iteration_norm(&w.element.to_approx(), 2000)?;
        report.push(Check::within(
            format!("{name} witness power iteration"),
            (oracle - w.norm).abs(),
            WITNESS_TOL,
            format!("{oracle:.12}"),
        ));
        let separated = w.ratio > 1.0 + WITNESS_TOL;
        let detail = if separated {
            format!(
                "ratio {:.12} > 1: no isometry onto {} is a complete contraction",
                w.ratio, w.target
            )
        } else {
            format!("ratio {:.12}: no separation", w.ratio)
        };
        report.push(Check::within(
            format!("{name} transport ratio"),
            (w.ratio - (nf / own).sqrt()).abs(),
            WITNESS_TOL,
            detail,
        ));
    }
    Ok(CbSeparation { n, k, row, col, report })
}

pub fn cb_separation_report(n: usize, k: usize) -> Result<VerificationReport> {
    Ok(cb_separation(n, k)?.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn level_one_and_diagonal() {
        let h = build_hnk(4, 2).unwrap();
        let basis: Vec<_> = h.basis().cloned().collect();
        let e = AmplifiedElement::new(1, 1, vec![unit_vector(4, 2)]).unwrap();
        assert!(approx(level_norm(&basis, &e).unwrap(), 1.0));
        let zero = vec![ExactScalar::zero(); 4];
        let diag = AmplifiedElement::new(
            3,
            3,
            (0..9)
                .map(|p| if p % 4 == 0 { unit_vector(4, 1) } else { zero.clone() })
                .collect(),
        )
        .unwrap();
        assert_eq!(diag.level(), 3);
        assert!(approx(level_norm(&basis, &diag).unwrap(), 1.0));
    }

    #[test]
    fn sqrt_two_witness() {
        let h = build_hnk(3, 2).unwrap();
        let basis: Vec<_> = h.basis().cloned().collect();
        let neg = |j: usize| unit_vector(3, j).iter().map(|x| -x).collect::<Vec<_>>();
        let elem = AmplifiedElement::new(1, 3, vec![neg(2), unit_vector(3, 1), unit_vector(3, 0)]).unwrap();
        let m = elem.materialize(&basis).unwrap();
        let shown = ExactMatrix::from_ints(&[
            &[0, -1, 0, 0, 0, -1, 0, 0, 0],
            &[1, 0, 0, 0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 1, 0, 0, 0, -1, 0],
        ]);
        assert_eq!(m, shown);
        assert!(approx(level_norm(&basis, &elem).unwrap(), 2f64.sqrt()));
        // u_1 -> E_13, u_2 -> E_12, u_3 -> E_11 inside M_3
        let target = vec![
            ExactMatrix::unit(3, 3, 0, 2),
            ExactMatrix::unit(3, 3, 0, 1),
            ExactMatrix::unit(3, 3, 0, 0),
        ];
        let map = BasisMap::new(basis, target).unwrap();
        assert!(approx(amplified_ratio(&map, &elem).unwrap(), 1.5f64.sqrt()));
        assert!(approx(amplified_ratio(&map.inverse(), &elem).unwrap(), (2.0f64 / 3.0).sqrt()));
    }

    #[test]
    fn identity_ratio_is_one() {
        let h = build_hnk(4, 3).unwrap();
        let map = BasisMap::identity(h.basis().cloned().collect()).unwrap();
        let r = amplified_ratio(&map, &row_witness(&h)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separation_values() {
        let s = cb_separation(3, 2).unwrap();
        assert!(s.report.passed(), "{}", s.report);
        assert!(approx(s.row.norm, 2f64.sqrt()) && approx(s.row.image_norm, 3f64.sqrt()));
        assert!(approx(s.col.ratio, 1.5f64.sqrt()));
        let s = cb_separation(4, 3).unwrap();
        assert!(approx(s.row.ratio, (4.0f64 / 3.0).sqrt()));
        let s = cb_separation(4, 2).unwrap();
        assert!(approx(s.row.norm, 2f64.sqrt()) && approx(s.col.norm, 3f64.sqrt()));
        let s = cb_separation(5, 1).unwrap();
        assert!(approx(s.col.ratio, 1.0));
        let s = cb_separation(2, 2).unwrap();
        assert!(approx(s.row.ratio, 1.0) && s.report.passed());
        assert!(matches!(cb_separation(7, 2), Err(Error::Capacity(_))));
    }

    #[test]
    fn degenerate_and_dependent() {
        let h = build_hnk(3, 2).unwrap();
        let map = BasisMap::identity(h.basis().cloned().collect()).unwrap();
        let zero = AmplifiedElement::new(1, 1, vec![vec![ExactScalar::zero(); 3]]).unwrap();
        assert!(matches!(amplified_ratio(&map, &zero), Err(Error::DegenerateInput(_))));
        let u = ExactMatrix::unit(2, 2, 0, 0);
        assert!(BasisMap::new(vec![u.clone(), u.clone()], row_space_basis(2)).is_err());
        assert!(BasisMap::new(vec![u], row_space_basis(2)).is_err());
    }
}
