//! Triple products, Peirce projections and grid relations on exact matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{ExactMatrix, ExactScalar};

/// Largest family accepted by [`family_rank`].
pub const RANK_SEARCH_CAP: usize = 24;

/// A nonzero matrix `v` with `v v* v = v`, checked exactly on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialIsometry {
    mat: ExactMatrix,
}

impl PartialIsometry {
    pub fn new(mat: ExactMatrix) -> Result<Self> {
        if mat.is_zero() {
            return Err(Error::NotPartialIsometry("zero matrix".into()));
        }
        let cube = ternary_product(&mat, &mat, &mat)?;
        if cube != mat {
            return Err(Error::NotPartialIsometry(format!(
                "v v* v differs from v by {:.3e}",
                cube.residual(&mat)
            )));
        }
        Ok(Self { mat })
    }

    pub fn mat(&self) -> &ExactMatrix {
        &self.mat
    }

    pub fn into_inner(self) -> ExactMatrix {
        self.mat
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mat.shape()
    }

    /// Left support `v v*`.
    pub fn left_support(&self) -> ExactMatrix {
        &self.mat * &self.mat.adjoint()
    }

    /// Right support `v* v`.
    pub fn right_support(&self) -> ExactMatrix {
        &self.mat.adjoint() * &self.mat
    }
}

impl AsRef<ExactMatrix> for PartialIsometry {
    fn as_ref(&self) -> &ExactMatrix {
        &self.mat
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridRelation {
    Orthogonal,
    Colinear,
    GovernsFirstOverSecond,
    GovernsSecondOverFirst,
    Equal,
    Unclassified,
}

/// `a b* c`.
pub fn ternary_product(a: &ExactMatrix, b: &ExactMatrix, c: &ExactMatrix) -> Result<ExactMatrix> {
    a.mul(&b.adjoint())?.mul(c)
}

/// `{a b c} = ½(a b* c + c b* a)`.
pub fn triple_product(a: &ExactMatrix, b: &ExactMatrix, c: &ExactMatrix) -> Result<ExactMatrix> {
    let bs = b.adjoint();
    let left = a.mul(&bs)?.mul(c)?;
    let right = c.mul(&bs)?.mul(a)?;
    Ok(left.add(&right)?.scale(&ExactScalar::half()))
}

/// Peirce projection `P_k(v) x` for `k ∈ {0, 1, 2}`.
pub fn peirce_project(v: &PartialIsometry, x: &ExactMatrix, k: u8) -> Result<ExactMatrix> {
    if x.shape() != v.shape() {
        return Err(Error::dim(
            "peirce_project",
            format!("{:?} vs {:?}", x.shape(), v.shape()),
        ));
    }
    let l = v.left_support();
    let r = v.right_support();
    let lc = &ExactMatrix::identity(l.rows()) - &l;
    let rc = &ExactMatrix::identity(r.rows()) - &r;
    match k {
        2 => Ok(&(&l * x) * &r),
        1 => Ok(&(&(&l * x) * &rc) + &(&(&lc * x) * &r)),
        0 => Ok(&(&lc * x) * &rc),
        _ => Err(Error::InvalidArgument(format!(
            "Peirce index must be 0, 1 or 2, got {k}"
        ))),
    }
}

/// The `j` with `{w w v} = (j/2) v`, if any.
pub fn peirce_index(w: &PartialIsometry, v: &PartialIsometry) -> Result<Option<u8>> {
    let t = triple_product(w.mat(), w.mat(), v.mat())?;
    if t.is_zero() {
        return Ok(Some(0));
    }
    if t == v.mat().scale(&ExactScalar::half()) {
        return Ok(Some(1));
    }
    if &t == v.mat() {
        return Ok(Some(2));
    }
    Ok(None)
}

pub fn classify_relation(v: &PartialIsometry, w: &PartialIsometry) -> Result<GridRelation> {
    if v.shape() != w.shape() {
        return Err(Error::dim(
            "classify_relation",
            format!("{:?} vs {:?}", v.shape(), w.shape()),
        ));
    }
    if v == w {
        return Ok(GridRelation::Equal);
    }
    let (a, b) = (v.mat(), w.mat());
    if a.adjoint().mul(b)?.is_zero() && a.mul(&b.adjoint())?.is_zero() {
        return Ok(GridRelation::Orthogonal);
    }
    // j for v in M_j(w) and for w in M_j(v)
    let v_in_w = peirce_index(w, v)?;
    let w_in_v = peirce_index(v, w)?;
    Ok(match (v_in_w, w_in_v) {
        (Some(1), Some(1)) => GridRelation::Colinear,
        (Some(1), Some(2)) => GridRelation::GovernsFirstOverSecond,
        (Some(2), Some(1)) => GridRelation::GovernsSecondOverFirst,
        _ => GridRelation::Unclassified,
    })
}

/// Minimality relative to a finite family: `v w* v = 0` for every other
/// member `w` and `v v* v = v`.
pub fn is_minimal_in_family(v: &PartialIsometry, family: &[PartialIsometry]) -> bool {
    let m = v.mat();
    family.iter().filter(|w| *w != v).all(|w| {
        ternary_product(m, w.mat(), m)
            .map(|t| t.is_zero())
            .unwrap_or(false)
    }) && ternary_product(m, m, m).map(|t| &t == m).unwrap_or(false)
}

/// `a · b = a v* b`.
pub fn isotope_product(v: &PartialIsometry, a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    check_shape("isotope_product", v, a)?;
    check_shape("isotope_product", v, b)?;
    ternary_product(a, v.mat(), b)
}

/// `a♯ = v a* v`.
pub fn isotope_involution(v: &PartialIsometry, a: &ExactMatrix) -> Result<ExactMatrix> {
    check_shape("isotope_involution", v, a)?;
    v.mat().mul(&a.adjoint())?.mul(v.mat())
}

fn check_shape(op: &'static str, v: &PartialIsometry, a: &ExactMatrix) -> Result<()> {
    if v.shape() != a.shape() {
        return Err(Error::dim(op, format!("{:?} vs {:?}", a.shape(), v.shape())));
    }
    Ok(())
}

/// Size of the largest pairwise orthogonal subfamily.
pub fn family_rank(family: &[PartialIsometry]) -> Result<usize> {
    let n = family.len();
    if n > RANK_SEARCH_CAP {
        return Err(Error::Capacity(format!(
            "rank search over {n} elements exceeds the cap of {RANK_SEARCH_CAP}"
        )));
    }
    let mut adj = vec![0u32; n];
    for i in 0..n {
        for j in i + 1..n {
            if classify_relation(&family[i], &family[j])? == GridRelation::Orthogonal {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    Ok(max_clique(&adj, 0, all, 0))
}

fn max_clique(adj: &[u32], size: usize, mut candidates: u32, mut best: usize) -> usize {
    if candidates == 0 {
        return best.max(size);
    }
    while candidates != 0 {
        if size + candidates.count_ones() as usize <= best {
            return best;
        }
        let v = candidates.trailing_zeros() as usize;
        candidates &= !(1 << v);
        best = max_clique(adj, size + 1, candidates & adj[v], best);
    }
    best.max(size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(r: usize, c: usize, i: usize, j: usize) -> ExactMatrix {
        ExactMatrix::unit(r, c, i - 1, j - 1)
    }

    fn pi(m: ExactMatrix) -> PartialIsometry {
        PartialIsometry::new(m).unwrap()
    }

    #[test]
    fn triple_examples() {
        let e11 = e(2, 2, 1, 1);
        assert_eq!(triple_product(&e11, &e11, &e11).unwrap(), e11);
        assert!(triple_product(&e11, &e(2, 2, 2, 2), &e11).unwrap().is_zero());
        let t = triple_product(&e(2, 2, 1, 2), &e(2, 2, 1, 1), &e(2, 2, 2, 1)).unwrap();
        assert_eq!(t, e(2, 2, 2, 2).scale(&ExactScalar::half()));
    }

    #[test]
    fn ternary_examples() {
        let e12 = e(2, 2, 1, 2);
        assert_eq!(ternary_product(&e12, &e12, &e12).unwrap(), e12);
        assert!(ternary_product(&e(2, 2, 1, 1), &e12, &e12).unwrap().is_zero());
    }

    #[test]
    fn peirce_examples() {
        let v = pi(e(2, 2, 1, 1));
        let x = e(2, 2, 1, 2);
        assert_eq!(peirce_project(&v, &x, 1).unwrap(), x);
        assert!(peirce_project(&v, &x, 2).unwrap().is_zero());
        assert!(matches!(
            peirce_project(&v, &x, 3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(peirce_project(&v, &ExactMatrix::zeros(3, 2), 0).is_err());
    }

    #[test]
    fn peirce_calculus_zero_rule() {
        let v = pi(e(2, 2, 1, 1));
        let a = peirce_project(&v, &ExactMatrix::from_ints(&[&[3, 1], &[2, 5]]), 2).unwrap();
        let b = peirce_project(&v, &ExactMatrix::from_ints(&[&[1, -1], &[4, 7]]), 0).unwrap();
        let c = ExactMatrix::from_gaussian_ints(&[&[(1, 1), (2, 0)], &[(0, -3), (5, 2)]]);
        assert!(triple_product(&a, &b, &c).unwrap().is_zero());
    }

    #[test]
    fn relations() {
        let e11 = pi(e(2, 2, 1, 1));
        assert_eq!(
            classify_relation(&e11, &pi(e(2, 2, 2, 2))).unwrap(),
            GridRelation::Orthogonal
        );
        assert_eq!(
            classify_relation(&e11, &pi(e(2, 2, 1, 2))).unwrap(),
            GridRelation::Colinear
        );
        let u12 = pi(&e(2, 2, 1, 2) + &e(2, 2, 2, 1));
        assert_eq!(
            classify_relation(&u12, &e11).unwrap(),
            GridRelation::GovernsFirstOverSecond
        );
        assert_eq!(
            classify_relation(&e11, &u12).unwrap(),
            GridRelation::GovernsSecondOverFirst
        );
        assert_eq!(classify_relation(&e11, &e11).unwrap(), GridRelation::Equal);
        // E_11 and (E_11 + E_22) are neither
        assert_eq!(
            classify_relation(&e11, &pi(ExactMatrix::identity(2))).unwrap(),
            GridRelation::Unclassified
        );
    }

    #[test]
    fn construction_rejects() {
        assert!(PartialIsometry::new(ExactMatrix::zeros(2, 2)).is_err());
        let two = ExactMatrix::identity(2).scale(&ExactScalar::from_int(2));
        assert!(matches!(
            PartialIsometry::new(two),
            Err(Error::NotPartialIsometry(_))
        ));
    }

    #[test]
    fn minimality() {
        let fam = vec![pi(e(2, 2, 1, 1)), pi(e(2, 2, 2, 2))];
        assert!(is_minimal_in_family(&fam[0], &fam));
        let grid: Vec<_> = (1..=2)
            .flat_map(|i| (1..=3).map(move |j| pi(e(2, 3, i, j))))
            .collect();
        assert!(grid.iter().all(|u| is_minimal_in_family(u, &grid)));
        let herm = vec![pi(e(2, 2, 1, 1)), pi(&e(2, 2, 1, 2) + &e(2, 2, 2, 1))];
        assert!(is_minimal_in_family(&herm[0], &herm));
    }

    #[test]
    fn isotope_examples() {
        let id = pi(ExactMatrix::identity(2));
        let a = ExactMatrix::from_gaussian_ints(&[&[(1, 2), (0, 1)], &[(3, 0), (-1, -1)]]);
        let b = ExactMatrix::from_ints(&[&[2, 0], &[1, 1]]);
        assert_eq!(isotope_product(&id, &a, &b).unwrap(), &a * &b);
        assert_eq!(isotope_involution(&id, &a).unwrap(), a.adjoint());
        let v = pi(e(2, 2, 1, 2));
        let x = e(2, 2, 1, 2).scale(&ExactScalar::from_gaussian_int(2, -1));
        assert_eq!(isotope_product(&v, v.mat(), &x).unwrap(), x);
        assert_eq!(isotope_product(&v, v.mat(), v.mat()).unwrap(), *v.mat());
    }

    #[test]
    fn ranks() {
        let rect: Vec<_> = (1..=2)
            .flat_map(|i| (1..=2).map(move |j| pi(e(2, 2, i, j))))
            .collect();
        assert_eq!(family_rank(&rect).unwrap(), 2);
        let too_many: Vec<_> = (0..25).map(|_| pi(e(1, 1, 1, 1))).collect();
        assert!(matches!(family_rank(&too_many), Err(Error::Capacity(_))));
        assert_eq!(family_rank(&[]).unwrap(), 0);
    }

    fn scalar_strategy() -> impl Strategy<Value = ExactScalar> {
        (-4i64..=4, -4i64..=4, 1i64..=3).prop_map(|(re, im, d)| {
            &ExactScalar::from_gaussian_int(re, im) * &ExactScalar::ratio(1, d)
        })
    }

    fn matrix_strategy(r: usize, c: usize) -> impl Strategy<Value = ExactMatrix> {
        proptest::collection::vec(scalar_strategy(), r * c)
            .prop_map(move |v| ExactMatrix::from_entries(r, c, v).unwrap())
    }

    // partial permutation with unit phases
    fn pi_strategy(r: usize, c: usize) -> impl Strategy<Value = PartialIsometry> {
        (
            Just((0..c).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(0u8..5, r),
        )
            .prop_filter_map("zero", move |(perm, phases)| {
                let mut m = ExactMatrix::zeros(r, c);
                for (i, (&j, &ph)) in perm.iter().zip(&phases).enumerate() {
                    let z = match ph {
                        0 => continue,
                        1 => ExactScalar::one(),
                        2 => ExactScalar::from_int(-1),
                        3 => ExactScalar::i(),
                        _ => -ExactScalar::i(),
                    };
                    m.set(i, j, z);
                }
                PartialIsometry::new(m).ok()
            })
    }

    proptest! {
        #[test]
        fn polarization(a in matrix_strategy(3, 4)) {
            let lhs = triple_product(&a, &a, &a).unwrap();
            prop_assert_eq!(lhs, ternary_product(&a, &a, &a).unwrap());
        }

        #[test]
        fn peirce_resolution(v in pi_strategy(3, 4), x in matrix_strategy(3, 4)) {
            let parts: Vec<_> = (0..3).map(|k| peirce_project(&v, &x, k).unwrap()).collect();
            prop_assert_eq!(&(&parts[0] + &parts[1]) + &parts[2], x.clone());
            for (k, p) in parts.iter().enumerate() {
                prop_assert_eq!(&peirce_project(&v, p, k as u8).unwrap(), p);
                for j in (0..3).filter(|&j| j != k as u8) {
                    prop_assert!(peirce_project(&v, p, j).unwrap().is_zero());
                }
            }
        }

        #[test]
        fn peirce_eigenvalues(v in pi_strategy(3, 3), x in matrix_strategy(3, 3)) {
            // {v v P_j x} = (j/2) P_j x
            for j in 0..3u8 {
                let p = peirce_project(&v, &x, j).unwrap();
                let t = triple_product(v.mat(), v.mat(), &p).unwrap();
                prop_assert_eq!(t, p.scale(&ExactScalar::ratio(j as i64, 2)));
            }
        }

        #[test]
        fn isotope_involution_reverses(v in pi_strategy(3, 3), x in matrix_strategy(3, 3), y in matrix_strategy(3, 3)) {
            let a = peirce_project(&v, &x, 2).unwrap();
            let b = peirce_project(&v, &y, 2).unwrap();
            let ab = isotope_product(&v, &a, &b).unwrap();
            let lhs = isotope_involution(&v, &ab).unwrap();
            let rhs = isotope_product(
                &v,
                &isotope_involution(&v, &b).unwrap(),
                &isotope_involution(&v, &a).unwrap(),
            ).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn isotope_associative(v in pi_strategy(3, 3), x in matrix_strategy(3, 3), y in matrix_strategy(3, 3), z in matrix_strategy(3, 3)) {
            let a = peirce_project(&v, &x, 2).unwrap();
            let b = peirce_project(&v, &y, 2).unwrap();
            let c = peirce_project(&v, &z, 2).unwrap();
            let l = isotope_product(&v, &isotope_product(&v, &a, &b).unwrap(), &c).unwrap();
            let r = isotope_product(&v, &a, &isotope_product(&v, &b, &c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
