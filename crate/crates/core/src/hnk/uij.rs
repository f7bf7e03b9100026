use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{ExactMatrix, ExactScalar};
use crate::report::{Check, CheckStatus, VerificationReport};
use crate::triple::{classify_relation, GridRelation, PartialIsometry};

use super::combination::{combinations, Combination};
use super::signature::signature_one;
use super::space::{HnkSpace, RankOneRealization, Side};

pub const UIJ_VERIFY_MAX_N: usize = 5;

/// `(uu*)_I u_c (u*u)_J`, optionally adjoined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneFactor {
    pub i_set: Combination,
    pub c: usize,
    pub j_set: Combination,
    pub starred: bool,
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct OnesDecomposition {
    pub factors: Vec<OneFactor>,
    pub product: ExactMatrix,
    /// `product = relative_sign · u_IJ`.
    pub relative_sign: i8,
}

impl OnesDecomposition {
    pub fn signature(&self) -> i8 {
        self.factors.iter().map(|f| f.sign).product()
    }
}

/// Indices checked once, reused for every `(I, J)`.
struct Frame<'a> {
    real: &'a RankOneRealization,
    n: usize,
    i_r: usize,
    i_l: usize,
}

impl<'a> Frame<'a> {
    fn new(real: &'a RankOneRealization) -> Result<Self> {
        let n = real.n();
        let (i_r, i_l) = real.indices()?;
        if i_r + i_l != n + 1 {
            return Err(Error::InvalidArgument(format!(
                "u_IJ needs i_R + i_L = n + 1, got {i_r} + {i_l} with n = {n}"
            )));
        }
        Ok(Self { real, n, i_r, i_l })
    }

    fn check(&self, i_set: &Combination, j_set: &Combination) -> Result<()> {
        if i_set.n() != self.n || j_set.n() != self.n {
            return Err(Error::InvalidArgument(format!("index sets must live in 1..={}", self.n)));
        }
        if i_set.len() + 1 != self.i_r || j_set.len() + 1 != self.i_l {
            return Err(Error::InvalidArgument(format!(
                "need |I| = {} and |J| = {}, got {i_set} and {j_set}",
                self.i_r - 1,
                self.i_l - 1
            )));
        }
        Ok(())
    }

    fn u(&self, j: usize) -> &ExactMatrix {
        self.real.element(j)
    }

    fn one(&self, i_set: &Combination, c: usize, j_set: &Combination) -> ExactMatrix {
        let left = self.real.support_product(Side::Right, i_set);
        let right = self.real.support_product(Side::Left, j_set);
        &(&left * self.u(c)) * &right
    }

    fn build(&self, i_set: &Combination, j_set: &Combination) -> Result<ExactMatrix> {
        self.check(i_set, j_set)?;
        let cs = i_set.union(j_set).complement();
        let ds = i_set.intersection(j_set);
        let mut acc = self.real.support_product(Side::Right, &i_set.difference(j_set));
        for (&c, &d) in cs.members().iter().zip(ds.members()) {
            acc = &(&acc * self.u(c)) * &self.u(d).adjoint();
        }
        let last = *cs.members().last().expect("|C| = s + 1 >= 1");
        acc = &acc * self.u(last);
        Ok(&acc * &self.real.support_product(Side::Left, &j_set.difference(i_set)))
    }

    fn decompose(
        &self,
        i_set: &Combination,
        j_set: &Combination,
        c_order: &[usize],
        d_order: &[usize],
    ) -> Result<OnesDecomposition> {
        self.check(i_set, j_set)?;
        let cs = i_set.union(j_set).complement();
        let ds = i_set.intersection(j_set);
        let same_set = |order: &[usize], set: &Combination| {
            let mut sorted = order.to_vec();
            sorted.sort_unstable();
            sorted == set.members()
        };
        if !same_set(c_order, &cs) || !same_set(d_order, &ds) {
            return Err(Error::InvalidArgument(format!(
                "orders must permute C = {cs} and D = {ds}"
            )));
        }
        let s = d_order.len();
        let mut jt = j_set.clone();
        let mut it = Combination::empty(self.n);
        let mut factors = Vec::with_capacity(2 * s + 1);
        let mut product: Option<ExactMatrix> = None;
        for t in 0..=s {
            let c = c_order[t];
            it = jt.with(c).complement();
            let f = self.one(&it, c, &jt);
            if f.is_zero() {
                return Err(Error::Decomposition(format!("one ({it},{c},{jt}) vanishes")));
            }
            factors.push(OneFactor {
                i_set: it.clone(),
                c,
                j_set: jt.clone(),
                starred: false,
                sign: signature_one(&it, c, &jt)?,
            });
            product = Some(match product {
                None => f,
                Some(p) => &p * &f,
            });
            if t < s {
                let d = d_order[t];
                let l = jt.with(c).without(d);
                let g = self.one(&it, d, &l);
                if g.is_zero() {
                    return Err(Error::Decomposition(format!("one ({it},{d},{l}) vanishes")));
                }
                factors.push(OneFactor {
                    i_set: it.clone(),
                    c: d,
                    j_set: l.clone(),
                    starred: true,
                    sign: signature_one(&it, d, &l)?,
                });
                product = product.map(|p| &p * &g.adjoint());
                jt = l;
            }
        }
        if &it != i_set {
            return Err(Error::Decomposition(format!("recursion ended at {it}, expected {i_set}")));
        }
        let product = product.expect("at least one factor");
        let target = self.build(i_set, j_set)?;
        let relative_sign = if product == target {
            1
        } else if product == -&target {
            -1
        } else {
            return Err(Error::Decomposition(format!(
                "product of ones differs from u_IJ for I = {i_set}, J = {j_set}"
            )));
        };
        Ok(OnesDecomposition {
            factors,
            product,
            relative_sign,
        })
    }

    fn signature(&self, i_set: &Combination, j_set: &Combination) -> Result<i8> {
        let cs = i_set.union(j_set).complement();
        let ds = i_set.intersection(j_set);
        Ok(self.decompose(i_set, j_set, cs.members(), ds.members())?.signature())
    }
}

/// `u_IJ = (uu*)_{I−J} u_{c_1} u_{d_1}* ⋯ u_{c_{s+1}} (u*u)_{J−I}` with
/// `C = (I∪J)^c`, `D = I∩J` increasing.
pub fn build_uij(real: &RankOneRealization, i_set: &Combination, j_set: &Combination) -> Result<ExactMatrix> {
    Frame::new(real)?.build(i_set, j_set)
}

/// Writes `u_IJ` as an alternating product of ones and starred ones.
pub fn decompose_into_ones(
    real: &RankOneRealization,
    i_set: &Combination,
    j_set: &Combination,
    c_order: &[usize],
    d_order: &[usize],
) -> Result<OnesDecomposition> {
    Frame::new(real)?.decompose(i_set, j_set, c_order, d_order)
}

/// `ε(I, J)`: product of the factor signatures with increasing orders.
pub fn signature_general(real: &RankOneRealization, i_set: &Combination, j_set: &Combination) -> Result<i8> {
    Frame::new(real)?.signature(i_set, j_set)
}

struct Element {
    i_set: Combination,
    j_set: Combination,
    u: ExactMatrix,
    sign: i8,
}

impl Element {
    fn signed(&self) -> ExactMatrix {
        if self.sign > 0 {
            self.u.clone()
        } else {
            -&self.u
        }
    }

    fn label(&self) -> String {
        format!("u_{}{}", self.i_set, self.j_set)
    }
}

fn all_elements(frame: &Frame<'_>) -> Result<Vec<Element>> {
    let is = combinations(frame.n, frame.i_r - 1)?;
    let js = combinations(frame.n, frame.i_l - 1)?;
    let mut out = Vec::with_capacity(is.len() * js.len());
    for i_set in &is {
        for j_set in &js {
            out.push(Element {
                i_set: i_set.clone(),
                j_set: j_set.clone(),
                u: frame.build(i_set, j_set)?,
                sign: frame.signature(i_set, j_set)?,
            });
        }
    }
    Ok(out)
}

/// Checks the `u_IJ` of a realization with `i_R + i_L = n + 1`: minimality,
/// orthogonality and colinearity by index pattern, the quadrangle relations,
/// the expansion of each `u_c`, the decomposition into ones and sign
/// coherence on ones-triples.
pub fn verify_uij_grid(real: &RankOneRealization) -> Result<VerificationReport> {
    let n = real.n();
    if n > UIJ_VERIFY_MAX_N {
        return Err(Error::Capacity(format!(
            "u_IJ verification runs for n <= {UIJ_VERIFY_MAX_N}, got {n}"
        )));
    }
    let frame = Frame::new(real)?;
    let mut report = VerificationReport::new(format!("u_IJ grid, n = {n}, i_R = {}, i_L = {}", frame.i_r, frame.i_l));
    let start = std::time::Instant::now();
    let els = all_elements(&frame)?;
    let index: HashMap<(&Combination, &Combination), usize> = els
        .iter()
        .enumerate()
        .map(|(p, e)| ((&e.i_set, &e.j_set), p))
        .collect();
    let adj: Vec<ExactMatrix> = els.iter().map(|e| e.u.adjoint()).collect();

    let mut bad = Vec::new();
    for e in &els {
        if e.u.is_zero() || PartialIsometry::new(e.u.clone()).is_err() {
            bad.push(e.label());
        }
    }
    report.push(Check::tally("nonzero partial isometries", bad, els.len()));

    let mut minimal = Vec::new();
    let mut relation = Vec::new();
    let mut assoc = Vec::new();
    for (p, a) in els.iter().enumerate() {
        for (q, b) in els.iter().enumerate() {
            if p == q {
                continue;
            }
            if !(&(&a.u * &adj[q]) * &a.u).is_zero() {
                minimal.push(format!("{} {}* {}", a.label(), b.label(), a.label()));
            }
            if a.i_set != b.i_set && !(&a.u * &adj[q]).is_zero() {
                assoc.push(format!("{} {}*", a.label(), b.label()));
            }
            if a.j_set != b.j_set && !(&adj[p] * &b.u).is_zero() {
                assoc.push(format!("{}* {}", a.label(), b.label()));
            }
            if p < q {
                let want = match (a.i_set == b.i_set, a.j_set == b.j_set) {
                    (false, false) => GridRelation::Orthogonal,
                    _ => GridRelation::Colinear,
                };
                let pa = PartialIsometry::new(a.u.clone())?;
                let pb = PartialIsometry::new(b.u.clone())?;
                let got = classify_relation(&pa, &pb)?;
                if got != want {
                    relation.push(format!("{} vs {}: {got:?}", a.label(), b.label()));
                }
            }
        }
    }
    let pairs = els.len() * els.len().saturating_sub(1);
    report.push(Check::tally("minimality", minimal, pairs));
    report.push(Check::tally("orthogonal or colinear by index pattern", relation, pairs / 2));
    report.push(Check::tally("associative orthogonality", assoc, pairs));

    let is = combinations(n, frame.i_r - 1)?;
    let js = combinations(n, frame.i_l - 1)?;
    let mut weak = Vec::new();
    let mut signed = Vec::new();
    let mut outside = Vec::new();
    let mut total = 0;
    let signed_all: Vec<ExactMatrix> = els.iter().map(Element::signed).collect();
    for i in &is {
        for ip in &is {
            for j in &js {
                for jp in &js {
                    total += 1;
                    let a = index[&(i, j)];
                    let b = index[&(i, jp)];
                    let c = index[&(ip, jp)];
                    let target = index[&(ip, j)];
                    let prod = &(&els[a].u * &adj[b]) * &els[c].u;
                    let t = &els[target].u;
                    let tag = || format!("I={i} I'={ip} J={j} J'={jp}");
                    if prod != *t && prod != -t {
                        weak.push(tag());
                    }
                    let sprod = &(&signed_all[a] * &signed_all[b].adjoint()) * &signed_all[c];
                    if sprod != signed_all[target] {
                        if i != ip && j != jp {
                            signed.push(tag());
                        } else {
                            outside.push(tag());
                        }
                    }
                }
            }
        }
    }
    report.push(Check::tally("weak quadrangle u_IJ u_IJ'* u_I'J' = ±u_I'J", weak, total));
    report.push(Check::tally("signed quadrangle", signed, total));
    if !outside.is_empty() {
        let count = outside.len();
        report.push(Check::new(
            "signed quadrangle with a repeated index",
            CheckStatus::Flagged,
            count as f64,
            format!("{count} configurations differ: {}", outside.iter().take(6).cloned().collect::<Vec<_>>().join("; ")),
        ));
    }

    let mut bad = Vec::new();
    for c in 1..=n {
        let mut sum = ExactMatrix::zeros(real.shape().0, real.shape().1);
        for e in &els {
            if e.i_set.is_disjoint(&e.j_set) && !e.i_set.contains(c) && !e.j_set.contains(c) {
                sum = &sum + &e.u;
            }
        }
        if &sum != frame.u(c) {
            bad.push(format!("u_{c}"));
        }
    }
    report.push(Check::tally("u_c = sum of disjoint u_IJ avoiding c", bad, n));

    let mut bad = Vec::new();
    for e in &els {
        let cs = e.i_set.union(&e.j_set).complement();
        let ds = e.i_set.intersection(&e.j_set);
        let first = frame.decompose(&e.i_set, &e.j_set, cs.members(), ds.members());
        let again = frame.decompose(&e.i_set, &e.j_set, cs.members(), ds.members());
        let mut rc = cs.members().to_vec();
        let mut rd = ds.members().to_vec();
        rc.reverse();
        rd.reverse();
        let reversed = frame.decompose(&e.i_set, &e.j_set, &rc, &rd);
        match (first, again, reversed) {
            (Ok(f), Ok(g), Ok(_)) if f.relative_sign == 1 && f.factors == g.factors => {}
            (f, _, r) => bad.push(format!(
                "{}: {}",
                e.label(),
                f.err().or(r.err()).map(|x| x.to_string()).unwrap_or_else(|| "sign or index sets differ".into())
            )),
        }
    }
    report.push(Check::tally("decomposition into ones", bad, els.len()));

    report.absorb("ones-triples", ones_triples(&index, &els)?);
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// For disjoint `I, J` with complement `{b}`, `a ∈ I`, `c ∈ J`: the triples
/// `(u_IJ', u_IJ, u_I'J)` and `(u_I''J', u_I''J'', u_I'J'')`.
fn ones_triples(
    index: &HashMap<(&Combination, &Combination), usize>,
    els: &[Element],
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("ones-triples");
    let (mut products, mut signs, mut signed) = (Vec::new(), Vec::new(), Vec::new());
    let mut total = 0;
    let get = |i: &Combination, j: &Combination| &els[index[&(i, j)]];
    for e in els.iter().filter(|e| e.i_set.is_disjoint(&e.j_set)) {
        let (i, j) = (&e.i_set, &e.j_set);
        let b = i.union(j).complement().members()[0];
        for &a in i.members() {
            for &c in j.members() {
                total += 1;
                let ip = i.without(a).with(b);
                let jp = j.without(c).with(b);
                let ipp = i.with(c).without(a);
                let jpp = j.with(a).without(c);
                let lhs = [get(i, &jp), get(i, j), get(&ip, j)];
                let rhs = [get(&ipp, &jp), get(&ipp, &jpp), get(&ip, &jpp)];
                let tag = format!("I={i} J={j} a={a} b={b} c={c}");
                let prod = |t: &[&Element; 3], signed: bool| {
                    let m = |x: &Element| if signed { x.signed() } else { x.u.clone() };
                    &(&m(t[0]) * &m(t[1]).adjoint()) * &m(t[2])
                };
                if prod(&lhs, false) != -&prod(&rhs, false) {
                    products.push(tag.clone());
                }
                let sign = |t: &[&Element; 3]| t.iter().map(|x| x.sign).product::<i8>();
                if sign(&lhs) != -sign(&rhs) {
                    signs.push(tag.clone());
                }
                if prod(&lhs, true) != prod(&rhs, true) {
                    signed.push(tag);
                }
            }
        }
    }
    report.push(Check::tally("products differ by a sign", products, total));
    report.push(Check::tally("signatures differ by a sign", signs, total));
    report.push(Check::tally("signed products agree", signed, total));
    Ok(report)
}

/// [`verify_uij_grid`] plus `ε(I,J) u_IJ = E_{J,I}` on the standard basis.
pub fn verify_hnk_uij(space: &HnkSpace) -> Result<VerificationReport> {
    let mut report = verify_uij_grid(space.realization())?;
    report.subject = format!("u_IJ grid of H_{}^{}", space.n(), space.k());
    let frame = Frame::new(space.realization())?;
    let mut bad = Vec::new();
    let mut total = 0;
    for i_set in space.cols() {
        for j_set in space.rows() {
            total += 1;
            let u = frame.build(i_set, j_set)?;
            let eps = frame.signature(i_set, j_set)?;
            let e = space.matrix_unit(j_set, i_set)?;
            if u.scale(&ExactScalar::from_int(eps.into())) != e {
                bad.push(format!("I={i_set} J={j_set}"));
            }
        }
    }
    report.push(Check::tally("e(IJ) u_IJ = E_JI", bad, total));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hnk::build_hnk;

    fn comb(n: usize, m: &[usize]) -> Combination {
        Combination::new(n, m.to_vec()).unwrap()
    }

    #[test]
    fn example_one_entries() {
        let h = build_hnk(3, 2).unwrap();
        let real = h.realization();
        let u = build_uij(real, &comb(3, &[2]), &comb(3, &[1])).unwrap();
        let eps = signature_general(real, &comb(3, &[2]), &comb(3, &[1])).unwrap();
        assert_eq!(u.scale(&ExactScalar::from_int(eps.into())), ExactMatrix::unit(3, 3, 0, 1));
        // I = J = {1}: u_2 u_1* u_3
        let diag = build_uij(real, &comb(3, &[1]), &comb(3, &[1])).unwrap();
        let want = &(real.element(2) * &real.element(1).adjoint()) * real.element(3);
        assert_eq!(diag, want);
        assert_eq!(diag.nnz(), 1);
    }

    #[test]
    fn decomposition_shapes() {
        let h = build_hnk(3, 2).unwrap();
        let real = h.realization();
        let (i, j) = (comb(3, &[2]), comb(3, &[1]));
        let d = decompose_into_ones(real, &i, &j, &[3], &[]).unwrap();
        assert_eq!(d.factors.len(), 1);
        assert_eq!(d.signature(), signature_one(&i, 3, &j).unwrap());

        let one = comb(3, &[1]);
        let d = decompose_into_ones(real, &one, &one, &[2, 3], &[1]).unwrap();
        assert_eq!(d.factors.len(), 3);
        assert!(d.factors[1].starred);
        assert_eq!(d.relative_sign, 1);
        let r = decompose_into_ones(real, &one, &one, &[3, 2], &[1]).unwrap();
        assert_eq!(r.product.nnz(), 1);
        let again = decompose_into_ones(real, &one, &one, &[2, 3], &[1]).unwrap();
        assert_eq!(again.factors, d.factors);
        assert!(decompose_into_ones(real, &one, &one, &[2], &[1]).is_err());
    }

    #[test]
    fn size_mismatch() {
        let h = build_hnk(3, 2).unwrap();
        assert!(build_uij(h.realization(), &comb(3, &[1, 2]), &comb(3, &[1])).is_err());
        let diag = crate::hnk::diag_hnk(3, &[2, 1]).unwrap();
        assert!(matches!(
            build_uij(&diag, &comb(3, &[1]), &comb(3, &[1, 2])),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn small_spaces_pass() {
        for (n, k) in [(1, 1), (2, 1), (2, 2), (3, 2), (4, 3), (4, 2)] {
            let h = build_hnk(n, k).unwrap();
            let r = verify_hnk_uij(&h).unwrap();
            assert!(r.passed(), "H_{n}^{k}:\n{r}");
            assert_eq!(r.flagged().count(), 0);
        }
    }

    #[test]
    fn conjugated_realization_passes() {
        let h = build_hnk(3, 2).unwrap();
        let p = ExactMatrix::from_ints(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let moved: Vec<_> = h.basis().map(|u| &(&p * u) * &p.adjoint()).collect();
        let real = RankOneRealization::new(moved).unwrap();
        assert!(verify_uij_grid(&real).unwrap().passed());
    }
}
