use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numlin::{ExactMatrix, ExactScalar};
use crate::report::{Check, CheckStatus, VerificationReport};
use crate::triple::{classify_relation, is_minimal_in_family, triple_product, GridRelation};

use super::{Grid, GridIndex, GridKind};

/// Families up to this size get every triple product checked.
pub const EXHAUSTIVE_LIMIT: usize = 20;
/// Extra random triples checked on larger families.
pub const SAMPLE_TRIPLES: usize = 500;
const SAMPLE_SEED: u64 = 0x6772_6964;
const LISTED: usize = 6;

type Expansion = Vec<(usize, ExactScalar)>;

/// Checks a grid against the relation and product table of its kind.
pub fn verify_grid(g: &Grid) -> VerificationReport {
    VerificationReport::timed(format!("grid {}", g.kind().name()), |report| {
        if g.is_empty() {
            report.push(Check::new("empty grid", CheckStatus::Pass, 0.0, "vacuous"));
            return;
        }
        report.push(relations_check(g));
        report.push(minimality_check(g));
        for c in named_identities(g) {
            report.push(c);
        }
        report.push(triple_table_check(g));
    })
}

fn expected_relation(kind: GridKind, a: &GridIndex, b: &GridIndex) -> Option<GridRelation> {
    use GridIndex::*;
    use GridRelation::*;
    Some(match (kind, *a, *b) {
        (GridKind::Rectangular { .. }, Pair(i, j), Pair(k, l)) => {
            if i != k && j != l {
                Orthogonal
            } else {
                Colinear
            }
        }
        (GridKind::Hermitian { .. }, Pair(i, j), Pair(k, l)) => {
            let shared = [k, l].iter().filter(|x| **x == i || **x == j).count();
            match (i == j, k == l, shared) {
                (_, _, 0) | (true, true, _) => Orthogonal,
                (false, true, _) => GovernsFirstOverSecond,
                (true, false, _) => GovernsSecondOverFirst,
                (false, false, _) => Colinear,
            }
        }
        (GridKind::Symplectic { .. }, Pair(i, j), Pair(k, l)) => {
            if [k, l].iter().any(|x| *x == i || *x == j) {
                Colinear
            } else {
                Orthogonal
            }
        }
        (GridKind::Spin { .. }, SpinZero, _) => GovernsFirstOverSecond,
        (GridKind::Spin { .. }, _, SpinZero) => GovernsSecondOverFirst,
        (GridKind::Spin { .. }, Spin(i), SpinTilde(j)) | (GridKind::Spin { .. }, SpinTilde(j), Spin(i))
            if i == j =>
        {
            Orthogonal
        }
        (GridKind::Spin { .. }, _, _) => Colinear,
        (GridKind::RankOne { .. }, Single(_), Single(_)) => Colinear,
        _ => return None,
    })
}

fn relations_check(g: &Grid) -> Check {
    let labels = g.labels();
    let els = g.elements();
    let mut bad = Vec::new();
    let mut total = 0usize;
    for a in 0..els.len() {
        for b in a + 1..els.len() {
            total += 1;
            let want = expected_relation(g.kind(), &labels[a], &labels[b]);
            let got = classify_relation(&els[a], &els[b]).ok();
            if want.is_none() || got != want {
                bad.push(format!("({}, {}): {:?} vs {:?}", labels[a], labels[b], got, want));
            }
        }
    }
    Check::from_bool(
        "pairwise relations",
        bad.is_empty(),
        bad.len() as f64,
        summary(total, &bad),
    )
}

fn expected_minimal(kind: GridKind, label: &GridIndex) -> bool {
    match (kind, label) {
        (GridKind::Hermitian { .. }, GridIndex::Pair(i, j)) => i == j,
        (GridKind::Spin { .. }, GridIndex::SpinZero) => false,
        _ => true,
    }
}

fn minimality_check(g: &Grid) -> Check {
    let mut bad = Vec::new();
    let mut total = 0;
    for (label, e) in g.iter() {
        if !expected_minimal(g.kind(), label) {
            continue;
        }
        total += 1;
        if !is_minimal_in_family(e, g.elements()) {
            bad.push(label.to_string());
        }
    }
    Check::from_bool("minimality", bad.is_empty(), bad.len() as f64, summary(total, &bad))
}

fn summary(total: usize, bad: &[String]) -> String {
    if bad.is_empty() {
        return format!("{total} checked");
    }
    let shown: Vec<_> = bad.iter().take(LISTED).cloned().collect();
    let more = if bad.len() > LISTED {
        format!(" (+{} more)", bad.len() - LISTED)
    } else {
        String::new()
    };
    format!("{}/{total} failed: {}{more}", bad.len(), shown.join("; "))
}

/// Tally of one family of identities.
struct Tally {
    name: &'static str,
    total: usize,
    residual: f64,
    bad: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            total: 0,
            residual: 0.0,
            bad: Vec::new(),
        }
    }

    fn record(&mut self, what: impl FnOnce() -> String, got: &ExactMatrix, want: &ExactMatrix) {
        self.total += 1;
        if got != want {
            self.residual = self.residual.max(got.residual(want));
            self.bad.push(what());
        }
    }

    fn finish(self, note: &str) -> Check {
        let mut detail = summary(self.total, &self.bad);
        if !note.is_empty() {
            detail = format!("{detail}; {note}");
        }
        Check::from_bool(self.name, self.bad.is_empty(), self.residual, detail)
    }
}

fn tp(a: &ExactMatrix, b: &ExactMatrix, c: &ExactMatrix) -> ExactMatrix {
    triple_product(a, b, c).expect("grid elements share a shape")
}

fn named_identities(g: &Grid) -> Vec<Check> {
    let half = ExactScalar::half();
    let neg_half = ExactScalar::ratio(-1, 2);
    match g.kind() {
        GridKind::Rectangular { rows, cols } => {
            let u = |i, j| g.get(&GridIndex::Pair(i, j));
            let mut t = Tally::new("quadrangle {u_jk u_jl u_il} = u_ik/2");
            for i in 1..=rows {
                for j in (1..=rows).filter(|&j| j != i) {
                    for k in 1..=cols {
                        for l in (1..=cols).filter(|&l| l != k) {
                            let (Some(a), Some(b), Some(c), Some(d)) =
                                (u(j, k), u(j, l), u(i, l), u(i, k))
                            else {
                                continue;
                            };
                            t.record(|| format!("i={i} j={j} k={k} l={l}"), &tp(a, b, c), &d.scale(&half));
                        }
                    }
                }
            }
            vec![t.finish("")]
        }
        GridKind::Hermitian { m } => {
            let u = |i, j| g.symmetric(i, j);
            let mut chain = Tally::new("chain {u_ij u_jk u_kl} = u_il/2");
            let mut cycle = Tally::new("cycle {u_ij u_jk u_ki} = u_ii");
            let mut govern = Tally::new("governing {u_ij u_ij u_ii} = u_ii");
            let mut skipped = 0usize;
            for i in 1..=m {
                for j in 1..=m {
                    for k in 1..=m {
                        let distinct3 = i != j && j != k && i != k;
                        if distinct3 {
                            if let (Some(a), Some(b), Some(c), Some(d)) = (u(i, j), u(j, k), u(k, i), u(i, i)) {
                                cycle.record(|| format!("i={i} j={j} k={k}"), &tp(a, b, c), d);
                            }
                        } else {
                            skipped += 1;
                        }
                        for l in 1..=m {
                            let distinct4 = distinct3 && l != i && l != j && l != k;
                            if !distinct4 {
                                skipped += 1;
                                continue;
                            }
                            if let (Some(a), Some(b), Some(c), Some(d)) = (u(i, j), u(j, k), u(k, l), u(i, l)) {
                                chain.record(|| format!("i={i} j={j} k={k} l={l}"), &tp(a, b, c), &d.scale(&half));
                            }
                        }
                    }
                    if i != j {
                        if let (Some(a), Some(d)) = (u(i, j), u(i, i)) {
                            govern.record(|| format!("i={i} j={j}"), &tp(a, a, d), d);
                        }
                    }
                }
            }
            let note = format!("{skipped} index patterns with repeated indices left to the full table");
            vec![chain.finish(&note), cycle.finish(&note), govern.finish("")]
        }
        GridKind::Symplectic { m } => {
            let u = |i, j| g.antisymmetric(i, j);
            let mut t = Tally::new("2{u_ij u_il u_kl} = u_kj");
            let two = ExactScalar::from_int(2);
            for i in 1..=m {
                for j in 1..=m {
                    for k in 1..=m {
                        for l in 1..=m {
                            let idx = [i, j, k, l];
                            let distinct = (0..4).all(|x| (x + 1..4).all(|y| idx[x] != idx[y]));
                            if !distinct {
                                continue;
                            }
                            if let (Some(a), Some(b), Some(c), Some(d)) = (u(i, j), u(i, l), u(k, l), u(k, j)) {
                                t.record(|| format!("i={i} j={j} k={k} l={l}"), &tp(&a, &b, &c).scale(&two), &d);
                            }
                        }
                    }
                }
            }
            vec![t.finish("")]
        }
        GridKind::Spin { pairs, odd } => {
            let u = |j| g.get(&GridIndex::Spin(j));
            let ut = |j| g.get(&GridIndex::SpinTilde(j));
            let mut quad1 = Tally::new("{u_i u_j u~_i} = -u~_j/2");
            let mut quad2 = Tally::new("{u_j u~_i u~_j} = -u_i/2");
            let mut printed = Tally::new("printed form {u_j u~_i u~_j} = -u~_i/2");
            for i in 1..=pairs {
                for j in (1..=pairs).filter(|&j| j != i) {
                    let (Some(ui), Some(uj), Some(ti), Some(tj)) = (u(i), u(j), ut(i), ut(j)) else {
                        continue;
                    };
                    quad1.record(|| format!("i={i} j={j}"), &tp(ui, uj, ti), &tj.scale(&neg_half));
                    let q = tp(uj, ti, tj);
                    quad2.record(|| format!("i={i} j={j}"), &q, &ui.scale(&neg_half));
                    printed.record(|| format!("i={i} j={j}"), &q, &ti.scale(&neg_half));
                }
            }
            let mut out = vec![quad1.finish(""), quad2.finish("")];
            let mut flag = printed.finish("");
            if flag.status == CheckStatus::Fail {
                flag.status = CheckStatus::Flagged;
                flag.detail = format!(
                    "{}; the printed right-hand side disagrees, the form -u_i/2 used in the expansion of s_j.s_j holds",
                    flag.detail
                );
            }
            out.push(flag);
            if odd {
                let mut gov = Tally::new("{u_0 u_i u_0} = -u~_i, {u_0 u~_i u_0} = -u_i");
                if let Some(z) = g.get(&GridIndex::SpinZero) {
                    for i in 1..=pairs {
                        if let (Some(ui), Some(ti)) = (u(i), ut(i)) {
                            gov.record(|| format!("u_{i}"), &tp(z, ui, z), &-ti);
                            gov.record(|| format!("u~_{i}"), &tp(z, ti, z), &-ui);
                        }
                    }
                }
                out.push(gov.finish(""));
            }
            out
        }
        GridKind::RankOne { n } => {
            let u = |i| g.get(&GridIndex::Single(i));
            let mut aab = Tally::new("{u_a u_a u_b} = u_b/2");
            let mut aba = Tally::new("{u_a u_b u_a} = 0");
            let mut abc = Tally::new("{u_a u_b u_c} = 0");
            for a in 1..=n {
                for b in (1..=n).filter(|&b| b != a) {
                    let (Some(ua), Some(ub)) = (u(a), u(b)) else { continue };
                    let zero = ExactMatrix::zeros(ua.rows(), ua.cols());
                    aab.record(|| format!("a={a} b={b}"), &tp(ua, ua, ub), &ub.scale(&half));
                    aba.record(|| format!("a={a} b={b}"), &tp(ua, ub, ua), &zero);
                    for c in (1..=n).filter(|&c| c != a && c != b) {
                        if let Some(uc) = u(c) {
                            abc.record(|| format!("a={a} b={b} c={c}"), &tp(ua, ub, uc), &zero);
                        }
                    }
                }
            }
            vec![aab.finish(""), aba.finish(""), abc.finish("")]
        }
    }
}

/// Expected expansions of triple products in the grid's own elements.
trait Table {
    fn expand(&self, a: usize, b: usize, c: usize) -> Result<Expansion, String>;
    /// Triples that may be nonzero; the rest are zero by the table.
    fn support(&self) -> Vec<(usize, usize, usize)>;
}

/// Coordinates read from the canonical matrix model of a rectangular,
/// hermitian, symplectic or rank-one grid: each canonical element is a signed
/// sum of matrix units and distinct elements have disjoint supports.
struct UnitModel {
    terms: Vec<Vec<(usize, usize, i64)>>,
    owner: BTreeMap<(usize, usize), (usize, i64)>,
}

impl UnitModel {
    fn new(g: &Grid) -> Option<Self> {
        let mut terms = Vec::with_capacity(g.len());
        for label in g.labels() {
            let t = match (g.kind(), *label) {
                (GridKind::Rectangular { .. }, GridIndex::Pair(i, j)) => vec![(i, j, 1)],
                (GridKind::Hermitian { .. }, GridIndex::Pair(i, j)) if i == j => vec![(i, i, 1)],
                (GridKind::Hermitian { .. }, GridIndex::Pair(i, j)) => vec![(i, j, 1), (j, i, 1)],
                (GridKind::Symplectic { .. }, GridIndex::Pair(i, j)) => vec![(i, j, 1), (j, i, -1)],
                (GridKind::RankOne { .. }, GridIndex::Single(i)) => vec![(1, i, 1)],
                _ => return None,
            };
            terms.push(t);
        }
        let mut owner = BTreeMap::new();
        for (idx, t) in terms.iter().enumerate() {
            for &(r, c, s) in t {
                owner.insert((r, c), (idx, s));
            }
        }
        Some(Self { terms, owner })
    }

    // a b* c in the canonical model, as (row, col) -> coefficient
    fn ternary(&self, a: usize, b: usize, c: usize, acc: &mut BTreeMap<(usize, usize), i64>) {
        for &(i, j, x) in &self.terms[a] {
            for &(k, l, y) in &self.terms[b] {
                if j != l {
                    continue;
                }
                for &(p, q, z) in &self.terms[c] {
                    if k == p {
                        *acc.entry((i, q)).or_insert(0) += x * y * z;
                    }
                }
            }
        }
    }

    fn left_meets(&self, a: usize, b: usize) -> bool {
        self.terms[a]
            .iter()
            .any(|&(_, j, _)| self.terms[b].iter().any(|&(_, l, _)| j == l))
    }

    fn right_meets(&self, b: usize, c: usize) -> bool {
        self.terms[b]
            .iter()
            .any(|&(k, _, _)| self.terms[c].iter().any(|&(p, _, _)| k == p))
    }
}

impl Table for UnitModel {
    fn expand(&self, a: usize, b: usize, c: usize) -> Result<Expansion, String> {
        let mut acc = BTreeMap::new();
        self.ternary(a, b, c, &mut acc);
        self.ternary(c, b, a, &mut acc);
        acc.retain(|_, v| *v != 0);
        let mut coeff: BTreeMap<usize, i64> = BTreeMap::new();
        for (pos, v) in &acc {
            let (idx, s) = self
                .owner
                .get(pos)
                .ok_or_else(|| format!("product leaves the span at {pos:?}"))?;
            let lam = v * s;
            if let Some(prev) = coeff.insert(*idx, lam) {
                if prev != lam {
                    return Err(format!("inconsistent coordinate for element {idx}"));
                }
            }
        }
        for (idx, lam) in &coeff {
            for &(r, c, s) in &self.terms[*idx] {
                if acc.get(&(r, c)).copied().unwrap_or(0) != lam * s {
                    return Err(format!("product is not a combination at {:?}", (r, c)));
                }
            }
        }
        Ok(coeff
            .into_iter()
            .map(|(idx, lam)| (idx, ExactScalar::ratio(lam, 2)))
            .collect())
    }

    fn support(&self) -> Vec<(usize, usize, usize)> {
        let n = self.terms.len();
        let mut out = BTreeSet::new();
        for b in 0..n {
            let left: Vec<_> = (0..n).filter(|&a| self.left_meets(a, b)).collect();
            let right: Vec<_> = (0..n).filter(|&c| self.right_meets(b, c)).collect();
            for &a in &left {
                for &c in &right {
                    out.insert((a, b, c));
                    out.insert((c, b, a));
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Product table of a spin grid.
struct SpinTable {
    labels: Vec<GridIndex>,
    pos: BTreeMap<GridIndex, usize>,
}

impl SpinTable {
    fn new(g: &Grid) -> Self {
        let labels = g.labels().to_vec();
        let pos = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        Self { labels, pos }
    }

    fn at(&self, l: GridIndex, coef: ExactScalar) -> Result<Expansion, String> {
        self.pos
            .get(&l)
            .map(|&i| vec![(i, coef)])
            .ok_or_else(|| format!("missing element {l}"))
    }
}

fn partner(l: GridIndex) -> Option<GridIndex> {
    match l {
        GridIndex::Spin(j) => Some(GridIndex::SpinTilde(j)),
        GridIndex::SpinTilde(j) => Some(GridIndex::Spin(j)),
        _ => None,
    }
}

fn spin_number(l: GridIndex) -> usize {
    match l {
        GridIndex::Spin(j) | GridIndex::SpinTilde(j) => j,
        _ => 0,
    }
}

impl Table for SpinTable {
    fn expand(&self, a: usize, b: usize, c: usize) -> Result<Expansion, String> {
        use GridIndex::*;
        let (la, lb, lc) = (self.labels[a], self.labels[b], self.labels[c]);
        let one = ExactScalar::one();
        let half = ExactScalar::half();
        let neg_half = ExactScalar::ratio(-1, 2);
        let neg = ExactScalar::from_int(-1);
        // all three equal
        if la == lb && lb == lc {
            return self.at(la, one);
        }
        // u_0 in the middle slot
        if lb == SpinZero {
            if la == SpinZero {
                return self.at(lc, one);
            }
            if lc == SpinZero {
                return self.at(la, one);
            }
            if partner(la) == Some(lc) {
                return self.at(SpinZero, neg_half);
            }
            return Ok(vec![]);
        }
        // {u_0 x u_0}
        if la == SpinZero && lc == SpinZero {
            return match lb {
                Spin(j) => self.at(SpinTilde(j), neg),
                SpinTilde(j) => self.at(Spin(j), neg),
                _ => Ok(vec![]),
            };
        }
        // {x x y} and {y x x}
        if la == lb || lc == lb {
            let other = if la == lb { lc } else { la };
            if partner(lb) == Some(other) {
                return Ok(vec![]);
            }
            return self.at(other, half);
        }
        // {x y x'} with x, x' a pair and y from another pair
        if partner(la) == Some(lc) && lb != SpinZero && spin_number(lb) != spin_number(la) {
            let target = match lb {
                Spin(j) => SpinTilde(j),
                SpinTilde(j) => Spin(j),
                _ => unreachable!(),
            };
            return self.at(target, neg_half);
        }
        Ok(vec![])
    }

    fn support(&self) -> Vec<(usize, usize, usize)> {
        let n = self.labels.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.expand(a, b, c).map(|e| !e.is_empty()).unwrap_or(true) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }
}

fn triple_table_check(g: &Grid) -> Check {
    let table: Box<dyn Table> = match g.kind() {
        GridKind::Spin { .. } => Box::new(SpinTable::new(g)),
        _ => match UnitModel::new(g) {
            Some(m) => Box::new(m),
            None => {
                return Check::new("triple products", CheckStatus::Fail, f64::INFINITY, "no product table");
            }
        },
    };
    let n = g.len();
    let triples: Vec<(usize, usize, usize)> = if n <= EXHAUSTIVE_LIMIT {
        (0..n)
            .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
            .collect()
    } else {
        let mut set: BTreeSet<_> = table.support().into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        for _ in 0..SAMPLE_TRIPLES {
            set.insert((rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)));
        }
        set.into_iter().collect()
    };
    let mode = if n <= EXHAUSTIVE_LIMIT {
        "exhaustive".to_string()
    } else {
        format!("table support plus {SAMPLE_TRIPLES} sampled")
    };
    let els = g.elements();
    let shape = els[0].shape();
    let mut t = Tally::new("triple products");
    for (a, b, c) in triples {
        let label = || format!("{{{} {} {}}}", g.labels()[a], g.labels()[b], g.labels()[c]);
        let want = match table.expand(a, b, c) {
            Ok(exp) => exp.iter().fold(ExactMatrix::zeros(shape.0, shape.1), |acc, (i, s)| {
                &acc + &els[*i].mat().scale(s)
            }),
            Err(e) => {
                t.total += 1;
                t.residual = f64::INFINITY;
                t.bad.push(format!("{}: {e}", label()));
                continue;
            }
        };
        t.record(label, &tp(els[a].mat(), els[b].mat(), els[c].mat()), &want);
    }
    t.finish(&mode)
}

#[cfg(test)]
mod tests {
    use super::super::{hermitian_grid, rank_one_grid, rectangular_grid, spin_grid, symplectic_grid};
    use super::*;

    #[test]
    fn canonical_grids_pass() {
        for (p, q) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 3)] {
            let r = verify_grid(&rectangular_grid(p, q).unwrap());
            assert!(r.passed(), "{r}");
            assert_eq!(r.max_residual(), 0.0);
        }
        for m in 2..=4 {
            let r = verify_grid(&hermitian_grid(m).unwrap());
            assert!(r.passed(), "{r}");
        }
        let r = verify_grid(&symplectic_grid(4).unwrap());
        assert!(r.passed(), "{r}");
        let r = verify_grid(&spin_grid(2, true).unwrap());
        assert!(r.passed(), "{r}");
        assert_eq!(
            r.find("printed form {u_j u~_i u~_j} = -u~_i/2").unwrap().status,
            CheckStatus::Flagged
        );
    }

    #[test]
    fn empty_grid_is_vacuous() {
        let g = rank_one_grid(&[]).unwrap();
        assert!(verify_grid(&g).passed());
    }

    fn replace(g: &Grid, label: GridIndex, m: ExactMatrix) -> Grid {
        let members = g
            .iter()
            .map(|(l, e)| (*l, if *l == label { m.clone() } else { e.mat().clone() }))
            .collect();
        Grid::new(g.kind(), members).unwrap()
    }

    #[test]
    fn sign_flip_on_a_row_passes() {
        let g = rectangular_grid(1, 3).unwrap();
        let flipped = replace(&g, GridIndex::Pair(1, 2), -g.get(&GridIndex::Pair(1, 2)).unwrap());
        assert!(verify_grid(&flipped).passed());
    }

    #[test]
    fn sign_flip_in_a_square_breaks_the_quadrangle() {
        let g = rectangular_grid(2, 2).unwrap();
        let flipped = replace(&g, GridIndex::Pair(1, 2), -g.get(&GridIndex::Pair(1, 2)).unwrap());
        let r = verify_grid(&flipped);
        assert!(!r.passed());
        assert!(r.find("pairwise relations").unwrap().status == CheckStatus::Pass);
        assert!(r.find("minimality").unwrap().status == CheckStatus::Pass);
    }

    #[test]
    fn symmetrized_unit_fails_minimality() {
        let g = rectangular_grid(2, 2).unwrap();
        let e12 = g.get(&GridIndex::Pair(1, 2)).unwrap();
        let bad = replace(&g, GridIndex::Pair(1, 2), e12 + &e12.transpose());
        let r = verify_grid(&bad);
        assert_eq!(r.find("minimality").unwrap().status, CheckStatus::Fail);
    }

    #[test]
    fn large_family_is_sampled() {
        let r = verify_grid(&rectangular_grid(5, 5).unwrap());
        assert!(r.passed(), "{r}");
        assert!(r.find("triple products").unwrap().detail.contains("sampled"));
    }
}
