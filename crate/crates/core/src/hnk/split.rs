use crate::error::{Error, Result};
use crate::grids::{verify_grid, Grid, GridIndex, GridKind};
use crate::numlin::{ExactMatrix, SpanSolver};
use crate::report::{Check, VerificationReport};

use super::combination::combinations;
use super::space::{RankOneRealization, Side};

#[derive(Clone, Debug)]
pub struct PeirceSplit {
    /// `p_R = Σ_{|J| = i_R} (uu*)_J`.
    pub p: ExactMatrix,
    pub p_part: RankOneRealization,
    /// `None` when every `(1 − p) u_j` vanishes.
    pub q_part: Option<RankOneRealization>,
    pub report: VerificationReport,
}

fn is_projection(p: &ExactMatrix) -> bool {
    p.is_square() && &(p * p) == p && &p.adjoint() == p
}

fn cross_orthogonal(a: &[ExactMatrix], b: &[ExactMatrix]) -> Vec<String> {
    let mut bad = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if !(x * &y.adjoint()).is_zero() || !(&x.adjoint() * y).is_zero() {
                bad.push(format!("({}, {})", i + 1, j + 1));
            }
        }
    }
    bad
}

fn nonzero_split(parts: Vec<ExactMatrix>, what: &str) -> Result<Option<Vec<ExactMatrix>>> {
    let zeros = parts.iter().filter(|m| m.is_zero()).count();
    if zeros == parts.len() {
        Ok(None)
    } else if zeros == 0 {
        Ok(Some(parts))
    } else {
        Err(Error::Decomposition(format!(
            "{zeros} of {} elements vanish under {what}",
            parts.len()
        )))
    }
}

/// Splits a rank-one realization by `p_R` into `{p u_j}` and `{(1−p) u_j}`.
pub fn peirce_split(real: &RankOneRealization) -> Result<PeirceSplit> {
    let n = real.n();
    let (i_r, _) = real.indices()?;
    let rows = real.shape().0;
    let mut p = ExactMatrix::zeros(rows, rows);
    for s in combinations(n, i_r)? {
        p = &p + &real.support_product(Side::Right, &s);
    }
    let q = &ExactMatrix::identity(rows) - &p;
    let mats = real.matrices();
    let p_mats: Vec<ExactMatrix> = mats.iter().map(|u| &p * u).collect();
    let q_mats: Vec<ExactMatrix> = mats.iter().map(|u| &q * u).collect();

    let mut report = VerificationReport::new(format!("Peirce split of a rank-one grid, n = {n}"));
    report.push(Check::from_bool("p is a projection", is_projection(&p), 0.0, ""));
    let p_mats = nonzero_split(p_mats, "p")?
        .ok_or_else(|| Error::Decomposition("p annihilates every element".into()))?;
    let p_part = RankOneRealization::new(p_mats.clone())?;
    report.absorb("p part", verify_grid(&p_part.grid()?));
    let p_idx = p_part.indices()?;
    let q_part = match nonzero_split(q_mats, "1 - p")? {
        None => {
            report.push(Check::from_bool("(1 - p) part", true, 0.0, "empty"));
            None
        }
        Some(q_mats) => {
            let q_part = RankOneRealization::new(q_mats.clone())?;
            report.absorb("(1 - p) part", verify_grid(&q_part.grid()?));
            let q_idx = q_part.indices()?;
            report.push(Check::from_bool(
                "i_R drops on the (1 - p) part",
                q_idx.0 < p_idx.0,
                0.0,
                format!("{} then {}", p_idx.0, q_idx.0),
            ));
            let total = n * n;
            report.push(Check::tally("pY orthogonal to (1 - p)Y", cross_orthogonal(&p_mats, &q_mats), total));
            Some(q_part)
        }
    };
    report.push(Check::from_bool(
        "i_R of the p part",
        p_idx.0 == i_r,
        0.0,
        format!("indices {p_idx:?}"),
    ));
    Ok(PeirceSplit {
        p,
        p_part,
        q_part,
        report,
    })
}

#[derive(Clone, Debug)]
pub struct RectSplit {
    /// `p = Σ_i Π_k u_ik u_ik*`.
    pub p: ExactMatrix,
    pub p_part: Grid,
    pub q_part: Option<Grid>,
    pub report: VerificationReport,
}

/// Splits a rectangular grid of rank at least two by `p` and checks that
/// `{p u_ij}` is ternary closed and ternary isomorphic to matrix units.
pub fn rect_split(g: &Grid) -> Result<RectSplit> {
    let GridKind::Rectangular { rows: a, cols: b } = g.kind() else {
        return Err(Error::InvalidArgument("expected a rectangular grid".into()));
    };
    if a < 2 || b < 2 {
        return Err(Error::InvalidArgument(format!("need rank >= 2, got a {a}x{b} grid")));
    }
    let u = |i: usize, j: usize| g.get(&GridIndex::Pair(i, j)).expect("complete grid");
    let dim = g.shape().expect("nonempty").0;
    let mut report = VerificationReport::new(format!("rectangular split of a {a}x{b} grid"));

    let (mut row_bad, mut col_bad) = (Vec::new(), Vec::new());
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=b {
                if (u(i, k) * &u(i, j).adjoint()).is_zero() || (&u(i, k).adjoint() * u(i, j)).is_zero() {
                    row_bad.push(format!("i={i} j={j} k={k}"));
                }
            }
        }
    }
    for i in 1..=a {
        for j in 1..=a {
            for k in 1..=b {
                if (u(i, k) * &u(j, k).adjoint()).is_zero() || (&u(i, k).adjoint() * u(j, k)).is_zero() {
                    col_bad.push(format!("i={i} j={j} k={k}"));
                }
            }
        }
    }
    report.push(Check::tally("row products nonzero", row_bad, a * b * b));
    report.push(Check::tally("column products nonzero", col_bad, a * a * b));

    let mut ls = Vec::with_capacity(a);
    for i in 1..=a {
        let mut l = ExactMatrix::identity(dim);
        for k in 1..=b {
            l = &l * &(u(i, k) * &u(i, k).adjoint());
        }
        ls.push(l);
    }
    let mut bad = Vec::new();
    for (i, l) in ls.iter().enumerate() {
        if l.is_zero() || !is_projection(l) {
            bad.push(format!("L_{}", i + 1));
        }
        for (j, m) in ls.iter().enumerate().skip(i + 1) {
            if !(l * m).is_zero() {
                bad.push(format!("L_{} L_{}", i + 1, j + 1));
            }
        }
    }
    report.push(Check::tally("L_i nonzero orthogonal projections", bad, a * (a + 1) / 2));
    let p = ls.iter().fold(ExactMatrix::zeros(dim, dim), |acc, l| &acc + l);
    let q = &ExactMatrix::identity(dim) - &p;
    report.push(Check::from_bool("p is a projection", is_projection(&p), 0.0, ""));

    let labels: Vec<(usize, usize)> = (1..=a).flat_map(|i| (1..=b).map(move |j| (i, j))).collect();
    let p_members: Vec<(GridIndex, ExactMatrix)> = labels
        .iter()
        .map(|&(i, j)| (GridIndex::Pair(i, j), &p * u(i, j)))
        .collect();
    let p_part = Grid::new(g.kind(), p_members)?;
    report.absorb("p part", verify_grid(&p_part));
    let pu = |i: usize, j: usize| p_part.get(&GridIndex::Pair(i, j)).expect("complete grid");

    let mut bad = Vec::new();
    for i in 1..=a {
        for j in 1..=b {
            for k in (1..=b).filter(|&k| k != j) {
                if !(pu(i, k) * &pu(i, j).adjoint()).is_zero() {
                    bad.push(format!("row {i}: {k},{j}"));
                }
            }
        }
    }
    for r in 1..=b {
        for i in 1..=a {
            for j in (1..=a).filter(|&j| j != i) {
                if !(&pu(i, r).adjoint() * pu(j, r)).is_zero() {
                    bad.push(format!("column {r}: {i},{j}"));
                }
            }
        }
    }
    report.push(Check::tally("ternary closure criterion", bad, a * b * (b - 1) + b * a * (a - 1)));

    let span = SpanSolver::new(&p_part.matrices())?;
    let (mut closure, mut iso) = (Vec::new(), Vec::new());
    for &(i, j) in &labels {
        for &(k, l) in &labels {
            for &(m, r) in &labels {
                let t = &(pu(i, j) * &pu(k, l).adjoint()) * pu(m, r);
                if !span.contains(&t) {
                    closure.push(format!("({i}{j})({k}{l})*({m}{r})"));
                }
                let want = if j == l && k == m {
                    pu(i, r).clone()
                } else {
                    ExactMatrix::zeros(t.rows(), t.cols())
                };
                if t != want {
                    iso.push(format!("({i}{j})({k}{l})*({m}{r})"));
                }
            }
        }
    }
    let triples = labels.len().pow(3);
    report.push(Check::tally("pY is ternary closed", closure, triples));
    report.push(Check::tally("p u_ij -> E_ij preserves ab*c", iso, triples));

    let q_mats: Vec<ExactMatrix> = labels.iter().map(|&(i, j)| &q * u(i, j)).collect();
    let q_part = match nonzero_split(q_mats, "1 - p")? {
        None => None,
        Some(q_mats) => {
            let members = labels.iter().map(|&(i, j)| GridIndex::Pair(i, j)).zip(q_mats.clone()).collect();
            let q_part = Grid::new(g.kind(), members)?;
            report.absorb("(1 - p) part", verify_grid(&q_part));
            report.push(Check::tally(
                "pY orthogonal to (1 - p)Y",
                cross_orthogonal(&p_part.matrices(), &q_mats),
                labels.len().pow(2),
            ));
            Some(q_part)
        }
    };
    Ok(RectSplit {
        p,
        p_part,
        q_part,
        report,
    })
}
