//! Matrix units recovered from hermitian and symplectic grids.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numlin::{ExactMatrix, ExactScalar};
use crate::report::{Check, VerificationReport};
use crate::triple::{isotope_involution, isotope_product, PartialIsometry};

use super::{verify_grid, Grid, GridKind};

/// A system `e_ij` of matrix units, `1 <= i, j <= m`.
#[derive(Clone, Debug)]
pub struct MatrixUnits {
    pub m: usize,
    units: Vec<Vec<ExactMatrix>>,
    /// `Σ e_kk`.
    pub v: ExactMatrix,
    pub report: VerificationReport,
}

impl MatrixUnits {
    pub fn e(&self, i: usize, j: usize) -> &ExactMatrix {
        &self.units[i - 1][j - 1]
    }
}

/// Unitary permutation matrix with entries in `{±1, ±i}`.
pub fn random_signed_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ExactMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let phases = [
        ExactScalar::one(),
        ExactScalar::from_int(-1),
        ExactScalar::i(),
        -ExactScalar::i(),
    ];
    let mut m = ExactMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m.set(i, j, phases[rng.gen_range(0..4)].clone());
    }
    m
}

fn ensure_grid(g: &Grid) -> Result<()> {
    let r = verify_grid(g);
    if r.passed() {
        Ok(())
    } else {
        let failed: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
        Err(Error::Transform(format!("grid fails axioms: {}", failed.join(", "))))
    }
}

fn finish(m: usize, units: Vec<Vec<ExactMatrix>>, v: ExactMatrix, report: VerificationReport) -> Result<MatrixUnits> {
    if !report.passed() {
        let failed: Vec<_> = report
            .failures()
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        return Err(Error::Transform(failed.join("; ")));
    }
    Ok(MatrixUnits { m, units, v, report })
}

/// `e_ii = u_ii`, `e_ij = u_ii · u_ij` in the isotope algebra of
/// `v = Σ u_ii`.
pub fn hermitian_to_matrix_units(g: &Grid) -> Result<MatrixUnits> {
    let GridKind::Hermitian { m } = g.kind() else {
        return Err(Error::InvalidArgument("expected a hermitian grid".into()));
    };
    ensure_grid(g)?;
    let u = |i: usize, j: usize| {
        g.symmetric(i, j)
            .cloned()
            .ok_or_else(|| Error::Transform(format!("missing u_{i}{j}")))
    };
    let (rows, cols) = g.shape().expect("nonempty grid");
    let mut vsum = ExactMatrix::zeros(rows, cols);
    for i in 1..=m {
        vsum = &vsum + &u(i, i)?;
    }
    let v = PartialIsometry::new(vsum).map_err(|e| Error::Transform(format!("v: {e}")))?;
    let mut units = vec![Vec::with_capacity(m); m];
    for i in 1..=m {
        for j in 1..=m {
            let e = if i == j {
                u(i, i)?
            } else {
                isotope_product(&v, &u(i, i)?, &u(i, j)?)?
            };
            units[i - 1].push(e);
        }
    }
    let e = |i: usize, j: usize| &units[i - 1][j - 1];
    let vm = v.mat();
    let zero = ExactMatrix::zeros(rows, cols);

    let mut report = VerificationReport::new(format!("matrix units of {}", g.kind().name()));
    let mut bad = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            if &isotope_involution(&v, e(i, j))? != e(j, i) {
                bad.push(format!("e_{i}{j}"));
            }
        }
    }
    report.push(Check::tally("e_ij# = e_ji", bad, m * m));

    let mut bad = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            for k in 1..=m {
                for l in 1..=m {
                    let got = isotope_product(&v, e(i, j), e(k, l))?;
                    let want = if j == k { e(i, l) } else { &zero };
                    if &got != want {
                        bad.push(format!("e_{i}{j}.e_{k}{l}"));
                    }
                }
            }
        }
    }
    report.push(Check::tally("e_ij.e_kl = delta_jk e_il", bad, m.pow(4)));

    let sum = (1..=m).fold(zero.clone(), |acc, i| &acc + e(i, i));
    report.push(Check::from_bool("sum e_ii = v", &sum == vm, sum.residual(vm), ""));

    let mut bad = Vec::new();
    for i in 1..=m {
        for j in (1..=m).filter(|&j| j != i) {
            if u(i, j)? != e(i, j) + e(j, i) {
                bad.push(format!("u_{i}{j}"));
            }
        }
    }
    report.push(Check::tally("u_ij = e_ij + e_ji", bad, m * (m - 1)));

    finish(m, units, vm.clone(), report)
}

/// `e_ii = u_ij u_jk* u_ik` (any distinct `j, k`), then
/// `e_ij = e_ii e_ii* u_ij e_jj* e_jj`.
pub fn symplectic_to_matrix_units(g: &Grid) -> Result<MatrixUnits> {
    let GridKind::Symplectic { m } = g.kind() else {
        return Err(Error::InvalidArgument("expected a symplectic grid".into()));
    };
    if m < 5 {
        return Err(Error::InvalidArgument(format!(
            "symplectic matrix units need m >= 5, got {m}"
        )));
    }
    ensure_grid(g)?;
    let u = |i: usize, j: usize| {
        g.antisymmetric(i, j)
            .ok_or_else(|| Error::Transform(format!("missing u_{i}{j}")))
    };
    let (rows, cols) = g.shape().expect("nonempty grid");
    let zero = ExactMatrix::zeros(rows, cols);
    let mut report = VerificationReport::new(format!("matrix units of {}", g.kind().name()));

    let mut diag = Vec::with_capacity(m);
    let mut ambiguous = Vec::new();
    let mut choices = 0;
    for i in 1..=m {
        let mut first: Option<ExactMatrix> = None;
        for j in (1..=m).filter(|&j| j != i) {
            for k in (1..=m).filter(|&k| k != i && k != j) {
                choices += 1;
                let cand = u(i, j)?.mul(&u(j, k)?.adjoint())?.mul(&u(i, k)?)?;
                match &first {
                    None => first = Some(cand),
                    Some(f) if *f != cand => ambiguous.push(format!("e_{i}{i} via ({j},{k})")),
                    _ => {}
                }
            }
        }
        diag.push(first.expect("m >= 5 leaves choices"));
    }
    report.push(Check::tally("e_ii independent of the index pair", ambiguous.clone(), choices));
    if !ambiguous.is_empty() {
        return Err(Error::Transform(format!(
            "e_ii is not well defined: {}",
            ambiguous.join("; ")
        )));
    }

    let mut units = vec![Vec::with_capacity(m); m];
    for i in 1..=m {
        for j in 1..=m {
            let e = if i == j {
                diag[i - 1].clone()
            } else {
                let (ei, ej) = (&diag[i - 1], &diag[j - 1]);
                ei.mul(&ei.adjoint())?
                    .mul(&u(i, j)?)?
                    .mul(&ej.adjoint())?
                    .mul(ej)?
            };
            units[i - 1].push(e);
        }
    }
    let e = |i: usize, j: usize| &units[i - 1][j - 1];
    let v = (1..=m).fold(zero.clone(), |acc, i| &acc + e(i, i));

    let mut bad = Vec::new();
    for i in 1..=m {
        for j in (i + 1)..=m {
            if u(i, j)? != e(i, j) - e(j, i) {
                bad.push(format!("u_{i}{j}"));
            }
        }
    }
    report.push(Check::tally("u_ij = e_ij - e_ji", bad, m * (m - 1) / 2));

    let mut bad = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            for l in 1..=m {
                for k in 1..=m {
                    let got = e(i, j).mul(&v.adjoint())?.mul(e(l, k))?;
                    let want = if j == l { e(i, k) } else { &zero };
                    if &got != want {
                        bad.push(format!("e_{i}{j} v* e_{l}{k}"));
                    }
                }
            }
        }
    }
    report.push(Check::tally("e_ij v* e_lk = delta_jl e_ik", bad, m.pow(4)));

    let mut bad = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            if &v.mul(&e(i, j).adjoint())?.mul(&v)? != e(j, i) {
                bad.push(format!("e_{i}{j}"));
            }
        }
    }
    report.push(Check::tally("v e_ij* v = e_ji", bad, m * m));

    let mut bad = Vec::new();
    for i in 1..=m {
        for j in (1..=m).filter(|&j| j != i) {
            if !e(i, i).adjoint().mul(e(j, j))?.is_zero() {
                bad.push(format!("e_{i}{i}* e_{j}{j}"));
            }
        }
    }
    report.push(Check::tally("e_ii* e_jj = 0", bad, m * (m - 1)));

    finish(m, units, v, report)
}
