use crate::error::{Error, Result};
use crate::numlin::{ExactMatrix, ExactScalar};
use crate::report::{Check, VerificationReport};
use crate::triple::{isotope_involution, isotope_product, PartialIsometry};

use super::{verify_grid, Grid, GridIndex, GridKind};

/// Largest spin system [`spin_system`] will build.
pub const SPIN_SYSTEM_MAX: usize = 12;
const SPIN_GRID_MAX_PAIRS: usize = 6;

fn pauli_x() -> ExactMatrix {
    ExactMatrix::from_ints(&[&[0, 1], &[1, 0]])
}

fn pauli_y() -> ExactMatrix {
    ExactMatrix::from_gaussian_ints(&[&[(0, 0), (0, -1)], &[(0, 1), (0, 0)]])
}

fn pauli_z() -> ExactMatrix {
    ExactMatrix::from_ints(&[&[1, 0], &[0, -1]])
}

fn kron_all(factors: &[ExactMatrix]) -> ExactMatrix {
    factors
        .iter()
        .fold(ExactMatrix::identity(1), |acc, f| acc.kron(f))
}

/// Self-adjoint, pairwise anticommuting involutions `s_1, …, s_k` of size
/// `2^⌈k/2⌉`: `s_{2n+1} = Z^{⊗n} ⊗ X ⊗ I…` and `s_{2n+2} = Z^{⊗n} ⊗ Y ⊗ I…`.
pub fn spin_system(k: usize) -> Result<Vec<ExactMatrix>> {
    if !(2..=SPIN_SYSTEM_MAX).contains(&k) {
        return Err(Error::Capacity(format!(
            "spin system size {k} outside 2..={SPIN_SYSTEM_MAX}"
        )));
    }
    let slots = k.div_ceil(2);
    Ok((0..k)
        .map(|idx| {
            let n = idx / 2;
            let mut factors = vec![pauli_z(); n];
            factors.push(if idx % 2 == 0 { pauli_x() } else { pauli_y() });
            factors.extend(std::iter::repeat_n(ExactMatrix::identity(2), slots - n - 1));
            kron_all(&factors)
        })
        .collect())
}

fn candidate(r: usize, odd: bool, tilde_sign: i64, zero_phase: &ExactScalar) -> Result<Grid> {
    let s = spin_system(2 * r)?;
    let half = ExactScalar::half();
    let ihalf = &ExactScalar::i() * &half;
    let sign = ExactScalar::from_int(tilde_sign);
    let mut members = Vec::new();
    for j in 0..r {
        let (a, b) = (&s[2 * j], &s[2 * j + 1]);
        let u = &a.scale(&half) - &b.scale(&ihalf);
        let ut = (&a.scale(&half) + &b.scale(&ihalf)).scale(&sign);
        members.push((GridIndex::Spin(j + 1), u));
        members.push((GridIndex::SpinTilde(j + 1), ut));
    }
    if odd {
        let z = kron_all(&vec![pauli_z(); r]);
        members.push((GridIndex::SpinZero, z.scale(zero_phase)));
    }
    Grid::new(GridKind::Spin { pairs: r, odd }, members)
}

/// A concrete spin grid with `r` pairs `u_j = (s_{2j-1} - i s_{2j})/2`,
/// `ũ_j = -(s_{2j-1} + i s_{2j})/2`, plus `u_0 = i Z^{⊗r}` when `odd`.
///
/// The sign of `ũ` and the phase of `u_0` are searched over a small set and
/// the first candidate that passes [`verify_grid`] is returned.
pub fn spin_grid(r: usize, odd: bool) -> Result<Grid> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("spin grid needs r >= 2, got {r}")));
    }
    if r > SPIN_GRID_MAX_PAIRS {
        return Err(Error::Capacity(format!(
            "spin grid with {r} pairs exceeds {SPIN_GRID_MAX_PAIRS}"
        )));
    }
    let i = ExactScalar::i();
    let phases = [i.clone(), -i, ExactScalar::one(), ExactScalar::from_int(-1)];
    let phase_choices: &[ExactScalar] = if odd { &phases } else { &phases[..1] };
    for tilde_sign in [-1, 1] {
        for phase in phase_choices {
            let g = candidate(r, odd, tilde_sign, phase)?;
            if verify_grid(&g).passed() {
                return Ok(g);
            }
        }
    }
    Err(Error::Construction(format!(
        "no sign choice yields a valid spin grid with r={r}"
    )))
}

/// Output of [`spin_to_spin_system`].
#[derive(Clone, Debug)]
pub struct SpinSystemTransform {
    /// The unit `v = i(u_1 + ũ_1)` of the isotope algebra.
    pub v: PartialIsometry,
    /// `(label, element)` pairs: `s_j` for `j >= 2`, `t_j` for all `j`,
    /// `v`, and `u_0` when present.
    pub system: Vec<(String, ExactMatrix)>,
    pub report: VerificationReport,
}

/// Spin system in the isotope algebra of a spin grid.
pub fn spin_to_spin_system(g: &Grid) -> Result<SpinSystemTransform> {
    let GridKind::Spin { pairs, odd } = g.kind() else {
        return Err(Error::InvalidArgument("spin_to_spin_system needs a spin grid".into()));
    };
    let grid_report = verify_grid(g);
    if !grid_report.passed() {
        let failed: Vec<_> = grid_report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::Transform(format!("grid fails axioms: {}", failed.join(", "))));
    }
    let u = |j| g.get(&GridIndex::Spin(j)).expect("label present");
    let ut = |j| g.get(&GridIndex::SpinTilde(j)).expect("label present");
    let i = ExactScalar::i();
    let v = PartialIsometry::new((u(1) + ut(1)).scale(&i))
        .map_err(|e| Error::Transform(format!("v: {e}")))?;

    let mut generators: Vec<(String, ExactMatrix)> = Vec::new();
    for j in 2..=pairs {
        generators.push((format!("s_{j}"), u(j) + ut(j)));
    }
    for j in 1..=pairs {
        generators.push((format!("t_{j}"), (u(j) - ut(j)).scale(&i)));
    }
    if odd {
        let u0 = g.get(&GridIndex::SpinZero).expect("label present").clone();
        generators.push(("u_0".into(), u0));
    }

    let mut report = VerificationReport::new(format!("spin system of {}", g.kind().name()));
    let vm = v.mat();
    let mut bad_adj = Vec::new();
    for (name, a) in &generators {
        if &isotope_involution(&v, a)? != a {
            bad_adj.push(name.clone());
        }
    }
    if &isotope_involution(&v, vm)? != vm {
        bad_adj.push("v".into());
    }
    report.push(Check::from_bool(
        "self-adjoint under v a* v",
        bad_adj.is_empty(),
        bad_adj.len() as f64,
        bad_adj.join(", "),
    ));

    let mut unit_failures = Vec::new();
    for (name, a) in &generators {
        if &isotope_product(&v, vm, a)? != a || &isotope_product(&v, a, vm)? != a {
            unit_failures.push(name.clone());
        }
    }
    if &isotope_product(&v, vm, vm)? != vm {
        unit_failures.push("v".into());
    }
    report.push(Check::from_bool(
        "v is the unit",
        unit_failures.is_empty(),
        unit_failures.len() as f64,
        unit_failures.join(", "),
    ));

    let two_v = vm.scale(&ExactScalar::from_int(2));
    let zero = ExactMatrix::zeros(vm.rows(), vm.cols());
    let mut anti_failures = Vec::new();
    let mut residual = 0.0f64;
    for (x, (na, a)) in generators.iter().enumerate() {
        for (nb, b) in &generators[x..] {
            let sum = &isotope_product(&v, a, b)? + &isotope_product(&v, b, a)?;
            let want = if na == nb { &two_v } else { &zero };
            if &sum != want {
                residual = residual.max(sum.residual(want));
                anti_failures.push(format!("{na}.{nb}"));
            }
        }
    }
    report.push(Check::from_bool(
        "anticommutation a.b + b.a = 2 delta v",
        anti_failures.is_empty(),
        residual,
        anti_failures.join(", "),
    ));

    let mut all: Vec<ExactMatrix> = generators.iter().map(|(_, m)| m.clone()).collect();
    all.push(vm.clone());
    let rank = crate::numlin::family_rank_exact(&all)?;
    let expected = 2 * pairs + usize::from(odd);
    report.push(Check::from_bool(
        "span dimension",
        rank == expected && all.len() == expected,
        (rank as f64 - expected as f64).abs(),
        format!("rank {rank}, expected {expected}"),
    ));

    if !report.passed() {
        let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::Transform(failed.join("; ")));
    }
    let mut system = generators;
    system.push(("v".into(), vm.clone()));
    Ok(SpinSystemTransform { v, system, report })
}
