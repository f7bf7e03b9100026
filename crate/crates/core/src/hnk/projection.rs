use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numlin::svd::hermitian_eigenvalues;
use crate::numlin::{ApproxMatrix, ExactMatrix, ExactScalar};
use crate::report::{Check, CheckStatus, VerificationReport};

use super::space::HnkSpace;

pub const NORM_TOL: f64 = 1e-9;
pub const IDEMPOTENCE_TOL: f64 = 1e-12;

fn check_shape(space: &HnkSpace, shape: (usize, usize)) -> Result<()> {
    if shape != space.shape() {
        return Err(Error::dim(
            "hnk_projection",
            format!("{shape:?} vs ambient {:?}", space.shape()),
        ));
    }
    Ok(())
}

/// `P x = Σ_i tr(x U_i*) / m · U_i` with `m = C(n−1, k−1)`.
pub fn hnk_projection(space: &HnkSpace, x: &ApproxMatrix) -> Result<ApproxMatrix> {
    check_shape(space, x.shape())?;
    let m = space.multiplicity() as f64;
    let (rows, cols) = space.shape();
    let mut out = ApproxMatrix::zeros(rows, cols);
    for u in space.basis() {
        let u = u.to_approx();
        let coeff = x.trace_pairing(&u)? / m;
        out = &out + &u.scale(coeff);
    }
    Ok(out)
}

/// Exact counterpart of [`hnk_projection`].
pub fn hnk_projection_exact(space: &HnkSpace, x: &ExactMatrix) -> Result<ExactMatrix> {
    check_shape(space, x.shape())?;
    let inv_m = ExactScalar::ratio(1, space.multiplicity() as i64);
    let (rows, cols) = space.shape();
    let mut out = ExactMatrix::zeros(rows, cols);
    for u in space.basis() {
        let coeff = &x.trace_pairing(u)? * &inv_m;
        out = &out + &u.scale(&coeff);
    }
    Ok(out)
}

/// Entries with real and imaginary parts uniform in `[-1, 1]`.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ApproxMatrix {
    let entries = (0..rows * cols)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    ApproxMatrix::from_entries(rows, cols, entries).expect("sized to fit")
}

/// Idempotence, exactness on the basis and contractivity over `samples`
/// random inputs.
pub fn projection_report<R: Rng + ?Sized>(space: &HnkSpace, samples: usize, rng: &mut R) -> Result<VerificationReport> {
    let (n, k) = (space.n(), space.k());
    let m = space.multiplicity();
    let mut report = VerificationReport::new(format!("projection onto H_{n}^{k}, m = {m}"));
    let start = std::time::Instant::now();

    let mut bad = Vec::new();
    for (i, u) in space.basis().enumerate() {
        if &hnk_projection_exact(space, u)? != u || hnk_projection(space, &u.to_approx())? != u.to_approx() {
            bad.push(format!("U_{}", i + 1));
        }
    }
    report.push(Check::tally("fixes the basis exactly", bad, n));

    let (rows, cols) = space.shape();
    let mut worst_idem: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut over = 0;
    for _ in 0..samples {
        let x = random_matrix(rows, cols, rng);
        let px = hnk_projection(space, &x)?;
        let ppx = hnk_projection(space, &px)?;
        worst_idem = worst_idem.max((&ppx - &px).max_abs());
        let (nx, npx) = (x.operator_norm()?, px.operator_norm()?);
        let ratio = npx / nx;
        worst_ratio = worst_ratio.max(ratio);
        if npx > nx * (1.0 + NORM_TOL) {
            over += 1;
        }
    }
    report.push(Check::within(
        "idempotent",
        worst_idem,
        IDEMPOTENCE_TOL,
        format!("max |P(Px) - Px| over {samples} samples"),
    ));
    report.push(Check::from_bool(
        "contractive",
        over == 0,
        (worst_ratio - 1.0).max(0.0),
        format!("max |Px|/|x| = {worst_ratio:.12} over {samples} samples"),
    ));

    let root = (m as f64).sqrt();
    let literal_ok = m == 1;
    report.push(Check::new(
        "normalization by m^(1/2)",
        if literal_ok { CheckStatus::Pass } else { CheckStatus::Flagged },
        if literal_ok { 0.0 } else { root - 1.0 },
        format!("dividing by m^(1/2) = {root:.6} gives P U_i = {root:.6} U_i"),
    ));
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct TraceFormula {
    /// Trace norm of `Σ a_i U_i`.
    pub lhs: f64,
    /// `m · |a|`.
    pub rhs: f64,
    /// `m^(1/2) · |a|`.
    pub literal_rhs: f64,
    pub residual: f64,
    /// Nonzero singular values, all equal to `|a|`.
    pub multiplicity: usize,
    pub report: VerificationReport,
}

fn combine(space: &HnkSpace, a: &[Complex64]) -> Result<ApproxMatrix> {
    if a.len() != space.n() {
        return Err(Error::InvalidArgument(format!(
            "expected {} coefficients, got {}",
            space.n(),
            a.len()
        )));
    }
    let (rows, cols) = space.shape();
    let mut x = ApproxMatrix::zeros(rows, cols);
    for (u, &c) in space.basis().zip(a) {
        x = &x + &u.to_approx().scale(c);
    }
    Ok(x)
}

/// Compares the trace norm of `x = Σ a_i U_i` with `m |a|` and with the
/// `m^(1/2) |a|` variant.
pub fn trace_formula_check(space: &HnkSpace, a: &[Complex64]) -> Result<TraceFormula> {
    let x = combine(space, a)?;
    let m = space.multiplicity();
    let norm_a = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let lhs = x.trace_norm()?;
    let rhs = m as f64 * norm_a;
    let literal_rhs = (m as f64).sqrt() * norm_a;
    let residual = (lhs - rhs).abs();
    let tol = NORM_TOL * rhs.max(1.0);

    let mut report = VerificationReport::new(format!("trace formula on H_{}^{}", space.n(), space.k()));
    report.push(Check::within(
        "trace norm = m |a|",
        residual,
        tol,
        format!("lhs {lhs:.12}, m |a| = {rhs:.12}"),
    ));
    let xx = &x * &x.adjoint();
    let eig = hermitian_eigenvalues(&xx)?;
    let top = eig.iter().cloned().fold(0.0, f64::max);
    let oracle: f64 = eig.iter().filter(|&&e| e > 1e-10 * top).map(|e| e.sqrt()).sum();
    report.push(Check::within(
        "eigenvalue oracle agrees",
        (oracle - lhs).abs(),
        tol,
        format!("sum of sqrt eig(xx*) = {oracle:.12}"),
    ));
    let sv = x.singular_values()?;
    let cut = NORM_TOL * norm_a.max(1.0);
    let nonzero: Vec<f64> = sv.into_iter().filter(|&s| s > cut).collect();
    let spread = nonzero.iter().map(|s| (s - norm_a).abs()).fold(0.0, f64::max);
    let expected_mult = if norm_a > cut { m } else { 0 };
    report.push(Check::from_bool(
        "one singular value |a| of multiplicity m",
        nonzero.len() == expected_mult && spread <= tol,
        spread,
        format!("{} nonzero singular values, m = {m}", nonzero.len()),
    ));
    let literal_residual = (lhs - literal_rhs).abs();
    report.push(Check::new(
        "literal m^(1/2) |a|",
        if literal_residual <= tol { CheckStatus::Pass } else { CheckStatus::Flagged },
        literal_residual,
        format!("m^(1/2) |a| = {literal_rhs:.12}"),
    ));
    Ok(TraceFormula {
        lhs,
        rhs,
        literal_rhs,
        residual,
        multiplicity: nonzero.len(),
        report,
    })
}

/// [`trace_formula_check`] plus the exact identity `tr(x x*) = m Σ|a_i|²`.
pub fn trace_formula_exact(space: &HnkSpace, a: &[ExactScalar]) -> Result<TraceFormula> {
    let floats: Vec<Complex64> = a.iter().map(ExactScalar::to_complex64).collect();
    let mut out = trace_formula_check(space, &floats)?;
    let (rows, cols) = space.shape();
    let mut x = ExactMatrix::zeros(rows, cols);
    for (u, c) in space.basis().zip(a) {
        x = &x + &u.scale(c);
    }
    let lhs = x.trace_pairing(&x)?;
    let sum = a.iter().fold(ExactScalar::zero(), |acc, c| &acc + &(c * &c.conj()));
    let rhs = sum.scale_int(space.multiplicity() as i64);
    out.report.push(Check::from_bool(
        "tr(xx*) = m sum |a_i|^2 exactly",
        lhs == rhs,
        (&lhs - &rhs).abs_f64(),
        format!("{} vs {}", lhs.render(), rhs.render()),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hnk::build_hnk;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_goes_to_scaled_basis() {
        let h = build_hnk(4, 2).unwrap();
        let su = &h.units(3)[1];
        let e = h.matrix_unit(&su.row, &su.col).unwrap();
        let px = hnk_projection_exact(&h, &e).unwrap();
        let want = h
            .element(3)
            .scale(&ExactScalar::ratio(su.sign.into(), h.multiplicity() as i64));
        assert_eq!(px, want);
    }

    #[test]
    fn first_basis_vector() {
        let h = build_hnk(3, 2).unwrap();
        let a = [ExactScalar::one(), ExactScalar::zero(), ExactScalar::zero()];
        let t = trace_formula_exact(&h, &a).unwrap();
        assert!((t.lhs - 2.0).abs() < 1e-12);
        assert_eq!(t.multiplicity, 2);
        assert!(t.report.passed(), "{}", t.report);
        assert_eq!(t.report.flagged().count(), 1);
    }

    #[test]
    fn zero_coefficients() {
        let h = build_hnk(3, 2).unwrap();
        let t = trace_formula_check(&h, &[Complex64::new(0.0, 0.0); 3]).unwrap();
        assert_eq!((t.lhs, t.rhs), (0.0, 0.0));
        assert!(t.report.passed());
        assert!(trace_formula_check(&h, &[Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn gaussian_coefficients() {
        let h = build_hnk(5, 3).unwrap();
        let a: Vec<_> = (1..=5).map(|j| ExactScalar::from_gaussian_int(j, 1 - j)).collect();
        let t = trace_formula_exact(&h, &a).unwrap();
        assert!(t.report.passed(), "{}", t.report);
        assert_eq!(t.multiplicity, 6);
    }

    #[test]
    fn small_projection_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = build_hnk(4, 2).unwrap();
        let r = projection_report(&h, 50, &mut rng).unwrap();
        assert!(r.passed(), "{r}");
        assert!(hnk_projection(&h, &ApproxMatrix::zeros(2, 2)).is_err());
    }
}
