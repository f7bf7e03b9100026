//! Singular values by one-sided (Hestenes) cyclic Jacobi, plus two
//! independent oracles used by the tests: a real-embedded Hermitian Jacobi
//! eigen-solver and Rayleigh-quotient power iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::approx::ApproxMatrix;

const TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 80;

/// Singular values of `a`, decreasing.
pub fn singular_values(a: &ApproxMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::Numeric("singular_values"));
    }
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    // orthogonalize the shorter side's columns
    let work = if rows >= cols { a.clone() } else { a.adjoint() };
    let mut columns: Vec<Vec<Complex64>> = (0..work.cols()).map(|j| work.column(j)).collect();
    orthogonalize(&mut columns)?;
    let mut sv: Vec<f64> = columns.iter().map(|c| norm_sqr(c).sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

fn orthogonalize(columns: &mut [Vec<Complex64>]) -> Result<()> {
    let n = columns.len();
    let total: f64 = columns.iter().map(|c| norm_sqr(c)).sum();
    let negligible = (f64::EPSILON * f64::EPSILON) * total;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sqr(&columns[p]);
                let beta = norm_sqr(&columns[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: Complex64 = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g <= TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = *y * phase.conj();
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::Numeric("singular_values: Jacobi sweeps did not converge"))
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues of a Hermitian matrix, decreasing.
///
/// `H = A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`, whose
/// spectrum is that of `H` with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &ApproxMatrix) -> Result<Vec<f64>> {
    if !h.is_finite() {
        return Err(Error::Numeric("hermitian_eigenvalues"));
    }
    let n = h.rows();
    if n != h.cols() {
        return Err(Error::dim("hermitian_eigenvalues", "matrix is not square"));
    }
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            s[i * m + j] = z.re;
            s[(i + n) * m + j + n] = z.re;
            s[i * m + j + n] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    let mut ev = symmetric_jacobi(&mut s, m)?;
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev.into_iter().step_by(2).collect())
}

fn symmetric_jacobi(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= TOL * scale.max(f64::MIN_POSITIVE) {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::Numeric("hermitian_eigenvalues: Jacobi sweeps did not converge"))
}

/// Largest singular value by power iteration on `a* a` with a Rayleigh
/// quotient estimate. Slow but independent of the Jacobi code paths.
pub fn power_iteration_norm(a: &ApproxMatrix, max_iters: usize) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::Numeric("power_iteration_norm"));
    }
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return Ok(0.0);
    }
    let g = &a.adjoint() * a;
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * (i % 3) as f64))
        .collect();
    let mut last = 0.0;
    for _ in 0..max_iters {
        let nx = norm_sqr(&x).sqrt();
        if nx == 0.0 {
            return Ok(0.0);
        }
        x.iter_mut().for_each(|z| *z /= nx);
        let y: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| g.get(i, j) * x[j]).sum())
            .collect();
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        x = y;
        if (rq - last).abs() <= 1e-16 * rq.abs().max(1.0) {
            return Ok(rq.max(0.0).sqrt());
        }
        last = rq;
    }
    Ok(last.max(0.0).sqrt())
}
