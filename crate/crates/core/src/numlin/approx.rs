use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::svd;

/// Dense row-major complex matrix in double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ApproxMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dim(
                "from_entries",
                format!("{} entries for a {rows}x{cols} matrix", entries.len()),
            ));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::from_entries(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with("add", other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with("sub", other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dim(
                "mul",
                format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.entries[i * self.cols + l];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.entries[l * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Result<Complex64> {
        if self.rows != self.cols {
            return Err(Error::dim("trace", format!("{}x{}", self.rows, self.cols)));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// `tr(self · other*)`.
    pub fn trace_pairing(&self, other: &Self) -> Result<Complex64> {
        if self.shape() != other.shape() {
            return Err(Error::dim("trace_pairing", "shape mismatch"));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        svd::singular_values(self)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.iter().sum())
    }

    pub(crate) fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    fn zip_with(
        &self,
        op: &'static str,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dim(
                op,
                format!(
                    "{}x{} vs {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

impl Add for &ApproxMatrix {
    type Output = ApproxMatrix;
    fn add(self, rhs: &ApproxMatrix) -> ApproxMatrix {
        ApproxMatrix::add(self, rhs).expect("shape mismatch in +")
    }
}

impl Sub for &ApproxMatrix {
    type Output = ApproxMatrix;
    fn sub(self, rhs: &ApproxMatrix) -> ApproxMatrix {
        ApproxMatrix::sub(self, rhs).expect("shape mismatch in -")
    }
}

impl Mul for &ApproxMatrix {
    type Output = ApproxMatrix;
    fn mul(self, rhs: &ApproxMatrix) -> ApproxMatrix {
        ApproxMatrix::mul(self, rhs).expect("shape mismatch in *")
    }
}

/// Free-function form of [`ApproxMatrix::operator_norm`].
pub fn operator_norm(a: &ApproxMatrix) -> Result<f64> {
    a.operator_norm()
}

/// Free-function form of [`ApproxMatrix::trace_norm`].
pub fn trace_norm(a: &ApproxMatrix) -> Result<f64> {
    a.trace_norm()
}
