use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

use super::approx::ApproxMatrix;
use super::scalar::ExactScalar;

/// Dense row-major matrix over the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ExactScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = ExactScalar::one();
        }
        m
    }

    /// The matrix unit with a single `1` at `(row, col)` (zero-based).
    pub fn unit(rows: usize, cols: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.set(row, col, ExactScalar::one());
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<ExactScalar>) -> Result<Self> {
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

    /// Integer matrix from nested rows. Panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| ExactScalar::from_int(v)))
            .collect();
        Self {
            rows: r,
            cols: c,
            entries,
        }
    }

    /// Gaussian-integer matrix from `(re, im)` pairs.
    pub fn from_gaussian_ints(rows: &[&[(i64, i64)]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows
            .iter()
            .flat_map(|row| {
                row.iter()
                    .map(|&(re, im)| ExactScalar::from_gaussian_int(re, im))
            })
            .collect();
        Self {
            rows: r,
            cols: c,
            entries,
        }
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

    pub fn entries(&self) -> &[ExactScalar] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> &ExactScalar {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: ExactScalar) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ExactScalar::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_zero()).count()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape("add", other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape("sub", other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
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
                let a = &self.entries[i * self.cols + l];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.entries[l * other.cols..(l + 1) * other.cols];
                for (j, b) in brow.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i * other.cols + j] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Kronecker product: `(a⊗b)[i·b.rows + p, j·b.cols + q] = a[i,j]·b[p,q]`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        let b = other.get(p, q);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + p, j * other.cols + q, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn trace(&self) -> Result<ExactScalar> {
        if !self.is_square() {
            return Err(Error::dim("trace", format!("{}x{}", self.rows, self.cols)));
        }
        let mut t = ExactScalar::zero();
        for i in 0..self.rows {
            t += self.get(i, i);
        }
        Ok(t)
    }

    /// Hilbert–Schmidt pairing `tr(self · other*)`.
    pub fn trace_pairing(&self, other: &Self) -> Result<ExactScalar> {
        self.check_same_shape("trace_pairing", other)?;
        let mut t = ExactScalar::zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            t += &(a * &b.conj());
        }
        Ok(t)
    }

    /// Largest entry modulus, as a float. Zero iff the matrix is exactly zero.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| !e.is_zero())
            .map(ExactScalar::abs_f64)
            .fold(0.0, f64::max)
    }

    /// Float residual between two equal-shaped matrices; `INFINITY` on
    /// shape mismatch.
    pub fn residual(&self, other: &Self) -> f64 {
        match self.sub(other) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn to_approx(&self) -> ApproxMatrix {
        ApproxMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries.iter().map(ExactScalar::to_complex64).collect(),
        )
        .expect("shape preserved")
    }

    /// Horizontal concatenation; all parts must share a row count.
    pub fn block_row(parts: &[Self]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::dim("block_row", "no blocks"))?;
        let rows = first.rows;
        if let Some(bad) = parts.iter().find(|p| p.rows != rows) {
            return Err(Error::dim(
                "block_row",
                format!("row counts {rows} and {}", bad.rows),
            ));
        }
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for p in parts {
            out.paste(p, 0, offset);
            offset += p.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation; all parts must share a column count.
    pub fn block_col(parts: &[Self]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::dim("block_col", "no blocks"))?;
        let cols = first.cols;
        if let Some(bad) = parts.iter().find(|p| p.cols != cols) {
            return Err(Error::dim(
                "block_col",
                format!("column counts {cols} and {}", bad.cols),
            ));
        }
        let rows: usize = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for p in parts {
            out.paste(p, offset, 0);
            offset += p.rows;
        }
        Ok(out)
    }

    pub fn block_diag(parts: &[Self]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::dim("block_diag", "no blocks"));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for p in parts {
            out.paste(p, r, c);
            r += p.rows;
            c += p.cols;
        }
        Ok(out)
    }

    /// `p×q` array of equal-shaped blocks, given row by row.
    pub fn block_grid(blocks: &[Vec<Self>]) -> Result<Self> {
        let p = blocks.len();
        let q = blocks.first().map_or(0, Vec::len);
        if p == 0 || q == 0 {
            return Err(Error::dim("block_grid", "no blocks"));
        }
        if let Some(row) = blocks.iter().find(|row| row.len() != q) {
            return Err(Error::dim(
                "block_grid",
                format!("expected {q} blocks per row, found {}", row.len()),
            ));
        }
        let (br, bc) = blocks[0][0].shape();
        if blocks.iter().flatten().any(|b| b.shape() != (br, bc)) {
            return Err(Error::dim("block_grid", "blocks differ in shape"));
        }
        let mut out = Self::zeros(p * br, q * bc);
        for (i, row) in blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                out.paste(b, i * br, j * bc);
            }
        }
        Ok(out)
    }

    /// Copy of the `rows×cols` window starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    fn paste(&mut self, block: &Self, r0: usize, c0: usize) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    fn check_same_shape(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::dim(
                op,
                format!(
                    "{}x{} vs {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        Ok(())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).render()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

// Operator forms panic on shape mismatch; the checked methods above return
// errors instead.
impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        ExactMatrix::add(self, rhs).expect("shape mismatch in +")
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        ExactMatrix::sub(self, rhs).expect("shape mismatch in -")
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        ExactMatrix::mul(self, rhs).expect("shape mismatch in *")
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        self.scale(&ExactScalar::from_int(-1))
    }
}

/// Exact span computations over flattened matrices.
///
/// Holds the reduced row-echelon form of the basis (as columns) so repeated
/// membership queries against the same family stay cheap.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    shape: (usize, usize),
    len: usize,
    // augmented elimination: each pivot row expresses a coordinate
    pivots: Vec<(usize, usize)>,
    reduced: Vec<Vec<ExactScalar>>,
    transform: Vec<Vec<ExactScalar>>,
    rank: usize,
}

impl SpanSolver {
    pub fn new(basis: &[ExactMatrix]) -> Result<Self> {
        let shape = basis
            .first()
            .map(ExactMatrix::shape)
            .ok_or_else(|| Error::dim("span", "empty family"))?;
        if basis.iter().any(|b| b.shape() != shape) {
            return Err(Error::dim("span", "family members differ in shape"));
        }
        let dim = shape.0 * shape.1;
        let len = basis.len();
        // Rows are the basis vectors; elimination tracks the combination
        // that produced each row so coordinates can be recovered.
        let mut rows: Vec<Vec<ExactScalar>> =
            basis.iter().map(|b| b.entries().to_vec()).collect();
        let mut transform: Vec<Vec<ExactScalar>> = (0..len)
            .map(|i| {
                let mut t = vec![ExactScalar::zero(); len];
                t[i] = ExactScalar::one();
                t
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..dim {
            let Some(p) = (rank..len).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            transform.swap(rank, p);
            let inv = rows[rank][col].inv().expect("nonzero pivot");
            scale_row(&mut rows[rank], &inv);
            scale_row(&mut transform[rank], &inv);
            for r in 0..len {
                if r == rank || rows[r][col].is_zero() {
                    continue;
                }
                let f = rows[r][col].clone();
                let (pr, pt) = (rows[rank].clone(), transform[rank].clone());
                axpy_row(&mut rows[r], &f, &pr);
                axpy_row(&mut transform[r], &f, &pt);
            }
            pivots.push((rank, col));
            rank += 1;
            if rank == len {
                break;
            }
        }
        Ok(Self {
            shape,
            len,
            pivots,
            reduced: rows,
            transform,
            rank,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_independent(&self) -> bool {
        self.rank == self.len
    }

    /// Coordinates of `x` against the original family, or `None` if `x` is
    /// outside the span. When the family is dependent, one valid choice.
    pub fn coordinates(&self, x: &ExactMatrix) -> Option<Vec<ExactScalar>> {
        if x.shape() != self.shape {
            return None;
        }
        let target = x.entries();
        // x = Σ λ_r reduced_r with λ_r read off the pivot columns
        let mut coords = vec![ExactScalar::zero(); self.len];
        let mut recon = vec![ExactScalar::zero(); target.len()];
        for &(r, col) in &self.pivots {
            let lam = &target[col];
            if lam.is_zero() {
                continue;
            }
            for (acc, v) in recon.iter_mut().zip(&self.reduced[r]) {
                if !v.is_zero() {
                    *acc += &(lam * v);
                }
            }
            for (c, t) in coords.iter_mut().zip(&self.transform[r]) {
                if !t.is_zero() {
                    *c += &(lam * t);
                }
            }
        }
        if recon.as_slice() == target {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &ExactMatrix) -> bool {
        self.coordinates(x).is_some()
    }
}

fn scale_row(row: &mut [ExactScalar], c: &ExactScalar) {
    for v in row.iter_mut() {
        if !v.is_zero() {
            *v = &*v * c;
        }
    }
}

// row -= f * pivot
fn axpy_row(row: &mut [ExactScalar], f: &ExactScalar, pivot: &[ExactScalar]) {
    for (v, p) in row.iter_mut().zip(pivot) {
        if !p.is_zero() {
            *v -= &(f * p);
        }
    }
}

/// Exact rank of a family of equal-shaped matrices.
pub fn family_rank_exact(family: &[ExactMatrix]) -> Result<usize> {
    Ok(SpanSolver::new(family)?.rank())
}
