//! Dense complex matrices in row-major storage.
//!
//! Every other module works in terms of [`ComplexMatrix`]. Arithmetic that
//! can fail on shape returns [`Result`]; the handful of operations that are
//! total (Kronecker product, conjugate transpose, scaling) return the matrix
//! directly.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Numerical thresholds shared by every predicate.
///
/// `abs_eps` scales entrywise and Frobenius comparisons, `rank_eps` is relative
/// to the largest singular value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rank_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: 1e-9,
            rank_eps: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rank_eps: f64) -> Self {
        Self { abs_eps, rank_eps }
    }

    pub fn with_abs(abs_eps: f64) -> Self {
        Self {
            abs_eps,
            ..Self::default()
        }
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixWire", into = "MatrixWire")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// JSON interchange form: `{"rows": R, "cols": C, "data": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl TryFrom<MatrixWire> for ComplexMatrix {
    type Error = Error;

    fn try_from(w: MatrixWire) -> Result<Self> {
        if w.rows == 0 || w.cols == 0 {
            return Err(Error::Parse("rows and cols must be positive".into()));
        }
        if w.data.len() != w.rows * w.cols {
            return Err(Error::Parse(format!(
                "data has {} entries, expected {}x{} = {}",
                w.data.len(),
                w.rows,
                w.cols,
                w.rows * w.cols
            )));
        }
        if w.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite entry".into()));
        }
        let data = w
            .data
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Ok(Self {
            rows: w.rows,
            cols: w.cols,
            data,
        })
    }
}

impl From<ComplexMatrix> for MatrixWire {
    fn from(m: ComplexMatrix) -> Self {
        MatrixWire {
            rows: m.rows,
            cols: m.cols,
            data: m.data.into_iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(16) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(16) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    /// The matrix unit `E_{ab}` of size `n`, with one-based `a` and `b`.
    pub fn matrix_unit(n: usize, a: usize, b: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("matrix unit of size 0".into()));
        }
        if !(1..=n).contains(&a) || !(1..=n).contains(&b) {
            return Err(Error::IndexOutOfRange(format!("E_({a},{b}) in M_{n}")));
        }
        let mut m = Self::zeros(n, n);
        m[(a - 1, b - 1)] = ONE;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn ensure_finite(self, op: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(op))
        }
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn require_same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Result<Complex64> {
        let n = self.require_square()?;
        Ok((0..n).map(|i| self.data[i * n + i]).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_dist(&self, other: &Self) -> Result<f64> {
        self.require_same_shape(other, "frobenius_dist")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `self + s * other`
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Result<Self> {
        self.require_same_shape(other, "add_scaled")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = par::matmul(&self.data, self.rows, self.cols, &other.data, other.cols);
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Product of a chain of matrices, left to right.
    pub fn product(factors: &[&Self]) -> Result<Self> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        rest.iter()
            .try_fold((*first).clone(), |acc, m| acc.matmul(m))
    }

    /// Kronecker product; block `(i, j)` of the result is `self[i, j] * other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    let dst = (i * other.rows + k) * cols + j * other.cols;
                    let src = &other.data[k * other.cols..(k + 1) * other.cols];
                    for (d, b) in data[dst..dst + other.cols].iter_mut().zip(src) {
                        *d = a * b;
                    }
                }
            }
        }
        Self { rows, cols, data }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// `||A A* - I||_F`
    pub fn unitarity_residual(&self) -> Result<f64> {
        let n = self.require_square()?;
        self.matmul(&self.dagger())?
            .frobenius_dist(&Self::identity(n))
    }

    pub fn hermiticity_residual(&self) -> Result<f64> {
        self.require_square()?;
        self.frobenius_dist(&self.dagger())
    }

    pub fn is_unitary(&self, tol: &Tolerance) -> Result<bool> {
        Ok(self.unitarity_residual()? <= tol.abs_eps * self.rows as f64)
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> Result<bool> {
        Ok(self.hermiticity_residual()? <= tol.abs_eps * self.rows as f64)
    }

    /// Hermitian with smallest eigenvalue at least `-abs_eps * ||A||_F`.
    pub fn is_psd(&self, tol: &Tolerance) -> Result<bool> {
        if !self.is_hermitian(tol)? {
            return Ok(false);
        }
        let eig = self.hermitian_eigenvalues()?;
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(min >= -tol.abs_eps * self.frobenius_norm())
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let m = self.to_nalgebra();
        let svd = nalgebra::linalg::SVD::try_new(m, false, false, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }

    /// Number of singular values above `rank_eps * sigma_max`.
    pub fn rank(&self, tol: &Tolerance) -> Result<usize> {
        let sv = self.singular_values()?;
        let Some(&largest) = sv.first() else {
            return Ok(0);
        };
        if largest == 0.0 {
            return Ok(0);
        }
        Ok(sv.iter().filter(|&&s| s > tol.rank_eps * largest).count())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_square()?;
        let m = self.to_nalgebra();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = nalgebra::linalg::SymmetricEigen::try_new(h, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("eigensolver did not converge".into()))?;
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// `I_n^{⊗ k}`
pub fn identity_power(n: usize, k: u32) -> ComplexMatrix {
    ComplexMatrix::identity(n.pow(k))
}
