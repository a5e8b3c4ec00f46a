//! Tensor-space representations `τ(S_k) = I^{⊗(k-1)} ⊗ T ⊗ I^{⊗(N-k-1)}`,
//! the defining relations (T1)–(T2), and the associated R-matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Tolerance, ONE, ZERO};
use crate::par;
use crate::report::{Report, ReportSet};

/// Largest representation dimension `n^N` built by default.
pub const DEFAULT_CAP: usize = 4096;

/// Returns `n` when `t` is `n² x n²`.
pub fn site_dim(t: &ComplexMatrix) -> Result<usize> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let size = t.rows();
    let n = (size as f64).sqrt().round() as usize;
    if n * n != size {
        return Err(Error::NotPerfectSquare(size));
    }
    Ok(n)
}

fn check_two_site(t: &ComplexMatrix, n: usize) -> Result<()> {
    if t.rows() != n * n || t.cols() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {0}x{0} two-site operator for n = {n}, got {1}x{2}",
            n * n,
            t.rows(),
            t.cols()
        )));
    }
    Ok(())
}

/// `n^sites`, failing when it exceeds `cap`.
pub fn space_dim(n: usize, sites: usize, cap: usize) -> Result<usize> {
    let dim = u32::try_from(sites)
        .ok()
        .and_then(|s| n.checked_pow(s))
        .ok_or(Error::CapExceeded {
            dim: usize::MAX,
            cap,
        })?;
    if dim > cap {
        return Err(Error::CapExceeded { dim, cap });
    }
    Ok(dim)
}

fn check_position(k: usize, sites: usize) -> Result<()> {
    if sites < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 sites, got {sites}"
        )));
    }
    if k == 0 || k >= sites {
        return Err(Error::IndexOutOfRange(format!(
            "generator S_{k} on {sites} sites (valid: 1..={})",
            sites - 1
        )));
    }
    Ok(())
}

/// `I_n^{⊗(k-1)} ⊗ T ⊗ I_n^{⊗(sites-k-1)}` as a dense matrix.
pub fn embed(
    t: &ComplexMatrix,
    n: usize,
    k: usize,
    sites: usize,
    cap: usize,
) -> Result<ComplexMatrix> {
    check_two_site(t, n)?;
    check_position(k, sites)?;
    space_dim(n, sites, cap)?;
    let pre = ComplexMatrix::identity(n.pow((k - 1) as u32));
    let post = ComplexMatrix::identity(n.pow((sites - k - 1) as u32));
    Ok(pre.kron(t).kron(&post))
}

/// `embed(op, n, k, sites) * x` without forming the embedding.
///
/// `x` must have `n^sites` rows; its column count is arbitrary.
pub fn apply_left(
    op: &ComplexMatrix,
    n: usize,
    k: usize,
    sites: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_two_site(op, n)?;
    check_position(k, sites)?;
    apply_block_left(op, n.pow((k - 1) as u32), n.pow((sites - k - 1) as u32), x)
}

/// `x * embed(op, n, k, sites)` without forming the embedding.
pub fn apply_right(
    x: &ComplexMatrix,
    op: &ComplexMatrix,
    n: usize,
    k: usize,
    sites: usize,
) -> Result<ComplexMatrix> {
    check_two_site(op, n)?;
    check_position(k, sites)?;
    apply_block_right(x, op, n.pow((k - 1) as u32), n.pow((sites - k - 1) as u32))
}

/// `(I_pre ⊗ op ⊗ I_post) * x` for a square `op`.
pub fn apply_block_left(
    op: &ComplexMatrix,
    pre: usize,
    post: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let m = op.rows();
    let dim = pre * m * post;
    if !op.is_square() || x.rows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "apply_block_left: I_{pre} ⊗ {}x{} ⊗ I_{post} against {} rows",
            op.rows(),
            op.cols(),
            x.rows()
        )));
    }
    let cols = x.cols();
    let nz = nonzeros(op);
    let xd = x.data();
    let mut out = ComplexMatrix::zeros(dim, cols);
    if cols == 0 {
        return Ok(out);
    }
    // one chunk per value of the leading multi-index
    par::for_each_chunk(out.data_mut(), m * post * cols, |p, chunk| {
        for &(a, b, v) in &nz {
            for q in 0..post {
                let src = ((p * m + b) * post + q) * cols;
                let dst = (a * post + q) * cols;
                for (o, y) in chunk[dst..dst + cols].iter_mut().zip(&xd[src..src + cols]) {
                    *o += v * y;
                }
            }
        }
    });
    Ok(out)
}

/// `x * (I_pre ⊗ op ⊗ I_post)` for a square `op`.
pub fn apply_block_right(
    x: &ComplexMatrix,
    op: &ComplexMatrix,
    pre: usize,
    post: usize,
) -> Result<ComplexMatrix> {
    let m = op.rows();
    let dim = pre * m * post;
    if !op.is_square() || x.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "apply_block_right: {} cols against I_{pre} ⊗ {}x{} ⊗ I_{post}",
            x.cols(),
            op.rows(),
            op.cols()
        )));
    }
    let opd = op.data();
    let xd = x.data();
    let mut out = ComplexMatrix::zeros(x.rows(), dim);
    if dim == 0 {
        return Ok(out);
    }
    par::for_each_chunk(out.data_mut(), dim, |i, row| {
        let xrow = &xd[i * dim..(i + 1) * dim];
        for p in 0..pre {
            for q in 0..post {
                for a in 0..m {
                    let xv = xrow[(p * m + a) * post + q];
                    if xv == ZERO {
                        continue;
                    }
                    let op_row = &opd[a * m..(a + 1) * m];
                    for (b, v) in op_row.iter().enumerate() {
                        if *v != ZERO {
                            row[(p * m + b) * post + q] += xv * v;
                        }
                    }
                }
            }
        }
    });
    Ok(out)
}

fn nonzeros(m: &ComplexMatrix) -> Vec<(usize, usize, Complex64)> {
    let cols = m.cols();
    m.data()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != ZERO)
        .map(|(idx, &v)| (idx / cols, idx % cols, v))
        .collect()
}

/// Hermiticity and `T² = QT` residuals; bound `abs_eps * n²`.
pub fn verify_t1(t: &ComplexMatrix, q: f64, tol: &Tolerance) -> Result<ReportSet> {
    let n = site_dim(t)?;
    let bound = tol.abs_eps * (n * n) as f64;
    let herm = t.hermiticity_residual()?;
    let idem = t.matmul(t)?.frobenius_dist(&t.scale_real(q))?;
    Ok(ReportSet::new(vec![
        Report::check("T1: T* = T", herm, bound),
        Report::check("T1: T^2 = QT", idem, bound),
    ]))
}

/// Residuals of `T12 T23 T12 = T12` and `T23 T12 T23 = T23` in `M_{n³}`;
/// bound `abs_eps * n³`.
pub fn verify_t2(t: &ComplexMatrix, n: usize, tol: &Tolerance) -> Result<ReportSet> {
    check_two_site(t, n)?;
    let bound = tol.abs_eps * n.pow(3) as f64;
    let t12 = t.kron(&ComplexMatrix::identity(n));
    let t23 = ComplexMatrix::identity(n).kron(t);
    let lhs1 = apply_left(t, n, 1, 3, &apply_left(t, n, 2, 3, &t12)?)?;
    let lhs2 = apply_left(t, n, 2, 3, &apply_left(t, n, 1, 3, &t23)?)?;
    Ok(ReportSet::new(vec![
        Report::check("T2: T12 T23 T12 = T12", lhs1.frobenius_dist(&t12)?, bound),
        Report::check("T2: T23 T12 T23 = T23", lhs2.frobenius_dist(&t23)?, bound),
    ]))
}

/// A matrix `T ∈ M_{n²}` verified to satisfy (T1)–(T2).
///
/// Only [`verify_all`] constructs one, so holding a `TlSolution` means the
/// relations held at the tolerance it was built with.
#[derive(Debug, Clone, Serialize)]
pub struct TlSolution {
    t: ComplexMatrix,
    n: usize,
    q: f64,
    r: usize,
    label: String,
}

impl TlSolution {
    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.t
    }

    pub fn gamma(&self) -> Complex64 {
        gamma_from_q(self.q).expect("verified solutions have Q > 0")
    }
}

/// Runs (T1), (T2) and the rank computation; returns the solution only if
/// every relation passes.
pub fn verify_all(t: &ComplexMatrix, n: usize, q: f64, tol: &Tolerance) -> Result<TlSolution> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Q must be positive, got {q}"
        )));
    }
    check_two_site(t, n)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("verify_all input"));
    }
    verify_t1(t, q, tol)?.into_result()?;
    verify_t2(t, n, tol)?.into_result()?;
    let r = t.rank(tol)?;
    Ok(TlSolution {
        t: t.clone(),
        n,
        q,
        r,
        label: String::new(),
    })
}

/// All reports from (T1) and (T2) without failing early.
pub fn verification_reports(
    t: &ComplexMatrix,
    n: usize,
    q: f64,
    tol: &Tolerance,
) -> Result<ReportSet> {
    let mut all = verify_t1(t, q, tol)?;
    all.reports.extend(verify_t2(t, n, tol)?.reports);
    Ok(all)
}

/// Principal `γ` with `e^γ + e^{-γ} = Q`: real for `Q ≥ 2`, `i·arccos(Q/2)` below.
pub fn gamma_from_q(q: f64) -> Result<Complex64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Q must be positive, got {q}"
        )));
    }
    let half = q / 2.0;
    Ok(if half >= 1.0 {
        Complex64::new(half.acosh(), 0.0)
    } else {
        Complex64::new(0.0, half.acos())
    })
}

/// Spectral data attached to an R-matrix evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub gamma: Complex64,
    pub lambda: f64,
    pub mu: f64,
}

impl SpectralParams {
    pub fn new(q: f64, lambda: f64, mu: f64) -> Result<Self> {
        Ok(Self {
            gamma: gamma_from_q(q)?,
            lambda,
            mu,
        })
    }

    /// `|e^γ + e^{-γ} - Q|`
    pub fn q_residual(&self, q: f64) -> f64 {
        (self.gamma.exp() + (-self.gamma).exp() - q).norm()
    }
}

fn shifted_identity(t: &ComplexMatrix, a: Complex64, b: Complex64) -> ComplexMatrix {
    // a·I - b·T
    let mut out = t.scale(-b);
    for i in 0..t.rows() {
        out[(i, i)] += a;
    }
    out
}

/// `R(λ) = sinh(λ+γ) I - sinh(λ) T`
pub fn r_matrix(sol: &TlSolution, lambda: f64) -> ComplexMatrix {
    let gamma = sol.gamma();
    let l = Complex64::new(lambda, 0.0);
    shifted_identity(&sol.t, (l + gamma).sinh(), l.sinh())
}

/// `R = e^γ I - T`
pub fn constant_r_matrix(sol: &TlSolution) -> ComplexMatrix {
    shifted_identity(&sol.t, sol.gamma().exp(), ONE)
}

/// `A_{k} B_{k'} C_{k}` on three sites, with `k` and `k'` the two generator slots.
fn triple(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    n: usize,
    first: usize,
) -> Result<(ComplexMatrix, f64)> {
    let second = 3 - first;
    let c_emb = if first == 1 {
        c.kron(&ComplexMatrix::identity(n))
    } else {
        ComplexMatrix::identity(n).kron(c)
    };
    let bc = apply_left(b, n, second, 3, &c_emb)?;
    let abc = apply_left(a, n, first, 3, &bc)?;
    // ||X ⊗ I||_F = sqrt(n) ||X||_F
    let sn = (n as f64).sqrt();
    let scale = a.frobenius_norm() * b.frobenius_norm() * c.frobenius_norm() * sn.powi(3);
    Ok((abc, scale))
}

/// `R12(λ) R23(λ+μ) R12(μ) = R23(μ) R12(λ+μ) R23(λ)`; the bound is
/// `abs_eps` times the product of the three factor norms.
pub fn verify_yang_baxter(
    sol: &TlSolution,
    lambda: f64,
    mu: f64,
    tol: &Tolerance,
) -> Result<Report> {
    let n = sol.n;
    let (lhs, scale) = triple(
        &r_matrix(sol, lambda),
        &r_matrix(sol, lambda + mu),
        &r_matrix(sol, mu),
        n,
        1,
    )?;
    let (rhs, _) = triple(
        &r_matrix(sol, mu),
        &r_matrix(sol, lambda + mu),
        &r_matrix(sol, lambda),
        n,
        2,
    )?;
    Ok(Report::check(
        format!("YB(lambda={lambda}, mu={mu})"),
        lhs.frobenius_dist(&rhs)?,
        tol.abs_eps * scale,
    ))
}

/// Braid relation `R12 R23 R12 = R23 R12 R23` for the constant R-matrix.
pub fn verify_braid(sol: &TlSolution, tol: &Tolerance) -> Result<Report> {
    let r = constant_r_matrix(sol);
    let (lhs, scale) = triple(&r, &r, &r, sol.n, 1)?;
    let (rhs, _) = triple(&r, &r, &r, sol.n, 2)?;
    Ok(Report::check(
        "braid",
        lhs.frobenius_dist(&rhs)?,
        tol.abs_eps * scale,
    ))
}

/// Yang–Baxter checks over every `(λ, μ)` pair of the grid.
pub fn yang_baxter_grid(
    sol: &TlSolution,
    lambdas: &[f64],
    mus: &[f64],
    tol: &Tolerance,
) -> Result<ReportSet> {
    let pairs: Vec<(f64, f64)> = lambdas
        .iter()
        .flat_map(|&l| mus.iter().map(move |&m| (l, m)))
        .collect();
    par::map(&pairs, |&(l, m)| verify_yang_baxter(sol, l, m, tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .map(ReportSet::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, SQRT_2};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    // Rank-one solution at n = 2, |z| = 1: V = (E12 + E21)/√2, Q = 2.
    fn rank_one_2() -> ComplexMatrix {
        let h = 1.0 / SQRT_2;
        let v = [0.0, h, h, 0.0];
        ComplexMatrix::from_fn(4, 4, |i, j| Complex64::new(2.0 * v[i] * v[j], 0.0))
    }

    fn sqrt2_solution() -> ComplexMatrix {
        let h = 1.0 / SQRT_2;
        let v1 = [Complex64::new(h, 0.0), ZERO, ZERO, Complex64::new(h, 0.0)];
        let v2 = [ZERO, Complex64::new(0.0, h), Complex64::new(h, 0.0), ZERO];
        ComplexMatrix::from_fn(4, 4, |i, j| {
            (v1[i] * v1[j].conj() + v2[i] * v2[j].conj()) * SQRT_2
        })
    }

    #[test]
    fn embed_examples() {
        let t = rank_one_2();
        assert_eq!(embed(&t, 2, 1, 2, DEFAULT_CAP).unwrap(), t);
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(embed(&t, 2, 1, 3, DEFAULT_CAP).unwrap(), t.kron(&i2));
        assert_eq!(embed(&t, 2, 2, 3, DEFAULT_CAP).unwrap(), i2.kron(&t));
    }

    #[test]
    fn embed_errors() {
        let t = rank_one_2();
        assert!(matches!(
            embed(&t, 3, 1, 3, DEFAULT_CAP),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            embed(&t, 2, 3, 3, DEFAULT_CAP),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            embed(&t, 2, 0, 3, DEFAULT_CAP),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            embed(&t, 2, 1, 13, DEFAULT_CAP),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn structured_products_match_dense() {
        let t = sqrt2_solution();
        let x = ComplexMatrix::from_fn(16, 16, |i, j| {
            Complex64::new((i * 3 + j) as f64 % 5.0, (i + 2 * j) as f64 % 3.0)
        });
        for k in 1..4 {
            let e = embed(&t, 2, k, 4, DEFAULT_CAP).unwrap();
            let left = apply_left(&t, 2, k, 4, &x).unwrap();
            let right = apply_right(&x, &t, 2, k, 4).unwrap();
            assert!(left.frobenius_dist(&e.matmul(&x).unwrap()).unwrap() < 1e-12);
            assert!(right.frobenius_dist(&x.matmul(&e).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn t1_examples() {
        let i4 = ComplexMatrix::identity(4);
        assert!(verify_t1(&i4, 1.0, &tol()).unwrap().pass());
        let bad = verify_t1(&i4, 2.0, &tol()).unwrap();
        assert!(!bad.pass());
        // T² - 2T = -I has Frobenius norm 2
        assert!((bad.reports[1].residual - 2.0).abs() < 1e-12);
        assert!(verify_t1(&sqrt2_solution(), SQRT_2, &tol()).unwrap().pass());
        assert!(matches!(
            verify_t1(&ComplexMatrix::identity(3), 1.0, &tol()),
            Err(Error::NotPerfectSquare(3))
        ));
    }

    #[test]
    fn t2_examples() {
        assert!(verify_t2(&ComplexMatrix::identity(4), 2, &tol())
            .unwrap()
            .pass());
        assert!(verify_t2(&rank_one_2(), 2, &tol()).unwrap().pass());
        assert!(
            !verify_t2(&ComplexMatrix::identity(4).scale_real(2.0), 2, &tol())
                .unwrap()
                .pass()
        );
        assert!(verify_t2(&rank_one_2(), 3, &tol()).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_from_q(2.0).unwrap(), ZERO);
        let g = gamma_from_q(2.0 * 1f64.cosh()).unwrap();
        assert!((g - ONE).norm() < 1e-12);
        let g = gamma_from_q(SQRT_2).unwrap();
        assert!((g - Complex64::new(0.0, FRAC_PI_4)).norm() < 1e-12);
        assert!(gamma_from_q(0.0).is_err());
        assert!(gamma_from_q(-1.0).is_err());
        for q in [0.3, 1.0, 1.9, 2.0, 2.5, 7.0] {
            assert!(SpectralParams::new(q, 0.1, 0.2).unwrap().q_residual(q) < 1e-12);
        }
    }

    #[test]
    fn verify_all_examples() {
        let sol = verify_all(&ComplexMatrix::identity(9), 3, 1.0, &tol()).unwrap();
        assert_eq!((sol.n(), sol.rank(), sol.q()), (3, 9, 1.0));
        let sol = verify_all(&sqrt2_solution(), 2, SQRT_2, &tol()).unwrap();
        assert_eq!(sol.rank(), 2);
        match verify_all(&ComplexMatrix::identity(4).scale_real(2.0), 2, 2.0, &tol()) {
            Err(Error::VerificationFailed { relation, .. }) => assert!(relation.starts_with("T2")),
            other => panic!("expected a T2 failure, got {other:?}"),
        }
    }

    #[test]
    fn r_matrix_examples() {
        let sol = verify_all(&rank_one_2(), 2, 2.0, &tol()).unwrap();
        let r0 = r_matrix(&sol, 0.0);
        let want = ComplexMatrix::identity(4).scale(sol.gamma().sinh());
        assert!(r0.frobenius_dist(&want).unwrap() < 1e-14);

        let triv = verify_all(&ComplexMatrix::identity(4), 2, 1.0, &tol()).unwrap();
        let expected = Complex64::new(0.0, FRAC_PI_3).exp() - ONE;
        let r = constant_r_matrix(&triv);
        assert!(
            r.frobenius_dist(&ComplexMatrix::identity(4).scale(expected))
                .unwrap()
                < 1e-12
        );

        // Q = 2, γ = 0: R = I - T has eigenvalues ±1
        let r = constant_r_matrix(&sol);
        assert!(r.unitarity_residual().unwrap() < 1e-12);
    }

    #[test]
    fn yang_baxter_examples() {
        let triv = verify_all(&ComplexMatrix::identity(4), 2, 1.0, &tol()).unwrap();
        assert!(verify_yang_baxter(&triv, 0.4, -1.3, &tol()).unwrap().pass);
        let s2 = verify_all(&sqrt2_solution(), 2, SQRT_2, &tol()).unwrap();
        assert!(verify_braid(&s2, &tol()).unwrap().pass);
        let grid = yang_baxter_grid(&s2, &[0.3, 0.7], &[1.1], &tol()).unwrap();
        assert_eq!(grid.reports.len(), 2);
        assert!(grid.pass());
    }
}
