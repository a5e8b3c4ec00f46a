//! Subspaces `𝒯 ∼ {V_1, …, V_r}` of `C^n ⊗ C^n`, the induced projection
//! `P_𝒯`, the partitioned matrix `W_𝒯`, and the unitarity criterion
//! (`T = Q P_𝒯` solves (T1)–(T2) iff `Q W_𝒯` is unitary).
//!
//! A matrix `V ∈ M_n` stands for the vector `v = Σ V_ab e_a ⊗ e_b`, so the
//! row index lives on the left tensor factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Tolerance, ZERO};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VSystemWire", into = "VSystemWire")]
pub struct VSystem {
    n: usize,
    mats: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct VSystemWire {
    n: usize,
    r: usize,
    mats: Vec<ComplexMatrix>,
}

impl TryFrom<VSystemWire> for VSystem {
    type Error = Error;

    fn try_from(w: VSystemWire) -> Result<Self> {
        if w.r != w.mats.len() {
            return Err(Error::Parse(format!(
                "r = {} but {} matrices given",
                w.r,
                w.mats.len()
            )));
        }
        let vs = VSystem::new(w.mats)?;
        if vs.n != w.n {
            return Err(Error::Parse(format!(
                "n = {} but matrices are {}x{}",
                w.n, vs.n, vs.n
            )));
        }
        Ok(vs)
    }
}

impl From<VSystem> for VSystemWire {
    fn from(vs: VSystem) -> Self {
        VSystemWire {
            n: vs.n,
            r: vs.mats.len(),
            mats: vs.mats,
        }
    }
}

impl VSystem {
    /// Checks shapes only; orthonormality is a separate, tolerance-dependent check.
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty V-system".into()))?;
        let n = first.rows();
        if n == 0 {
            return Err(Error::InvalidParameter("V-system over M_0".into()));
        }
        if let Some(bad) = mats.iter().find(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "V-system mixes {n}x{n} with {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        if mats.len() > n * n {
            return Err(Error::InvalidParameter(format!(
                "{} matrices cannot be orthonormal in M_{n}",
                mats.len()
            )));
        }
        Ok(Self { n, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    pub fn into_mats(self) -> Vec<ComplexMatrix> {
        self.mats
    }

    /// `G_{sm} = tr(V_s* V_m)`
    pub fn gram(&self) -> ComplexMatrix {
        let r = self.r();
        ComplexMatrix::from_fn(r, r, |s, m| inner(&self.mats[s], &self.mats[m]))
    }

    pub fn vectorize(v: &ComplexMatrix) -> Vec<Complex64> {
        v.data().to_vec()
    }

    /// Modified Gram–Schmidt under the trace pairing. Drops dependent members.
    pub fn orthonormalize(&self, tol: &Tolerance) -> Result<Self> {
        let mut out: Vec<ComplexMatrix> = Vec::with_capacity(self.r());
        for v in &self.mats {
            let mut w = v.clone();
            for u in &out {
                let c = inner(u, &w);
                w = w.add_scaled(u, -c)?;
            }
            let norm = w.frobenius_norm();
            if norm > tol.abs_eps {
                out.push(w.scale_real(1.0 / norm));
            }
        }
        Self::new(out)
    }

    fn require_orthonormal(&self, tol: &Tolerance) -> Result<()> {
        let report = check_orthonormal(self, tol);
        if report.pass {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "V-system is not orthonormal (Gram deviation {:e})",
                report.residual
            )))
        }
    }
}

/// `tr(A* B) = Σ conj(A_ab) B_ab`
fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Largest entrywise deviation of the Gram matrix from the identity; bound `abs_eps * r`.
pub fn check_orthonormal(vs: &VSystem, tol: &Tolerance) -> Report {
    let r = vs.r();
    let gram = vs.gram();
    let mut dev: f64 = 0.0;
    for s in 0..r {
        for m in 0..r {
            let want = if s == m { 1.0 } else { 0.0 };
            dev = dev.max((gram[(s, m)] - want).norm());
        }
    }
    Report::check("orthonormality", dev, tol.abs_eps * r as f64)
}

/// `P_𝒯 = Σ_s v_s v_s*`, an `n² x n²` orthogonal projection of rank `r`.
pub fn projection_from_vs(vs: &VSystem) -> Result<ComplexMatrix> {
    vs.require_orthonormal(&Tolerance::default())?;
    Ok(projection_unchecked(vs))
}

fn projection_unchecked(vs: &VSystem) -> ComplexMatrix {
    let m = vs.n * vs.n;
    let mut p = ComplexMatrix::zeros(m, m);
    for v in &vs.mats {
        let d = v.data();
        for (i, &x) in d.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (j, y) in d.iter().enumerate() {
                p[(i, j)] += x * y.conj();
            }
        }
    }
    p
}

/// `T = Q P_𝒯`
pub fn solution_matrix(vs: &VSystem, q: f64) -> Result<ComplexMatrix> {
    Ok(projection_from_vs(vs)?.scale_real(q))
}

/// `W_𝒯`: block `(s, m)` is `V_m · conj(V_s)` (entrywise conjugate, no transpose).
pub fn w_matrix(vs: &VSystem) -> ComplexMatrix {
    let (n, r) = (vs.n, vs.r());
    let conj: Vec<ComplexMatrix> = vs.mats.iter().map(ComplexMatrix::conj).collect();
    let mut w = ComplexMatrix::zeros(r * n, r * n);
    for s in 0..r {
        for m in 0..r {
            let block = vs.mats[m]
                .matmul(&conj[s])
                .expect("square blocks of equal size");
            for i in 0..n {
                for j in 0..n {
                    w[(s * n + i, m * n + j)] = block[(i, j)];
                }
            }
        }
    }
    w
}

/// `Q W_𝒯` unitary, with bound `abs_eps * r n`.
pub fn unitarity_criterion(vs: &VSystem, q: f64, tol: &Tolerance) -> Result<Report> {
    vs.require_orthonormal(tol)?;
    let qw = w_matrix(vs).scale_real(q);
    let residual = qw.unitarity_residual()?;
    Ok(Report::check(
        format!("unitarity of Q W (Q={q})"),
        residual,
        tol.abs_eps * qw.rows() as f64,
    ))
}

/// The common reciprocal of the singular values of `W_𝒯`, when they agree.
pub fn infer_q(vs: &VSystem, tol: &Tolerance) -> Result<Option<f64>> {
    vs.require_orthonormal(tol)?;
    let w = w_matrix(vs);
    let sv = w.singular_values()?;
    let (max, min) = (sv[0], *sv.last().expect("non-empty"));
    if min <= 0.0 || max - min > tol.abs_eps * w.rows() as f64 {
        return Ok(None);
    }
    let mean = sv.iter().sum::<f64>() / sv.len() as f64;
    Ok(Some(1.0 / mean))
}

/// `V'_k = g V_k g^t` (plain transpose) for unitary `g`.
pub fn gauge_transform(vs: &VSystem, g: &ComplexMatrix, tol: &Tolerance) -> Result<VSystem> {
    if g.rows() != vs.n || g.cols() != vs.n {
        return Err(Error::DimensionMismatch(format!(
            "gauge matrix {}x{} for M_{}",
            g.rows(),
            g.cols(),
            vs.n
        )));
    }
    if !g.is_unitary(tol)? {
        return Err(Error::InvalidParameter(
            "gauge matrix is not unitary".into(),
        ));
    }
    let gt = g.transpose();
    let mats = vs
        .mats
        .iter()
        .map(|v| g.matmul(v)?.matmul(&gt))
        .collect::<Result<Vec<_>>>()?;
    VSystem::new(mats)
}

/// `Q² Σ_s V_s conj(V_l) V_p^t V_s* = δ_lp I` over all `(l, p)`, evaluated
/// blockwise without assembling `W`; same bound as [`unitarity_criterion`].
pub fn quartic_identity_check(vs: &VSystem, q: f64, tol: &Tolerance) -> Result<Report> {
    vs.require_orthonormal(tol)?;
    let (n, r) = (vs.n, vs.r());
    let conj: Vec<ComplexMatrix> = vs.mats.iter().map(ComplexMatrix::conj).collect();
    let trans: Vec<ComplexMatrix> = vs.mats.iter().map(ComplexMatrix::transpose).collect();
    let dag: Vec<ComplexMatrix> = vs.mats.iter().map(ComplexMatrix::dagger).collect();
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|l| (0..r).map(move |p| (l, p))).collect();
    let sq = crate::par::map(&pairs, |&(l, p)| -> Result<f64> {
        let inner = conj[l].matmul(&trans[p])?;
        let mut acc = ComplexMatrix::zeros(n, n);
        for (v, vd) in vs.mats.iter().zip(&dag) {
            acc = acc.add(&v.matmul(&inner)?.matmul(vd)?)?;
        }
        let target = if l == p {
            ComplexMatrix::identity(n)
        } else {
            ComplexMatrix::zeros(n, n)
        };
        Ok(acc.scale_real(q * q).frobenius_dist(&target)?.powi(2))
    });
    let total: f64 = sq
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(Report::check(
        format!("quartic identity (Q={q})"),
        total.sqrt(),
        tol.abs_eps * (r * n) as f64,
    ))
}
