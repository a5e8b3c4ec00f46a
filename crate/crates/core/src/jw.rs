//! Jones–Wenzl projectors in a tensor-space representation.
//!
//! `P_{k+1} = P_k - ρ_k P_k S_k P_k`, `P_1 = 1`, with `ρ_{k+1} = 1/(Q - ρ_k)`,
//! `ρ_1 = 1/Q`. The ladder keeps each `P_k` at its native size `n^k`; the
//! identity checks rebuild projectors inside a larger space by running the
//! same recursion on shifted generators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Tolerance};
use crate::report::{Report, ReportSet};
use crate::tensor::{
    apply_block_left, apply_block_right, apply_left, apply_right, space_dim, TlSolution,
};

/// `|Q - ρ_k|` below `POLE_WINDOW * (1 + Q)` makes `ρ_{k+1}` infinite.
pub const POLE_WINDOW: f64 = 1e-12;

/// Chebyshev polynomial of the second kind, `U_0 = 1`, `U_1 = 2t`.
pub fn chebyshev_u(m: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * t);
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `tr(P_N) = r^{N/2} U_N(n / (2√r))` for a rank-`r` solution on `C^n`.
pub fn trace_formula(depth: usize, n: usize, r: usize) -> f64 {
    let r = r as f64;
    r.powf(depth as f64 / 2.0) * chebyshev_u(depth, n as f64 / (2.0 * r.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rho {
    Finite(f64),
    Infinite,
}

impl Rho {
    pub fn finite(self) -> Option<f64> {
        match self {
            Rho::Finite(x) => Some(x),
            Rho::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Rho::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoSequence {
    q: f64,
    values: Vec<Rho>,
    first_infinite: Option<usize>,
    /// Indices whose pole was declared by the window rather than an exact zero.
    window_hits: Vec<usize>,
}

/// `ρ_1..ρ_len`. After a pole the sequence continues from `ρ = 0`, the value
/// of `U_{k-1}/U_k` there.
pub fn rho_sequence(q: f64, len: usize) -> Result<RhoSequence> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Q must be positive, got {q}"
        )));
    }
    let mut values = Vec::with_capacity(len);
    let mut first_infinite = None;
    let mut window_hits = Vec::new();
    // ρ_0 = 0 reproduces ρ_1 = 1/Q
    let mut prev = Rho::Finite(0.0);
    for k in 1..=len {
        let next = match prev {
            Rho::Infinite => Rho::Finite(0.0),
            Rho::Finite(p) => {
                let gap = q - p;
                if gap.abs() <= POLE_WINDOW * (1.0 + q) {
                    if gap != 0.0 {
                        window_hits.push(k);
                    }
                    Rho::Infinite
                } else {
                    Rho::Finite(1.0 / gap)
                }
            }
        };
        if next.is_infinite() && first_infinite.is_none() {
            first_infinite = Some(k);
        }
        values.push(next);
        prev = next;
    }
    Ok(RhoSequence {
        q,
        values,
        first_infinite,
        window_hits,
    })
}

impl RhoSequence {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rho] {
        &self.values
    }

    /// One-based access; `ρ_0` is 0.
    pub fn get(&self, k: usize) -> Option<Rho> {
        if k == 0 {
            Some(Rho::Finite(0.0))
        } else {
            self.values.get(k - 1).copied()
        }
    }

    pub fn first_infinite(&self) -> Option<usize> {
        self.first_infinite
    }

    pub fn window_hits(&self) -> &[usize] {
        &self.window_hits
    }

    /// `ρ_k`, failing when it is infinite or beyond the computed range.
    pub fn finite(&self, k: usize) -> Result<f64> {
        match self.get(k) {
            Some(Rho::Finite(x)) => Ok(x),
            Some(Rho::Infinite) => Err(Error::RhoUndefined {
                index: k,
                q: self.q,
            }),
            None => Err(Error::InvalidParameter(format!("rho_{k} not computed"))),
        }
    }

    /// `1/ρ_k = Q - ρ_{k-1}`; zero at a pole.
    pub fn reciprocal(&self, k: usize) -> Result<f64> {
        match self.get(k) {
            Some(Rho::Infinite) => Ok(0.0),
            Some(Rho::Finite(_)) => Ok(self.q - self.finite(k - 1)?),
            None => Err(Error::InvalidParameter(format!("rho_{k} not computed"))),
        }
    }

    fn require_finite_below(&self, k: usize) -> Result<()> {
        for j in 1..k {
            self.finite(j)?;
        }
        Ok(())
    }
}

/// Which generator plays the role of `S_j` when building a projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// `S_j ↦ S_{j + offset}`: offset 1 gives `P'`, offset 2 gives `P''`.
    Shifted(usize),
    /// `S_j ↦ S_{len - j}`, the flip automorphism.
    Reversed,
}

impl Placement {
    fn site(self, j: usize, len: usize) -> usize {
        match self {
            Placement::Shifted(offset) => j + offset,
            Placement::Reversed => len - j,
        }
    }
}

/// `P_len` with generators placed per `placement`, realized in the
/// `n^sites`-dimensional space.
pub fn projector_on_sites(
    sol: &TlSolution,
    len: usize,
    placement: Placement,
    sites: usize,
    rho: &RhoSequence,
    cap: usize,
) -> Result<ComplexMatrix> {
    if len == 0 {
        return Err(Error::InvalidParameter(
            "projector index starts at 1".into(),
        ));
    }
    let n = sol.n();
    let dim = space_dim(n, sites, cap)?;
    let last_site = match placement {
        Placement::Shifted(offset) => len + offset,
        Placement::Reversed => len,
    };
    if last_site > sites {
        return Err(Error::InvalidParameter(format!(
            "P_{len} with {placement:?} needs {last_site} sites, space has {sites}"
        )));
    }
    rho.require_finite_below(len)?;
    let mut p = ComplexMatrix::identity(dim);
    for j in 1..len {
        let k = placement.site(j, len);
        let sp = apply_left(sol.t(), n, k, sites, &p)?;
        let psp = p.matmul(&sp)?;
        p = p.add_scaled(&psp, Complex64::new(-rho.finite(j)?, 0.0))?;
    }
    p.ensure_finite("projector recursion")
}

/// Projectors `P_1..P_depth` of one solution at their native sizes.
#[derive(Debug, Clone)]
pub struct JwLadder {
    base: TlSolution,
    requested: usize,
    projectors: Vec<ComplexMatrix>,
    rho: RhoSequence,
}

/// Builds `P_1..P_depth`, stopping early (not failing) at the first pole of ρ.
pub fn jw_ladder(sol: &TlSolution, depth: usize, cap: usize) -> Result<JwLadder> {
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "ladder depth must be at least 1".into(),
        ));
    }
    let n = sol.n();
    space_dim(n, depth, cap)?;
    let rho = rho_sequence(sol.q(), depth + 2)?;
    let mut projectors = vec![ComplexMatrix::identity(n)];
    for k in 1..depth {
        let Some(Rho::Finite(rho_k)) = rho.get(k) else {
            break;
        };
        let prev = projectors.last().expect("P_1 present");
        // P̂ = P_k ⊗ I_n on k+1 sites, S_k acts on the last pair
        let lifted = prev.kron(&ComplexMatrix::identity(n));
        let sp = apply_left(sol.t(), n, k, k + 1, &lifted)?;
        let psp = apply_block_left(prev, 1, n, &sp)?;
        let next = lifted.add_scaled(&psp, Complex64::new(-rho_k, 0.0))?;
        projectors.push(next.ensure_finite("projector recursion")?);
    }
    Ok(JwLadder {
        base: sol.clone(),
        requested: depth,
        projectors,
        rho,
    })
}

impl JwLadder {
    pub fn solution(&self) -> &TlSolution {
        &self.base
    }

    pub fn rho(&self) -> &RhoSequence {
        &self.rho
    }

    pub fn requested_depth(&self) -> usize {
        self.requested
    }

    /// Index of the last projector that could be built.
    pub fn depth(&self) -> usize {
        self.projectors.len()
    }

    /// `Some(k)` when the ladder stopped at `P_k` short of the requested depth.
    pub fn stop_index(&self) -> Option<usize> {
        (self.depth() < self.requested).then_some(self.depth())
    }

    /// `P_k` at native size `n^k`.
    pub fn projector(&self, k: usize) -> Option<&ComplexMatrix> {
        k.checked_sub(1).and_then(|i| self.projectors.get(i))
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    fn require(&self, k: usize) -> Result<&ComplexMatrix> {
        self.projector(k).ok_or(Error::RhoUndefined {
            index: self.depth(),
            q: self.base.q(),
        })
    }

    /// `max_j ||S_j P_k|| + ||P_k S_j||` over `j < k`.
    pub fn annihilation_residual(&self, k: usize) -> Result<f64> {
        let p = self.require(k)?;
        let n = self.base.n();
        let mut worst: f64 = 0.0;
        for j in 1..k {
            let left = apply_left(self.base.t(), n, j, k, p)?.frobenius_norm();
            let right = apply_right(p, self.base.t(), n, j, k)?.frobenius_norm();
            worst = worst.max(left + right);
        }
        Ok(worst)
    }

    /// Per-depth traces and residuals.
    pub fn summary(&self, tol: &Tolerance) -> Result<Vec<LadderRow>> {
        let n = self.base.n();
        let r = self.base.rank();
        (1..=self.depth())
            .map(|k| {
                let p = self.require(k)?;
                let dim = n.pow(k as u32) as f64;
                let idem = p.matmul(p)?.frobenius_dist(p)?;
                let herm = p.hermiticity_residual()?;
                let annihilation = self.annihilation_residual(k)?;
                let bound = tol.abs_eps * dim;
                Ok(LadderRow {
                    depth: k,
                    rho: self.rho.get(k).expect("rho covers the ladder"),
                    trace: p.trace()?.re,
                    trace_formula: trace_formula(k, n, r),
                    idempotency: idem,
                    hermiticity: herm,
                    annihilation,
                    frobenius_norm: p.frobenius_norm(),
                    pass: idem <= bound && herm <= bound && annihilation <= bound,
                })
            })
            .collect()
    }

    fn ambient_pair(&self, depth: usize, extra: usize, cap: usize) -> Result<Ambient<'_>> {
        if depth < 2 {
            return Err(Error::InvalidParameter(format!(
                "identity needs N >= 2, got {depth}"
            )));
        }
        let sites = depth + extra;
        space_dim(self.base.n(), sites, cap)?;
        let rho = rho_sequence(self.base.q(), depth + 2)?;
        Ok(Ambient {
            sol: &self.base,
            sites,
            rho,
            cap,
        })
    }

    /// `(P_N - P'_N)³ = (ρ_{N-1}/ρ_N)(P_N - P'_N)` on `N+1` sites.
    pub fn verify_cube_relation(
        &self,
        depth: usize,
        tol: &Tolerance,
        cap: usize,
    ) -> Result<Report> {
        let amb = self.ambient_pair(depth, 1, cap)?;
        amb.rho.require_finite_below(depth)?;
        let p = amb.projector(depth, 0)?;
        let p1 = amb.projector(depth, 1)?;
        let d = p.sub(&p1)?;
        // ρ_{N-1}/ρ_N = ρ_{N-1}(Q - ρ_{N-1}), finite even at a pole of ρ_N
        let ratio = amb.rho.finite(depth - 1)? * amb.rho.reciprocal(depth)?;
        let d3 = d.matmul(&d)?.matmul(&d)?;
        let residual = d3.frobenius_dist(&d.scale_real(ratio))?;
        let dn = d.frobenius_norm();
        let scale = (dn.powi(3) + ratio.abs() * dn).max(1.0);
        Ok(Report::check(
            format!("cube relation N={depth}"),
            residual,
            tol.abs_eps * scale,
        ))
    }

    /// `(P_2 - P'_2)² = (ρ_1/ρ_2)(1 - P_3)` on three sites.
    pub fn verify_square_relation(&self, tol: &Tolerance, cap: usize) -> Result<Report> {
        let amb = self.ambient_pair(2, 1, cap)?;
        amb.rho.require_finite_below(3)?;
        let d = amb.projector(2, 0)?.sub(&amb.projector(2, 1)?)?;
        let p3 = amb.projector(3, 0)?;
        let ratio = amb.rho.finite(1)? * amb.rho.reciprocal(2)?;
        let rhs = ComplexMatrix::identity(p3.rows())
            .sub(&p3)?
            .scale_real(ratio);
        let lhs = d.matmul(&d)?;
        let scale = (lhs.frobenius_norm() + rhs.frobenius_norm()).max(1.0);
        Ok(Report::check(
            "square relation N=2",
            lhs.frobenius_dist(&rhs)?,
            tol.abs_eps * scale,
        ))
    }

    /// The five companion identities used in the proof of the cube relation,
    /// checked on `N+2` sites.
    pub fn verify_lemma1(&self, depth: usize, tol: &Tolerance, cap: usize) -> Result<ReportSet> {
        let amb = self.ambient_pair(depth, 2, cap)?;
        amb.rho.require_finite_below(depth + 1)?;
        let big_n = depth;
        let inv = amb.rho.reciprocal(big_n)?;
        // 1/(ρ_N ρ_{N+1}) = (Q - ρ_{N-1})(Q - ρ_N)
        let inv2 = inv * amb.rho.reciprocal(big_n + 1)?;

        let p_n = amb.projector(big_n, 0)?;
        let p1_n = amb.projector(big_n, 1)?;
        let p1_nm = amb.projector(big_n - 1, 1)?;
        let p2_n = amb.projector(big_n, 2)?;
        let p2_nm = amb.projector(big_n - 1, 2)?;
        let p_nm = amb.projector(big_n - 1, 0)?;

        let s_n = big_n;
        let s_last = big_n + 1;
        let s_first = 1;

        let mut reports = Vec::with_capacity(5);
        // S_N P_N S_N = (1/ρ_N) S_N P_{N-1}
        let lhs = amb.sandwich(s_n, &p_n, s_n)?;
        let rhs = amb.left(s_n, &p_nm)?.scale_real(inv);
        reports.push(amb.compare("S_N P_N S_N = (1/rho_N) S_N P_{N-1}", &lhs, &rhs, tol)?);

        // S_{N+1} P'_N S_{N+1} = (1/ρ_N) S_{N+1} P'_{N-1}
        let lhs = amb.sandwich(s_last, &p1_n, s_last)?;
        let rhs = amb.left(s_last, &p1_nm)?.scale_real(inv);
        reports.push(amb.compare(
            "S_{N+1} P'_N S_{N+1} = (1/rho_N) S_{N+1} P'_{N-1}",
            &lhs,
            &rhs,
            tol,
        )?);

        // S_1 P'_N S_1 = (1/ρ_N) S_1 P''_{N-1}
        let lhs = amb.sandwich(s_first, &p1_n, s_first)?;
        let rhs = amb.left(s_first, &p2_nm)?.scale_real(inv);
        reports.push(amb.compare("S_1 P'_N S_1 = (1/rho_N) S_1 P''_{N-1}", &lhs, &rhs, tol)?);

        // S_1 P'_N S_{N+1} P'_N S_1 = -(1/ρ_Nρ_{N+1}) S_1 P''_N + (1/ρ_N²) S_1 P''_{N-1}
        let mid = amb.sandwich(s_last, &p1_n, s_first)?;
        let lhs = amb.left(s_first, &p1_n.matmul(&mid)?)?;
        let rhs = amb
            .left(s_first, &p2_n)?
            .scale_real(-inv2)
            .add(&amb.left(s_first, &p2_nm)?.scale_real(inv * inv))?;
        reports.push(amb.compare(
            "S_1 P'_N S_{N+1} P'_N S_1 = -1/(rho_N rho_{N+1}) S_1 P''_N + 1/rho_N^2 S_1 P''_{N-1}",
            &lhs,
            &rhs,
            tol,
        )?);

        // S_{N+1} P'_N S_1 P'_N S_{N+1} = -(1/ρ_Nρ_{N+1}) S_{N+1} P_N + (1/ρ_N²) S_{N+1} P'_{N-1}
        let mid = amb.sandwich(s_first, &p1_n, s_last)?;
        let lhs = amb.left(s_last, &p1_n.matmul(&mid)?)?;
        let rhs = amb
            .left(s_last, &p_n)?
            .scale_real(-inv2)
            .add(&amb.left(s_last, &p1_nm)?.scale_real(inv * inv))?;
        reports.push(amb.compare(
            "S_{N+1} P'_N S_1 P'_N S_{N+1} = -1/(rho_N rho_{N+1}) S_{N+1} P_N + 1/rho_N^2 S_{N+1} P'_{N-1}",
            &lhs,
            &rhs,
            tol,
        )?);
        Ok(ReportSet::new(reports))
    }

    /// `P_N` rebuilt with the generator order reversed, `S_j ↦ S_{N-j}`.
    pub fn flipped_projector(&self, depth: usize, cap: usize) -> Result<ComplexMatrix> {
        let rho = rho_sequence(self.base.q(), depth + 1)?;
        projector_on_sites(&self.base, depth, Placement::Reversed, depth, &rho, cap)
    }
}

struct Ambient<'a> {
    sol: &'a TlSolution,
    sites: usize,
    rho: RhoSequence,
    cap: usize,
}

impl Ambient<'_> {
    fn projector(&self, len: usize, offset: usize) -> Result<ComplexMatrix> {
        projector_on_sites(
            self.sol,
            len,
            Placement::Shifted(offset),
            self.sites,
            &self.rho,
            self.cap,
        )
    }

    /// `S_k X`
    fn left(&self, k: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_left(self.sol.t(), self.sol.n(), k, self.sites, x)
    }

    /// `S_a X S_b`
    fn sandwich(&self, a: usize, x: &ComplexMatrix, b: usize) -> Result<ComplexMatrix> {
        let xs = apply_right(x, self.sol.t(), self.sol.n(), b, self.sites)?;
        self.left(a, &xs)
    }

    fn compare(
        &self,
        name: &str,
        lhs: &ComplexMatrix,
        rhs: &ComplexMatrix,
        tol: &Tolerance,
    ) -> Result<Report> {
        let scale = (lhs.frobenius_norm() + rhs.frobenius_norm()).max(1.0);
        Ok(Report::check(
            name,
            lhs.frobenius_dist(rhs)?,
            tol.abs_eps * scale,
        ))
    }
}

/// Reorders tensor factors of an operator on `sites` copies of `C^n` so that
/// site `i` becomes site `sites + 1 - i`.
pub fn reverse_sites(m: &ComplexMatrix, n: usize, sites: usize) -> Result<ComplexMatrix> {
    let dim = n.pow(sites as u32);
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "reverse_sites: {}x{} on {sites} sites of dimension {n}",
            m.rows(),
            m.cols()
        )));
    }
    let perm: Vec<usize> = (0..dim)
        .map(|mut idx| {
            let mut out = 0;
            for _ in 0..sites {
                out = out * n + idx % n;
                idx /= n;
            }
            out
        })
        .collect();
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        m[(perm[i], perm[j])]
    }))
}

/// One line of [`JwLadder::summary`].
#[derive(Debug, Clone, Serialize)]
pub struct LadderRow {
    pub depth: usize,
    pub rho: Rho,
    pub trace: f64,
    pub trace_formula: f64,
    pub idempotency: f64,
    pub hermiticity: f64,
    pub annihilation: f64,
    pub frobenius_norm: f64,
    pub pass: bool,
}

/// `P_N` applied on `N+1` sites after padding with `I_n` on the right; used to
/// compare native and ambient constructions.
pub fn lift_right(p: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(p.rows() * n);
    apply_block_left(p, 1, n, &id)
}

/// `I_n ⊗ P_N`.
pub fn lift_left(p: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(p.rows() * n);
    apply_block_right(&id, p, n, 1)
}
