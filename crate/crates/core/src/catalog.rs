//! Explicit solution families, each presented as a V-system plus its `Q`.
//!
//! Every constructor re-checks orthonormality and the unitarity criterion
//! before returning, so a [`FamilyInstance`] always describes a solution.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Tolerance, ZERO};
use crate::report::Report;
use crate::subspace::{check_orthonormal, solution_matrix, unitarity_criterion, VSystem};
use crate::tensor::{verify_all, TlSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Trivial,
    RankOne,
    Sqrt2,
    Sqrt3,
    N4r4,
    NRPlus1,
    Q2Block,
    Q2Tensor,
    DirectSum,
    Product,
}

impl Family {
    pub const BASE: [Family; 8] = [
        Family::Trivial,
        Family::RankOne,
        Family::Sqrt2,
        Family::Sqrt3,
        Family::N4r4,
        Family::NRPlus1,
        Family::Q2Block,
        Family::Q2Tensor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Trivial => "trivial",
            Family::RankOne => "rank-one",
            Family::Sqrt2 => "sqrt2",
            Family::Sqrt3 => "sqrt3",
            Family::N4r4 => "n4r4",
            Family::NRPlus1 => "n-r-plus-1",
            Family::Q2Block => "q2-block",
            Family::Q2Tensor => "q2-tensor",
            Family::DirectSum => "direct-sum",
            Family::Product => "product",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Ok(match key.as_str() {
            "trivial" => Family::Trivial,
            "rank-one" | "rank1" | "rankone" => Family::RankOne,
            "sqrt2" | "q-sqrt2" => Family::Sqrt2,
            "sqrt3" | "q-sqrt3" => Family::Sqrt3,
            "n4r4" => Family::N4r4,
            "n-r-plus-1" | "nrplus1" | "n-r+1" => Family::NRPlus1,
            "q2-block" | "q2block" => Family::Q2Block,
            "q2-tensor" | "q2tensor" => Family::Q2Tensor,
            "direct-sum" => Family::DirectSum,
            "product" => Family::Product,
            _ => return Err(Error::InvalidParameter(format!("unknown family {s:?}"))),
        })
    }
}

/// A V-system together with the `Q` at which `Q P_𝒯` solves (T1)–(T2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub family: Family,
    pub q: f64,
    pub params: Value,
    pub vs: VSystem,
}

impl FamilyInstance {
    /// Validates orthonormality and the unitarity criterion at `q`.
    pub fn new(vs: VSystem, q: f64, family: Family, params: Value) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Q must be positive, got {q}"
            )));
        }
        let tol = Tolerance::default();
        check_orthonormal(&vs, &tol).into_result()?;
        unitarity_criterion(&vs, q, &tol)?.into_result()?;
        Ok(Self {
            family,
            q,
            params,
            vs,
        })
    }

    pub fn n(&self) -> usize {
        self.vs.n()
    }

    pub fn r(&self) -> usize {
        self.vs.r()
    }

    /// `T = Q P_𝒯`
    pub fn t(&self) -> Result<ComplexMatrix> {
        solution_matrix(&self.vs, self.q)
    }

    pub fn criterion(&self, tol: &Tolerance) -> Result<Report> {
        unitarity_criterion(&self.vs, self.q, tol)
    }

    /// Full (T1)–(T2) verification of `Q P_𝒯`.
    pub fn verify(&self, tol: &Tolerance) -> Result<TlSolution> {
        Ok(verify_all(&self.t()?, self.n(), self.q, tol)?.with_label(self.label()))
    }

    pub fn label(&self) -> String {
        format!(
            "{}(n={}, r={}, Q={})",
            self.family,
            self.n(),
            self.r(),
            self.q
        )
    }
}

pub(crate) fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn require_nonzero(z: Complex64, name: &str) -> Result<()> {
    if z == ZERO || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be a finite nonzero complex number"
        )));
    }
    Ok(())
}

fn unit(n: usize, a: usize, b: usize) -> ComplexMatrix {
    ComplexMatrix::matrix_unit(n, a, b).expect("index within range")
}

/// Sum of `c_i E_{a_i b_i}` in `M_n` (one-based).
fn sparse(n: usize, terms: &[(Complex64, usize, usize)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for &(c, a, b) in terms {
        m[(a - 1, b - 1)] += c;
    }
    m
}

fn all_units(n: usize) -> Vec<ComplexMatrix> {
    let mut mats = Vec::with_capacity(n * n);
    for a in 1..=n {
        for b in 1..=n {
            mats.push(unit(n, a, b));
        }
    }
    mats
}

/// All `n²` matrix units, `Q = 1`, `T = I`.
pub fn trivial(n: usize) -> Result<FamilyInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    FamilyInstance::new(
        VSystem::new(all_units(n))?,
        1.0,
        Family::Trivial,
        json!({ "n": n }),
    )
}

/// `Q_n(z) = Σ_{k=0}^{n-1} |z|^{2k+1-n}`
pub fn rank_one_q(n: usize, z: f64) -> f64 {
    (0..n).map(|k| z.powi(2 * k as i32 + 1 - n as i32)).sum()
}

/// `V = γ Σ_k z^k E_{k+1, n-k}`, `γ = (Σ|z|^{2k})^{-1/2}`, `Q = Q_n(z)`.
pub fn rank_one(n: usize, z: Complex64) -> Result<FamilyInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    require_nonzero(z, "z")?;
    let modulus = z.norm();
    let gamma = 1.0
        / (0..n)
            .map(|k| modulus.powi(2 * k as i32))
            .sum::<f64>()
            .sqrt();
    let terms: Vec<_> = (0..n)
        .map(|k| (z.powu(k as u32) * gamma, k + 1, n - k))
        .collect();
    FamilyInstance::new(
        VSystem::new(vec![sparse(n, &terms)])?,
        rank_one_q(n, modulus),
        Family::RankOne,
        json!({ "n": n, "z": complex_json(z) }),
    )
}

/// `n = r = 2`, `Q = √2`.
pub fn q_sqrt2() -> Result<FamilyInstance> {
    let h = Complex64::new(1.0 / SQRT_2, 0.0);
    let i = Complex64::new(0.0, 1.0 / SQRT_2);
    let v1 = sparse(2, &[(h, 1, 1), (h, 2, 2)]);
    let v2 = sparse(2, &[(i, 1, 2), (h, 2, 1)]);
    FamilyInstance::new(
        VSystem::new(vec![v1, v2])?,
        SQRT_2,
        Family::Sqrt2,
        json!({}),
    )
}

/// `n = r = 3`, `Q = √3`, built on `q = e^{2πi/3}`.
pub fn q_sqrt3() -> Result<FamilyInstance> {
    let s = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let q = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let v1 = sparse(3, &[(s, 1, 3), (s, 2, 2), (s, 3, 1)]);
    let v2 = sparse(3, &[(s * q, 1, 2), (s, 2, 1), (s, 3, 3)]);
    let v3 = sparse(3, &[(s, 1, 1), (s * q.conj(), 2, 3), (s, 3, 2)]);
    FamilyInstance::new(
        VSystem::new(vec![v1, v2, v3])?,
        3f64.sqrt(),
        Family::Sqrt3,
        json!({}),
    )
}

/// Column of `E_{i, σ(i)}` for each row of the fourth `n = r = 4` matrix.
///
/// This is the only permutation for which the family satisfies the unitarity
/// criterion at generic parameters, see [`derive_n4r4_fourth`].
pub const N4R4_FOURTH_COLUMNS: [usize; 4] = [4, 3, 2, 1];

fn n4r4_mats(z: [Complex64; 4], fourth: [usize; 4]) -> Vec<ComplexMatrix> {
    let [z1, z2, z3, z4] = z;
    let v1 = sparse(4, &[(z1, 1, 2), (z2, 2, 3), (z3, 3, 4), (z4, 4, 1)]);
    let v2 = sparse(4, &[(z1, 1, 4), (z2, 2, 1), (z3, 3, 2), (z4, 4, 3)]);
    let v3 = sparse(
        4,
        &[
            (z3.conj(), 1, 2),
            (z4.conj(), 2, 1),
            (-z1.conj(), 3, 4),
            (-z2.conj(), 4, 3),
        ],
    );
    let coeffs = [z3.conj(), z4.conj(), -z1.conj(), -z2.conj()];
    let terms: Vec<_> = coeffs
        .iter()
        .zip(fourth)
        .enumerate()
        .map(|(i, (&c, col))| (c, i + 1, col))
        .collect();
    vec![v1, v2, v3, sparse(4, &terms)]
}

/// `Q = 1/√((|z₁|²+|z₃|²)(|z₂|²+|z₄|²))`
pub fn n4r4_q(z: [Complex64; 4]) -> f64 {
    let a = z[0].norm_sqr() + z[2].norm_sqr();
    let b = z[1].norm_sqr() + z[3].norm_sqr();
    1.0 / (a * b).sqrt()
}

fn check_n4r4_params(z: [Complex64; 4]) -> Result<()> {
    if z.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::InvalidParameter(
            "n4r4 parameters must be finite".into(),
        ));
    }
    let total: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "n4r4 needs Σ|z_i|² = 1, got {total}"
        )));
    }
    if (z[0].norm() + z[2].norm()) * (z[1].norm() + z[3].norm()) == 0.0 {
        return Err(Error::InvalidParameter(
            "n4r4 needs (|z1|+|z3|)(|z2|+|z4|) != 0".into(),
        ));
    }
    Ok(())
}

/// `n = r = 4` generalized-permutation family, `Q ∈ [2, ∞)`.
pub fn n4r4(z: [Complex64; 4]) -> Result<FamilyInstance> {
    check_n4r4_params(z)?;
    FamilyInstance::new(
        VSystem::new(n4r4_mats(z, N4R4_FOURTH_COLUMNS))?,
        n4r4_q(z),
        Family::N4r4,
        json!({ "z": z.iter().map(|&c| complex_json(c)).collect::<Vec<_>>() }),
    )
}

/// A uniformly drawn admissible parameter point for [`n4r4`].
pub fn random_n4r4_params(rng: &mut impl Rng) -> [Complex64; 4] {
    loop {
        let z: [Complex64; 4] = std::array::from_fn(|_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        let z = z.map(|c| c / norm);
        if check_n4r4_params(z).is_ok() {
            return z;
        }
    }
}

/// [`random_n4r4_params`] from a fixed seed.
pub fn seeded_n4r4_params(seed: u64) -> [Complex64; 4] {
    random_n4r4_params(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Outcome of the brute-force search for the fourth `n4r4` matrix.
#[derive(Debug, Clone, Serialize)]
pub struct N4r4Derivation {
    pub seed: u64,
    pub trials: usize,
    /// Column patterns `σ` (one-based) that passed every trial.
    pub accepted: Vec<[usize; 4]>,
    /// Largest unitarity residual of the accepted pattern(s) over the trials.
    pub worst_residual: f64,
}

/// Tries every `σ ∈ S_4` for `V_4 = z̄₃E_{1σ1} + z̄₄E_{2σ2} − z̄₁E_{3σ3} − z̄₂E_{4σ4}`
/// against `trials` random admissible parameter points.
pub fn derive_n4r4_fourth(seed: u64, trials: usize) -> Result<N4r4Derivation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<[Complex64; 4]> = (0..trials).map(|_| random_n4r4_params(&mut rng)).collect();
    let tol = Tolerance::default();
    let mut accepted = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for sigma in permutations4() {
        let mut residuals = Vec::with_capacity(trials);
        let mut ok = true;
        for &z in &points {
            let vs = VSystem::new(n4r4_mats(z, sigma))?;
            if !check_orthonormal(&vs, &tol).pass {
                ok = false;
                break;
            }
            let rep = unitarity_criterion(&vs, n4r4_q(z), &tol)?;
            if !rep.pass {
                ok = false;
                break;
            }
            residuals.push(rep.residual);
        }
        if ok {
            accepted.push(sigma);
            worst_residual = residuals.into_iter().fold(worst_residual, f64::max);
        }
    }
    Ok(N4r4Derivation {
        seed,
        trials,
        accepted,
        worst_residual,
    })
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 1..=4 {
        for b in 1..=4 {
            for c in 1..=4 {
                for d in 1..=4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 5];
                    if p.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// `Q = |z₁|/|z₂| + |z₂|/|z₁|`
pub fn n_r_plus_1_q(z1: Complex64, z2: Complex64) -> f64 {
    z1.norm() / z2.norm() + z2.norm() / z1.norm()
}

/// `V_k = (z₁ E_{1,k+1} + z₂ E_{k+1,1}) / √(|z₁|²+|z₂|²)`, `k = 1..n-1`.
pub fn n_r_plus_1(n: usize, z1: Complex64, z2: Complex64) -> Result<FamilyInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "n-r-plus-1 needs n >= 2, got {n}"
        )));
    }
    require_nonzero(z1, "z1")?;
    require_nonzero(z2, "z2")?;
    let norm = 1.0 / (z1.norm_sqr() + z2.norm_sqr()).sqrt();
    let mats = (1..n)
        .map(|k| sparse(n, &[(z1 * norm, 1, k + 1), (z2 * norm, k + 1, 1)]))
        .collect();
    FamilyInstance::new(
        VSystem::new(mats)?,
        n_r_plus_1_q(z1, z2),
        Family::NRPlus1,
        json!({ "n": n, "z1": complex_json(z1), "z2": complex_json(z2) }),
    )
}

fn require_even(n: usize) -> Result<usize> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "n must be even and at least 2, got {n}"
        )));
    }
    Ok(n / 2)
}

/// `Ṽ_k = (V_k ⊕ V_k)/√2` over the matrix units of `M_{n/2}`; `Q = 2`, `r = n²/4`.
pub fn q2_block(n: usize) -> Result<FamilyInstance> {
    let half = require_even(n)?;
    let mats = all_units(half)
        .into_iter()
        .map(|v| v.direct_sum(&v).scale_real(1.0 / SQRT_2))
        .collect();
    FamilyInstance::new(VSystem::new(mats)?, 2.0, Family::Q2Block, json!({ "n": n }))
}

/// `Ṽ_k = V_k ⊗ (E12 + z E21)/√(1+|z|²)`; `Q = |z| + 1/|z|`, `r = n²/4`.
pub fn q2_tensor(n: usize, z: Complex64) -> Result<FamilyInstance> {
    let half = require_even(n)?;
    require_nonzero(z, "z")?;
    let two = sparse(2, &[(Complex64::new(1.0, 0.0), 1, 2), (z, 2, 1)])
        .scale_real(1.0 / (1.0 + z.norm_sqr()).sqrt());
    let mats = all_units(half).into_iter().map(|v| v.kron(&two)).collect();
    FamilyInstance::new(
        VSystem::new(mats)?,
        z.norm() + 1.0 / z.norm(),
        Family::Q2Tensor,
        json!({ "n": n, "z": complex_json(z) }),
    )
}

/// Larger root `x ≥ 1` of `x + 1/x = q`.
pub fn modulus_for_pair_sum(q: f64) -> Result<f64> {
    if !q.is_finite() || q < 2.0 - 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "x + 1/x = {q} has no real solution"
        )));
    }
    let disc = (q * q - 4.0).max(0.0);
    Ok((q + disc.sqrt()) / 2.0)
}

/// [`n_r_plus_1`] tuned to `Q = q` with `|z₂| = 1` and zero phases.
pub fn n_r_plus_1_at(n: usize, q: f64) -> Result<FamilyInstance> {
    let x = modulus_for_pair_sum(q)?;
    n_r_plus_1(n, Complex64::new(x, 0.0), Complex64::new(1.0, 0.0))
}

/// [`n4r4`] tuned to `Q = q`, splitting each half of the unit norm evenly.
pub fn n4r4_at(q: f64) -> Result<FamilyInstance> {
    if !q.is_finite() || q < 2.0 - 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "n4r4 needs Q >= 2, got {q}"
        )));
    }
    // a + b = 1, ab = 1/q²
    let disc = (1.0 - 4.0 / (q * q)).max(0.0).sqrt();
    let a = (1.0 + disc) / 2.0;
    let b = 1.0 - a;
    let za = Complex64::new((a / 2.0).sqrt(), 0.0);
    let zb = Complex64::new((b / 2.0).sqrt(), 0.0);
    n4r4([za, zb, za, zb])
}

/// [`rank_one`] tuned to `Q = q ≥ n` with a real `z ≥ 1`.
pub fn rank_one_at(n: usize, q: f64) -> Result<FamilyInstance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let nf = n as f64;
    if !q.is_finite() || q < nf - 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "rank-one at n={n} needs Q >= {n}, got {q}"
        )));
    }
    if n == 1 {
        if (q - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "rank-one at n=1 only has Q = 1".into(),
            ));
        }
        return rank_one(1, Complex64::new(1.0, 0.0));
    }
    let z = if n == 2 {
        modulus_for_pair_sum(q)?
    } else {
        // Q_n is increasing for |z| >= 1
        let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
        while rank_one_q(n, hi) < q {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rank_one_q(n, mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    rank_one(n, Complex64::new(z, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn trivial_examples() {
        let t1 = trivial(1).unwrap();
        assert_eq!((t1.q, t1.r()), (1.0, 1));
        assert_eq!(trivial(2).unwrap().r(), 4);
        let sol = trivial(3).unwrap().verify(&tol()).unwrap();
        assert_eq!(sol.rank(), 9);
        assert!(trivial(0).is_err());
    }

    #[test]
    fn rank_one_examples() {
        assert_eq!(rank_one(2, c(1., 0.)).unwrap().q, 2.0);
        for n in 1..6 {
            let q = rank_one(n, Complex64::from_polar(1.0, 0.7)).unwrap().q;
            assert!((q - n as f64).abs() < 1e-12);
        }
        assert!((rank_one(3, c(2., 0.)).unwrap().q - 21.0 / 4.0).abs() < 1e-12);
        assert!(rank_one(3, ZERO).is_err());
    }

    #[test]
    fn fixed_q_examples() {
        let s2 = q_sqrt2().unwrap();
        assert_eq!((s2.n(), s2.r()), (2, 2));
        assert_eq!(
            s2.n() * s2.n(),
            (s2.q * s2.q * s2.r() as f64).round() as usize
        );
        let t = s2.t().unwrap();
        assert!((t.trace().unwrap().re - SQRT_2 * 2.0).abs() < 1e-12);
        let s3 = q_sqrt3().unwrap();
        assert_eq!((s3.n(), s3.r()), (3, 3));
        assert!(!unitarity_criterion(&s3.vs, 1.0, &tol()).unwrap().pass);
    }

    #[test]
    fn n4r4_examples() {
        let quarter = c(0.5, 0.);
        assert!((n4r4([quarter; 4]).unwrap().q - 2.0).abs() < 1e-12);
        let big = 0.45f64.sqrt();
        let small = 0.05f64.sqrt();
        let inst = n4r4([c(big, 0.), c(0., small), c(0., big), c(small, 0.)]).unwrap();
        assert!((inst.q - 1.0 / 0.3).abs() < 1e-12);
        assert!(n4r4([c(0.6, 0.), c(0.1, 0.), c(0.1, 0.), c(0.1, 0.)]).is_err());
        assert!(n4r4([c(1., 0.), ZERO, ZERO, ZERO]).is_err());
    }

    #[test]
    fn fourth_matrix_derivation_is_unique() {
        let d = derive_n4r4_fourth(7, 3).unwrap();
        assert_eq!(d.accepted, vec![N4R4_FOURTH_COLUMNS]);
        assert!(d.worst_residual < 1e-12);
    }

    #[test]
    fn n_r_plus_1_examples() {
        let inst = n_r_plus_1(2, c(1., 0.), c(0., 1.)).unwrap();
        assert_eq!((inst.r(), inst.q), (1, 2.0));
        for n in 2..7 {
            assert_eq!(n_r_plus_1(n, c(0.3, 0.4), c(0., -0.5)).unwrap().q, 2.0);
        }
        assert!((n_r_plus_1(5, c(3., 0.), c(1., 0.)).unwrap().q - 10.0 / 3.0).abs() < 1e-12);
        assert!(n_r_plus_1(1, c(1., 0.), c(1., 0.)).is_err());
        assert!(n_r_plus_1(3, ZERO, c(1., 0.)).is_err());
    }

    #[test]
    fn q2_examples() {
        let b = q2_block(2).unwrap();
        assert_eq!((b.n(), b.r(), b.q), (2, 1, 2.0));
        assert_eq!(q2_block(6).unwrap().r(), 9);
        assert_eq!(
            q2_tensor(4, Complex64::from_polar(1.0, 2.0)).unwrap().q,
            2.0
        );
        assert_eq!(q2_tensor(4, c(2., 0.)).unwrap().q, 2.5);
        assert!(q2_block(3).is_err());
        assert!(q2_tensor(4, ZERO).is_err());
    }

    #[test]
    fn tuned_constructors_hit_target() {
        for q in [2.0, 2.5, 7.25] {
            assert!((n_r_plus_1_at(4, q).unwrap().q - q).abs() < 1e-12);
            assert!((n4r4_at(q).unwrap().q - q).abs() < 1e-12);
            assert!((rank_one_at(2, q).unwrap().q - q).abs() < 1e-12);
        }
        assert!((rank_one_at(3, 3.0).unwrap().q - 3.0).abs() < 1e-12);
        assert!((rank_one_at(3, 6.4).unwrap().q - 6.4).abs() < 1e-12);
        assert!(rank_one_at(3, 2.9).is_err());
        assert!(n4r4_at(1.9).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::BASE {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
