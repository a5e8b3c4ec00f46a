//! Building new solutions from old ones: direct sum, rank-one product,
//! fusion, and the explicit constructions for `r = 2, 3, 4` at any `n > r`.

use std::f64::consts::SQRT_2;

use serde_json::{json, Value};

use crate::catalog::{
    n4r4_at, n_r_plus_1_at, q_sqrt2, q_sqrt3, rank_one_at, trivial, Family, FamilyInstance,
};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Tolerance};
use crate::subspace::VSystem;
use crate::tensor::{embed, site_dim, space_dim, verify_all, TlSolution};

fn summary(inst: &FamilyInstance) -> Value {
    json!({ "family": inst.family, "n": inst.n(), "r": inst.r(), "q": inst.q, "params": inst.params })
}

/// `Ṽ_k = (√Q₁ V_k ⊕ √Q₂ W_k)/√(Q₁+Q₂)`, solving at `Q₁ + Q₂`.
pub fn direct_sum(a: &FamilyInstance, b: &FamilyInstance) -> Result<FamilyInstance> {
    if a.r() != b.r() {
        return Err(Error::DimensionMismatch(format!(
            "direct sum needs equal rank, got {} and {}",
            a.r(),
            b.r()
        )));
    }
    let q = a.q + b.q;
    let (sa, sb, norm) = (a.q.sqrt(), b.q.sqrt(), 1.0 / q.sqrt());
    let mats =
        a.vs.mats()
            .iter()
            .zip(b.vs.mats())
            .map(|(va, vb)| {
                va.scale_real(sa)
                    .direct_sum(&vb.scale_real(sb))
                    .scale_real(norm)
            })
            .collect();
    FamilyInstance::new(
        VSystem::new(mats)?,
        q,
        Family::DirectSum,
        json!({ "parts": [summary(a), summary(b)] }),
    )
}

/// Folds [`direct_sum`] over `parts` from the left.
pub fn direct_sum_all(parts: &[FamilyInstance]) -> Result<FamilyInstance> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("direct sum of nothing".into()))?;
    if rest.is_empty() {
        return Ok(first.clone());
    }
    let mut acc = direct_sum(first, &rest[0])?;
    for p in &rest[1..] {
        acc = direct_sum(&acc, p)?;
    }
    let q = parts.iter().map(|p| p.q).sum();
    acc.params = json!({ "parts": parts.iter().map(summary).collect::<Vec<_>>() });
    acc.q = q;
    Ok(acc)
}

/// `Ṽ_k = V_k ⊗ W` for a rank-one `b = {W}`, solving at `Q_a Q_b`.
pub fn product_rank_one(a: &FamilyInstance, b: &FamilyInstance) -> Result<FamilyInstance> {
    if b.r() != 1 {
        return Err(Error::InvalidParameter(format!(
            "second factor must have rank one, got r={}",
            b.r()
        )));
    }
    let w = &b.vs.mats()[0];
    let mats = a.vs.mats().iter().map(|v| v.kron(w)).collect();
    FamilyInstance::new(
        VSystem::new(mats)?,
        a.q * b.q,
        Family::Product,
        json!({ "parts": [summary(a), summary(b)] }),
    )
}

/// `T̃ = T₂₃ T₁₂ T₃₄ T₂₃` on four sites, read as a two-site operator over
/// `C^{n²}`. Solves at `Q²` with rank `r²`.
pub fn fuse(sol: &TlSolution, cap: usize, tol: &Tolerance) -> Result<TlSolution> {
    let n = site_dim(sol.t())?;
    // verifying the fused operator needs three sites of dimension n²
    space_dim(n * n, 3, cap)?;
    let t12 = embed(sol.t(), n, 1, 4, cap)?;
    let t23 = embed(sol.t(), n, 2, 4, cap)?;
    let t34 = embed(sol.t(), n, 3, 4, cap)?;
    let fused = ComplexMatrix::product(&[&t23, &t12, &t34, &t23])?;
    let q = sol.q() * sol.q();
    let label = format!("fuse({}) site_dim={}", sol.label(), n * n);
    Ok(verify_all(&fused, n * n, q, tol)?.with_label(label))
}

fn inadmissible(r: usize, n: usize) -> Error {
    Error::InvalidParameter(format!("no construction for (r={r}, n={n})"))
}

/// `(k, m)` with `n = (r+1)k − m`, `0 ≤ m ≤ r`.
fn split(r: usize, n: usize) -> Result<(usize, usize)> {
    if !(2..=4).contains(&r) || n <= r || (r, n) == (3, 5) {
        return Err(inadmissible(r, n));
    }
    let p = r + 1;
    let m = (p - n % p) % p;
    Ok(((n + m) / p, m))
}

/// Smallest `Q` reached by [`theorem9_construct`] for `(r, n)`.
pub fn q_threshold(r: usize, n: usize) -> Result<f64> {
    let (k, m) = split(r, n)?;
    let (kf, mf) = (k as f64, m as f64);
    Ok(match r {
        2 => 2.0 * (kf - mf) + mf * SQRT_2,
        3 => 2.0 * (kf - mf) + mf * 3f64.sqrt(),
        _ if m <= 2 => 2.0 * kf,
        _ => 2.0 * kf - 1.0,
    })
}

/// Explicit solution with `n` sites, rank `r ∈ {2,3,4}` and `Q = q_target`,
/// for any `q_target ≥ q_threshold(r, n)`.
///
/// Fixed-`Q` blocks come first, then the `n = r+1` blocks. All of the excess
/// over the threshold is carried by the first `n = r+1` block, or by the first
/// tunable block when there is none.
pub fn theorem9_construct(r: usize, n: usize, q_target: f64) -> Result<FamilyInstance> {
    let threshold = q_threshold(r, n)?;
    if !q_target.is_finite() || q_target < threshold - 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "Q={q_target} is below the threshold {threshold} for (r={r}, n={n})"
        )));
    }
    let slack = (q_target - threshold).max(0.0);
    let (k, m) = split(r, n)?;
    let tunable = |count: usize| -> Result<Vec<FamilyInstance>> {
        (0..count)
            .map(|i| n_r_plus_1_at(r + 1, if i == 0 { 2.0 + slack } else { 2.0 }))
            .collect()
    };

    let mut inst = match (r, m) {
        (2, _) if k == m => product_rank_one(&q_sqrt2()?, &rank_one_at(2, q_target / SQRT_2)?)?,
        (3, _) if k == m => {
            product_rank_one(&q_sqrt3()?, &rank_one_at(n / 3, q_target / 3f64.sqrt())?)?
        }
        (2 | 3, _) => {
            let fixed = if r == 2 { q_sqrt2()? } else { q_sqrt3()? };
            let mut parts = vec![fixed; m];
            parts.extend(tunable(k - m)?);
            direct_sum_all(&parts)?
        }
        (4, 0..=2) => {
            let mut parts: Vec<FamilyInstance> = (0..m)
                .map(|i| n4r4_at(if i == 0 && k == m { 2.0 + slack } else { 2.0 }))
                .collect::<Result<_>>()?;
            parts.extend(tunable(k - m)?);
            direct_sum_all(&parts)?
        }
        (4, 3) => {
            let mut parts = vec![trivial(2)?];
            parts.extend(tunable(k - 1)?);
            direct_sum_all(&parts)?
        }
        (4, _) => {
            let mut parts = vec![
                n4r4_at(if k == 2 { 2.0 + slack } else { 2.0 })?,
                trivial(2)?,
            ];
            parts.extend(tunable(k - 2)?);
            direct_sum_all(&parts)?
        }
        _ => return Err(inadmissible(r, n)),
    };
    let parts = inst.params.get("parts").cloned().unwrap_or(Value::Null);
    inst.params = json!({
        "construction": { "r": r, "n": n, "k": k, "m": m, "q_target": q_target, "threshold": threshold },
        "parts": parts,
    });
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{n_r_plus_1, q2_tensor, rank_one};
    use crate::tensor::DEFAULT_CAP;
    use num_complex::Complex64;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn direct_sum_examples() {
        let s = direct_sum(&q_sqrt2().unwrap(), &q_sqrt2().unwrap()).unwrap();
        assert_eq!((s.n(), s.r()), (4, 2));
        assert!((s.q - 2.0 * SQRT_2).abs() < 1e-12);
        s.verify(&tol()).unwrap();
        let t = direct_sum(&trivial(2).unwrap(), &trivial(2).unwrap()).unwrap();
        assert_eq!((t.n(), t.r(), t.q), (4, 4, 2.0));
        let one = rank_one(2, Complex64::new(1.0, 0.0)).unwrap();
        assert!(direct_sum(&one, &q_sqrt2().unwrap()).is_err());
    }

    #[test]
    fn product_examples() {
        let one = rank_one(2, Complex64::new(1.0, 0.0)).unwrap();
        let p = product_rank_one(&q_sqrt2().unwrap(), &one).unwrap();
        assert_eq!((p.n(), p.r()), (4, 2));
        assert!((p.q - 2.0 * SQRT_2).abs() < 1e-12);
        let z = rank_one(3, Complex64::new(1.5, 0.0)).unwrap();
        let p = product_rank_one(&q_sqrt3().unwrap(), &z).unwrap();
        assert_eq!((p.n(), p.r()), (9, 3));
        assert!(p.q >= 3.0 * 3f64.sqrt());
        let unit = rank_one(1, Complex64::new(1.0, 0.0)).unwrap();
        let same = product_rank_one(&q_sqrt3().unwrap(), &unit).unwrap();
        assert_eq!(same.q, 3f64.sqrt());
        assert!(product_rank_one(&one, &q_sqrt2().unwrap()).is_err());
    }

    #[test]
    fn fuse_examples() {
        let one = rank_one(2, Complex64::new(1.0, 0.0))
            .unwrap()
            .verify(&tol())
            .unwrap();
        let f = fuse(&one, DEFAULT_CAP, &tol()).unwrap();
        assert_eq!((f.n(), f.rank(), f.q()), (4, 1, 4.0));
        assert!((f.t().trace().unwrap().re - 4.0).abs() < 1e-9);
        let s2 = q_sqrt2().unwrap().verify(&tol()).unwrap();
        let f = fuse(&s2, DEFAULT_CAP, &tol()).unwrap();
        assert_eq!((f.t().rows(), f.rank()), (16, 4));
        assert!((f.q() - 2.0).abs() < 1e-12);
        assert!(f.label().contains("site_dim=4"));
        assert!(matches!(
            fuse(&s2, 8, &tol()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn thresholds() {
        assert_eq!(q_threshold(2, 6).unwrap(), 4.0);
        assert!((q_threshold(3, 7).unwrap() - (2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert_eq!(q_threshold(4, 8).unwrap(), 4.0);
        assert_eq!(q_threshold(4, 7).unwrap(), 3.0);
        assert!(q_threshold(3, 5).is_err());
        assert!(q_threshold(2, 2).is_err());
        assert!(q_threshold(5, 9).is_err());
    }

    #[test]
    fn construct_examples() {
        let a = theorem9_construct(2, 5, 2.0 + SQRT_2).unwrap();
        assert_eq!((a.n(), a.r()), (5, 2));
        a.verify(&tol()).unwrap();
        let b = theorem9_construct(4, 7, 3.0).unwrap();
        assert_eq!((b.n(), b.r(), b.q), (7, 4, 3.0));
        b.verify(&tol()).unwrap();
        assert!(theorem9_construct(3, 5, 4.0).is_err());
        assert!(theorem9_construct(2, 6, 3.9).is_err());
    }

    #[test]
    fn slack_lands_on_a_tunable_block() {
        for (r, n) in [(2, 4), (3, 6), (3, 9), (4, 6), (4, 8)] {
            let q = q_threshold(r, n).unwrap() + 1.0;
            let inst = theorem9_construct(r, n, q).unwrap();
            assert!((inst.q - q).abs() < 1e-12, "(r={r}, n={n})");
            inst.verify(&tol()).unwrap();
        }
    }

    #[test]
    fn sums_of_other_families() {
        let a = n_r_plus_1(3, Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
        let b = q2_tensor(2, Complex64::new(1.0, 0.0)).unwrap();
        let s = direct_sum(
            &n_r_plus_1(2, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap(),
            &b,
        )
        .unwrap();
        assert_eq!((s.n(), s.r(), s.q), (4, 1, 4.0));
        assert!(direct_sum(&a, &b).is_err());
    }
}
