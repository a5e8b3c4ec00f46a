//! Arithmetic constraints on `(n, r, Q)`: the four admissible classes,
//! membership in `J_∞`, existence at `Q = 2`, and the conjectured lower bound.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest index scanned by [`is_in_j_infty`].
pub const J_INFTY_SCAN: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TlClass {
    A,
    B,
    C,
    D,
    Excluded,
}

impl fmt::Display for TlClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TlClass::A => "A",
            TlClass::B => "B",
            TlClass::C => "C",
            TlClass::D => "D",
            TlClass::Excluded => "Excluded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub n: usize,
    pub r: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    pub theorem2_class: TlClass,
    /// `n²/r` when it is an integer.
    pub s: Option<usize>,
    pub s_ratio: f64,
    pub q2_exists: bool,
    pub q2_divisor: Option<usize>,
    /// Conjectural; never used to gate anything.
    pub conjecture_ok: bool,
    pub j_infty: JMembership,
    pub notes: Vec<String>,
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Class of a hypothetical solution with `n` sites, rank `r` and loop value `q`.
pub fn class_of(n: usize, r: usize, q: f64, tol: f64) -> TlClass {
    if n == 0 || r == 0 || !(q.is_finite() && q > 0.0) {
        return TlClass::Excluded;
    }
    let sq = n * n;
    if r == sq && near(q, 1.0, tol) {
        TlClass::A
    } else if sq == 2 * r && near(q, SQRT_2, tol) {
        TlClass::B
    } else if sq == 3 * r && near(q, 3f64.sqrt(), tol) {
        TlClass::C
    } else if 4 * r <= sq && q >= f64::max(2.0, n as f64 / r as f64) - tol {
        TlClass::D
    } else {
        TlClass::Excluded
    }
}

pub fn classify(n: usize, r: usize, q: f64, tol: f64) -> ClassReport {
    let class = class_of(n, r, q, tol);
    let sq = n * n;
    let s = (r > 0 && sq.is_multiple_of(r)).then(|| sq / r);
    let q2 = q2_existence(n, r);
    let conjecture_ok = conjecture_bound(n, r, q, tol);
    let j = j_infty_membership(q, tol);
    let mut notes = Vec::new();
    if n == 0 || r == 0 || !(q.is_finite() && q > 0.0) {
        notes.push("invalid input: n, r must be positive and Q positive finite".to_string());
    } else if q * (r as f64) < n as f64 - tol {
        notes.push("Q r < n: no solution of this rank".to_string());
    }
    if r > sq {
        notes.push("r > n²: rank exceeds the ambient dimension".to_string());
    }
    match j {
        JMembership::Member(k) => notes.push(format!("Q = 2cos(π/{}) lies in J_∞ (k={k})", k + 2)),
        JMembership::Indeterminate => {
            notes.push("J_∞ membership indeterminate this close to 2".into())
        }
        JMembership::NotMember => {}
    }
    notes.push(format!(
        "conjectural bound Q(r+1) >= 2n: {}",
        if conjecture_ok { "holds" } else { "violated" }
    ));
    ClassReport {
        n,
        r,
        q,
        theorem2_class: class,
        s,
        s_ratio: if r == 0 {
            f64::INFINITY
        } else {
            sq as f64 / r as f64
        },
        q2_exists: q2.exists,
        q2_divisor: q2.divisor,
        conjecture_ok,
        j_infty: j,
        notes,
    }
}

/// `2cos(π/(k+2))`
pub fn j_infty(k: usize) -> f64 {
    2.0 * (PI / (k as f64 + 2.0)).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JMembership {
    Member(usize),
    NotMember,
    /// Closer to 2 than the scan can resolve.
    Indeterminate,
}

pub fn j_infty_membership(q: f64, tol: f64) -> JMembership {
    if !q.is_finite() {
        return JMembership::NotMember;
    }
    let best = (1..=J_INFTY_SCAN)
        .map(|k| (k, (q - j_infty(k)).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match best {
        Some((k, d)) if d <= tol && k < J_INFTY_SCAN => JMembership::Member(k),
        _ if q > j_infty(J_INFTY_SCAN) - tol && q <= 2.0 + tol => JMembership::Indeterminate,
        _ => JMembership::NotMember,
    }
}

/// Index `k` with `|q − 2cos(π/(k+2))| ≤ tol`, if one exists below the scan limit.
pub fn is_in_j_infty(q: f64, tol: f64) -> Option<usize> {
    match j_infty_membership(q, tol) {
        JMembership::Member(k) => Some(k),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Q2Existence {
    pub exists: bool,
    /// Largest `m | r` with `n = m + r/m`.
    pub divisor: Option<usize>,
}

fn perfect_sqrt(x: u128) -> Option<u128> {
    let s = (x as f64).sqrt() as u128;
    (s.saturating_sub(1)..=s + 1).find(|c| c * c == x)
}

/// Whether `√(n² − 4r)` is a non-negative integer.
pub fn q2_by_square(n: usize, r: usize) -> Option<usize> {
    let sq = (n as u128) * (n as u128);
    let four_r = 4 * r as u128;
    if sq < four_r {
        return None;
    }
    perfect_sqrt(sq - four_r).map(|d| d as usize)
}

/// Largest divisor `m` of `r` with `n = m + r/m`.
pub fn q2_by_divisor(n: usize, r: usize) -> Option<usize> {
    (1..=r)
        .rev()
        .find(|&m| r.is_multiple_of(m) && m + r / m == n)
}

/// Existence of a solution at `Q = 2`; both arithmetic forms are evaluated and
/// must agree.
pub fn q2_existence(n: usize, r: usize) -> Q2Existence {
    if n == 0 || r == 0 {
        return Q2Existence {
            exists: false,
            divisor: None,
        };
    }
    let by_square = q2_by_square(n, r);
    let by_divisor = q2_by_divisor(n, r);
    assert_eq!(
        by_square.is_some(),
        by_divisor.is_some(),
        "Q=2 criteria disagree at n={n}, r={r}"
    );
    if let (Some(d), Some(m)) = (by_square, by_divisor) {
        assert_eq!((n + d) / 2, m, "Q=2 witness mismatch at n={n}, r={r}");
    }
    Q2Existence {
        exists: by_divisor.is_some(),
        divisor: by_divisor,
    }
}

/// Conjectured necessary condition `Q(r+1) ≥ 2n`.
pub fn conjecture_bound(n: usize, r: usize, q: f64, tol: f64) -> bool {
    q * (r as f64 + 1.0) >= 2.0 * n as f64 - tol
}

/// Arithmetic condition for the solution to be unitary (not only Hermitian):
/// `n² = s r` with `Q = √s`, `s ∈ {1,2,3}`, or `n² − 4r` a perfect square with `Q = 2`.
pub fn unitary_r_condition(n: usize, r: usize, q: f64, tol: f64) -> bool {
    let sq = n * n;
    let small = (1..=3).any(|s| sq == s * r && near(q, (s as f64).sqrt(), tol));
    small || (q2_by_square(n, r).is_some() && near(q, 2.0, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn class_examples() {
        assert_eq!(class_of(2, 4, 1.0, TOL), TlClass::A);
        assert_eq!(class_of(3, 3, 1.732050808, 1e-8), TlClass::C);
        assert_eq!(class_of(2, 2, SQRT_2, TOL), TlClass::B);
        assert_eq!(class_of(2, 3, 1.5, TOL), TlClass::Excluded);
        assert_eq!(class_of(5, 4, 2.0, TOL), TlClass::D);
        assert_eq!(class_of(4, 1, 3.9, TOL), TlClass::Excluded);
        assert_eq!(class_of(4, 1, 4.0, TOL), TlClass::D);
    }

    #[test]
    fn small_grid_is_excluded() {
        for r in 2..=5 {
            for n in 1..r {
                for q in [0.5, 1.0, SQRT_2, 3f64.sqrt(), 2.0, 3.0, 10.0] {
                    let c = class_of(n, r, q, TOL);
                    if (n, r, q) == (2, 4, 1.0) {
                        assert_eq!(c, TlClass::A);
                    } else {
                        assert_eq!(c, TlClass::Excluded, "n={n} r={r} Q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn j_infty_examples() {
        assert!((j_infty(1) - 1.0).abs() < 1e-15);
        assert!((j_infty(2) - SQRT_2).abs() < 1e-15);
        assert_eq!(is_in_j_infty(SQRT_2, TOL), Some(2));
        assert_eq!(is_in_j_infty(3f64.sqrt(), TOL), Some(4));
        assert_eq!(is_in_j_infty(1.999, TOL), None);
        assert_eq!(j_infty_membership(2.5, TOL), JMembership::NotMember);
        assert_eq!(
            j_infty_membership(2.0 - 1e-9, TOL),
            JMembership::Indeterminate
        );
    }

    #[test]
    fn q2_examples() {
        assert_eq!(
            q2_existence(5, 4),
            Q2Existence {
                exists: true,
                divisor: Some(4)
            }
        );
        assert_eq!(q2_existence(3, 2).divisor, Some(2));
        assert!(!q2_existence(4, 2).exists);
        assert_eq!(q2_existence(4, 4).divisor, Some(2));
    }

    #[test]
    fn conjecture_examples() {
        assert!(conjecture_bound(5, 4, 2.0, TOL));
        assert!(!conjecture_bound(6, 1, 5.0, TOL));
        assert!(classify(6, 1, 5.0, TOL)
            .notes
            .iter()
            .any(|s| s.contains("violated")));
    }

    #[test]
    fn unitary_examples() {
        assert!(unitary_r_condition(2, 2, SQRT_2, TOL));
        assert!(unitary_r_condition(2, 1, 2.0, TOL));
        assert!(!unitary_r_condition(3, 1, 3.0, TOL));
    }

    #[test]
    fn report_fields() {
        let rep = classify(3, 3, 3f64.sqrt(), TOL);
        assert_eq!(rep.theorem2_class, TlClass::C);
        assert_eq!(rep.s, Some(3));
        assert_eq!(rep.j_infty, JMembership::Member(4));
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["theorem2_class"], "C");
        assert_eq!(classify(2, 3, 1.0, TOL).s, None);
    }
}
