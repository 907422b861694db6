//! Deformed numbers, deformed factorials and the root-of-unity constants.
//!
//! Branch conventions are fixed here and nowhere else:
//! - `q = exp(2πi/k)`, `q̄ = exp(-2πi/k)`;
//! - the square root of `q` is always `exp(iπ/k)`, and powers of it are
//!   taken by integer exponent (see [`DeformationParams::q_half_pow`]);
//! - scalar fractional powers use the principal logarithm;
//! - square roots of deformed factorials are products of the principal
//!   square roots of the individual factors ([`qfactorial_sqrt`]).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{relative_residual_scalar, Tag, VerificationReport};

/// Default relative tolerance for identity checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest `k` accepted by the standard suite.
pub const MAX_K: usize = 16;
/// Largest `k` accepted in extended mode.
pub const MAX_K_EXTENDED: usize = 64;
/// Tolerance floor applied in extended mode.
pub const EXTENDED_TOL: f64 = 1e-6;

/// The root of unity `q = exp(2πi/k)` together with its conjugate, the fixed
/// square root `exp(iπ/k)` and the tolerance used by identity checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    k: usize,
    q: C64,
    q_bar: C64,
    q_half: C64,
    tol: f64,
}

impl DeformationParams {
    /// Parameters for `k` with the default tolerance. Accepts `2 ≤ k ≤ 64`.
    pub fn new(k: usize) -> Result<Self> {
        Self::with_tol(k, DEFAULT_TOL)
    }

    pub fn with_tol(k: usize, tol: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidK(k));
        }
        if k > MAX_K_EXTENDED {
            return Err(Error::KOutOfRange { k, max: MAX_K_EXTENDED });
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidTolerance(tol));
        }
        let theta = 2.0 * PI / k as f64;
        Ok(Self {
            k,
            q: C64::from_polar(1.0, theta),
            q_bar: C64::from_polar(1.0, -theta),
            q_half: C64::from_polar(1.0, theta / 2.0),
            tol,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn q_bar(&self) -> C64 {
        self.q_bar
    }

    pub fn q_half(&self) -> C64 {
        self.q_half
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `(q^{1/2})^e = exp(iπe/k)`, with the exponent reduced mod `2k` in
    /// integer arithmetic before the single trigonometric evaluation.
    pub fn q_half_pow(&self, e: i64) -> C64 {
        let two_k = 2 * self.k as i64;
        let r = e.rem_euclid(two_k);
        C64::from_polar(1.0, PI * r as f64 / self.k as f64)
    }

    /// `q^e` for integer `e`.
    pub fn q_pow(&self, e: i64) -> C64 {
        self.q_half_pow(2 * e)
    }

    /// `[x]_q`.
    pub fn qnum(&self, x: f64) -> C64 {
        qnum(x, self.q).expect("q is never 1 for k >= 2")
    }

    /// `[x]_q̄`.
    pub fn qnum_bar(&self, x: f64) -> C64 {
        qnum(x, self.q_bar).expect("q̄ is never 1 for k >= 2")
    }
}

/// Deformed number `[x]_Q = (1 - Q^x)/(1 - Q)` with the principal power `Q^x`.
pub fn qnum(x: f64, deformation: C64) -> Result<C64> {
    if deformation == C64::new(1.0, 0.0) {
        return Err(Error::DeformationAtOne);
    }
    let one = C64::new(1.0, 0.0);
    Ok((one - principal_pow(deformation, x)) / (one - deformation))
}

/// Closed polar form of `[x]_q` at `q = exp(2πi/k)`:
/// `exp(i(x-1)π/k) · sin(xπ/k) / sin(π/k)`.
pub fn qnum_polar(x: f64, params: &DeformationParams) -> C64 {
    let k = params.k() as f64;
    let modulus = (x * PI / k).sin() / (PI / k).sin();
    C64::from_polar(1.0, (x - 1.0) * PI / k) * modulus
}

/// `[n]_Q! = [1]_Q [2]_Q ... [n]_Q`, with `[0]_Q! = 1`.
pub fn qfactorial(n: usize, deformation: C64) -> C64 {
    (1..=n).fold(C64::new(1.0, 0.0), |acc, j| acc * integer_qnum(j, deformation))
}

/// Per-factor square root of the deformed factorial:
/// `Π_{j=1..n} sqrt([j]_Q)` with principal square roots.
///
/// This is not `sqrt([n]_Q!)`; the two differ by a sign whenever the
/// accumulated phase crosses the branch cut.
pub fn qfactorial_sqrt(n: usize, deformation: C64) -> C64 {
    (1..=n).fold(C64::new(1.0, 0.0), |acc, j| {
        acc * integer_qnum(j, deformation).sqrt()
    })
}

/// `[n]_Q` for a non-negative integer, with an integer power of `Q`.
/// At `Q = 1` this is the ordinary integer `n`.
fn integer_qnum(n: usize, deformation: C64) -> C64 {
    if deformation == C64::new(1.0, 0.0) {
        return C64::new(n as f64, 0.0);
    }
    let one = C64::new(1.0, 0.0);
    (one - deformation.powi(n as i32)) / (one - deformation)
}

/// Principal branch `w^p = exp(p · Log w)`, with `0^p = 0` for `p > 0`
/// and `w^0 = 1`.
pub fn principal_pow(w: C64, p: f64) -> C64 {
    if p == 0.0 {
        return C64::new(1.0, 0.0);
    }
    if w == C64::new(0.0, 0.0) {
        return C64::new(0.0, 0.0);
    }
    (w.ln() * p).exp()
}

/// Checks `[n]_q̄! = q^{-n(n-1)/2} [n]_q!` and `[x]_q̄ = conj([x]_q)` for the
/// integer `x = n` and the half-integer `x = n + 1/2`.
pub fn conj_qnum_identity_check(n: usize, params: &DeformationParams) -> VerificationReport {
    let mut report = VerificationReport::new();
    let k = params.k();
    let tol = params.tol();

    let lhs = qfactorial(n, params.q_bar());
    let exponent = -((n * n.saturating_sub(1)) as i64);
    let rhs = params.q_half_pow(exponent) * qfactorial(n, params.q());
    // From n = k on both sides vanish; roundoff is then measured against the
    // size of the non-vanishing factors.
    let residual = if n >= k {
        let scale: f64 = (1..=n).filter(|j| j % k != 0).map(|j| params.qnum(j as f64).norm()).product();
        (lhs - rhs).norm() / scale.max(1.0)
    } else {
        relative_residual_scalar(lhs, rhs)
    };
    report.record(Tag::Eq44, k, [("n", n.to_string())], residual, tol, None);

    for x in [n as f64, n as f64 + 0.5] {
        let lhs = params.qnum_bar(x);
        let rhs = params.qnum(x).conj();
        report.record(
            Tag::A3,
            k,
            [("x", format!("{x}")), ("identity", "conjugate".to_string())],
            relative_residual_scalar(lhs, rhs),
            tol,
            None,
        );
    }
    report
}

/// Checks the polar form and the geometric-sum form of `[x]_q` against the
/// defining quotient over a sample of real and integer arguments.
pub fn qnum_consistency_check(params: &DeformationParams) -> VerificationReport {
    let mut report = VerificationReport::new();
    let k = params.k();
    let tol = params.tol();
    let steps = 4 * k;
    for i in 0..=steps {
        let x = 2.0 * k as f64 * i as f64 / steps as f64 + 0.125;
        report.record(
            Tag::A3,
            k,
            [("x", format!("{x}")), ("identity", "polar".to_string())],
            relative_residual_scalar(qnum_polar(x, params), params.qnum(x)),
            tol,
            None,
        );
    }
    for n in 1..=k {
        let geometric: C64 = (0..n).map(|i| params.q_pow(i as i64)).sum();
        report.record(
            Tag::A2,
            k,
            [("n", n.to_string())],
            relative_residual_scalar(params.qnum(n as f64), geometric),
            tol,
            None,
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn params_reject_small_k() {
        assert_eq!(DeformationParams::new(1), Err(Error::InvalidK(1)));
        assert_eq!(DeformationParams::new(0), Err(Error::InvalidK(0)));
        assert!(DeformationParams::new(65).is_err());
        assert!(DeformationParams::with_tol(3, 0.0).is_err());
        assert!(DeformationParams::with_tol(3, f64::NAN).is_err());
    }

    #[test]
    fn params_invariants() {
        for k in 2..=16 {
            let p = DeformationParams::new(k).unwrap();
            assert!(close(p.q().powi(k as i32), C64::new(1.0, 0.0), 1e-12));
            for j in 1..k {
                assert!(!close(p.q().powi(j as i32), C64::new(1.0, 0.0), 1e-6));
            }
            assert!(close(p.q_half() * p.q_half(), p.q(), 1e-15));
            assert!(close(p.q_bar() * p.q(), C64::new(1.0, 0.0), 1e-15));
            assert!(close(p.q_half_pow(2 * k as i64 + 1), p.q_half(), 1e-15));
            assert!(close(p.q_half_pow(-1), p.q_half().conj(), 1e-15));
        }
    }

    #[test]
    fn qnum_examples() {
        let i = C64::new(0.0, 1.0);
        assert_eq!(qnum(0.0, i).unwrap(), C64::new(0.0, 0.0));
        assert!(close(qnum(1.0, i).unwrap(), C64::new(1.0, 0.0), 1e-15));
        assert!(close(qnum(2.0, i).unwrap(), C64::new(1.0, 1.0), 1e-15));
        assert_eq!(qnum(2.0, C64::new(1.0, 0.0)), Err(Error::DeformationAtOne));
    }

    #[test]
    fn qnum_polar_examples() {
        let p4 = DeformationParams::new(4).unwrap();
        assert!(close(qnum_polar(2.0, &p4), C64::new(1.0, 1.0), 1e-15));
        for k in 2..=12 {
            let p = DeformationParams::new(k).unwrap();
            assert!(qnum_polar(k as f64, &p).norm() < 1e-14);
            assert!(close(qnum_polar(1.0, &p), C64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn qfactorial_examples() {
        let i = C64::new(0.0, 1.0);
        assert_eq!(qfactorial(0, i), C64::new(1.0, 0.0));
        // 1 · (1+i) · i
        assert!(close(qfactorial(3, i), C64::new(-1.0, 1.0), 1e-15));
        for k in 2..=10 {
            let p = DeformationParams::new(k).unwrap();
            assert!(qfactorial(k, p.q()).norm() < 1e-12);
        }
    }

    #[test]
    fn qfactorial_sqrt_examples() {
        let i = C64::new(0.0, 1.0);
        assert_eq!(qfactorial_sqrt(0, i), C64::new(1.0, 0.0));
        assert!(close(qfactorial_sqrt(1, i), C64::new(1.0, 0.0), 1e-15));
        let expected = C64::from_polar(2f64.powf(0.25), PI / 8.0);
        assert!(close(qfactorial_sqrt(2, i), expected, 1e-15));
    }

    #[test]
    fn per_factor_root_differs_from_root_of_product() {
        // k = 5: arg [4]_q! = 6π/5 wraps past π, so the principal root of
        // the product picks the other sign.
        let p = DeformationParams::new(5).unwrap();
        let per_factor = qfactorial_sqrt(4, p.q());
        let whole = qfactorial(4, p.q()).sqrt();
        assert!(close(per_factor, -whole, 1e-12));
    }

    #[test]
    fn conj_identity_examples() {
        let p4 = DeformationParams::new(4).unwrap();
        let r = conj_qnum_identity_check(0, &p4);
        assert!(r.all_passed());
        assert_abs_diff_eq!(r.entries()[0].residual, 0.0);

        // [2]_q̄! = 1 - i and q^{-1}(1 + i) = 1 - i
        assert!(close(qfactorial(2, p4.q_bar()), C64::new(1.0, -1.0), 1e-15));
        assert!(conj_qnum_identity_check(2, &p4).all_passed());

        let p3 = DeformationParams::new(3).unwrap();
        assert!(conj_qnum_identity_check(2, &p3).all_passed());
        for k in 2..=16 {
            let p = DeformationParams::new(k).unwrap();
            for n in 0..=k {
                assert!(conj_qnum_identity_check(n, &p).all_passed(), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn consistency_suite_passes() {
        for k in 2..=16 {
            let p = DeformationParams::new(k).unwrap();
            assert!(qnum_consistency_check(&p).all_passed());
        }
    }

    #[test]
    fn nilpotency_driver() {
        for k in 2..=16 {
            let p = DeformationParams::new(k).unwrap();
            for n in 1..k {
                assert!(p.qnum(n as f64).norm() > 1e-3);
            }
            assert!(p.qnum(k as f64).norm() < 1e-12);
        }
    }
}
