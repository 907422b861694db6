//! Phase states, the Pegg–Barnett phase operator and its exponentials, and
//! the polynomial phase exponentials `E^{±iΦ}` built from the quon algebra.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockrep::QuonRep;
use crate::operator::FockOperator;
use crate::qcore::{principal_pow, qfactorial, qfactorial_sqrt};
use crate::report::{relative_residual, Tag, VerificationReport};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Reference angle `θ₀` and the wrap phases `ω_{±k} = exp(±ikθ₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    k: usize,
    theta0: f64,
    omega_plus: C64,
    omega_minus: C64,
}

impl PhaseConfig {
    pub fn new(k: usize, theta0: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidK(k));
        }
        if !theta0.is_finite() {
            return Err(Error::Config(format!("theta0 must be finite, got {theta0}")));
        }
        let omega_plus = C64::from_polar(1.0, k as f64 * theta0);
        Ok(Self { k, theta0, omega_plus, omega_minus: omega_plus.conj() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn omega_plus(&self) -> C64 {
        self.omega_plus
    }

    pub fn omega_minus(&self) -> C64 {
        self.omega_minus
    }

    /// `ω_{+k}` for `sign = +1`, `ω_{-k}` for `sign = -1`.
    pub fn omega(&self, sign: Sign) -> C64 {
        match sign {
            Sign::Plus => self.omega_plus,
            Sign::Minus => self.omega_minus,
        }
    }
}

/// Sign of the exponent in `e^{±iφ}` and `E^{±iΦ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(&self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Orthonormal phase states `|θ_m⟩ = Σ_n exp(inθ_m)/√k |n⟩`,
/// `θ_m = θ₀ + 2πm/k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseBasis {
    pub thetas: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl PhaseBasis {
    pub fn k(&self) -> usize {
        self.thetas.len()
    }

    /// Change-of-basis matrix with `|θ_m⟩` as column `m`.
    pub fn matrix(&self) -> FockOperator {
        FockOperator::from_fn(self.k(), |n, m| self.vectors[m][n])
    }

    /// `Σ_m f(θ_m) |θ_m⟩⟨θ_m|`.
    pub fn spectral(&self, f: impl Fn(f64) -> C64) -> FockOperator {
        let k = self.k();
        let mut out = FockOperator::zeros(k);
        for (theta, v) in self.thetas.iter().zip(&self.vectors) {
            let w = f(*theta);
            for r in 0..k {
                for c in 0..k {
                    out.set(r, c, out.entry(r, c) + w * v[r] * v[c].conj());
                }
            }
        }
        out
    }
}

pub fn phase_states(k: usize, cfg: &PhaseConfig) -> Result<PhaseBasis> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if k != cfg.k() {
        return Err(Error::ParamsMismatch { left: k, right: cfg.k() });
    }
    let norm = (k as f64).sqrt().recip();
    let thetas: Vec<f64> = (0..k).map(|m| cfg.theta0() + 2.0 * PI * m as f64 / k as f64).collect();
    let vectors = thetas
        .iter()
        .map(|&theta| (0..k).map(|n| C64::from_polar(norm, n as f64 * theta)).collect())
        .collect();
    Ok(PhaseBasis { thetas, vectors })
}

/// `φ = Σ_m θ_m |θ_m⟩⟨θ_m|`.
pub fn phase_operator(basis: &PhaseBasis) -> FockOperator {
    basis.spectral(|theta| C64::new(theta, 0.0))
}

/// `e^{±iφ}` from the spectral decomposition of `φ`.
pub fn exp_phase_spectral(basis: &PhaseBasis, sign: Sign) -> FockOperator {
    basis.spectral(|theta| C64::from_polar(1.0, sign.value() * theta))
}

/// `e^{+iφ} = Σ_{n≥1} |n-1⟩⟨n| + ω_{+k}|k-1⟩⟨0|` and its adjoint pattern
/// `e^{-iφ} = Σ_{n≥1} |n⟩⟨n-1| + ω_{-k}|0⟩⟨k-1|`, built from matrix units.
pub fn exp_phase_shift(cfg: &PhaseConfig, sign: Sign) -> FockOperator {
    let k = cfg.k();
    let mut m = FockOperator::zeros(k);
    for n in 1..k {
        match sign {
            Sign::Plus => m.set(n - 1, n, ONE),
            Sign::Minus => m.set(n, n - 1, ONE),
        }
    }
    match sign {
        Sign::Plus => m.set(k - 1, 0, cfg.omega_plus()),
        Sign::Minus => m.set(0, k - 1, cfg.omega_minus()),
    }
    m
}

/// Tolerance for the spectral/shift comparison.
pub const EXP_PHASE_TOL: f64 = 1e-10;

/// Builds `e^{±iφ}` both ways and returns the shift-matrix form when they
/// agree to [`EXP_PHASE_TOL`].
pub fn exp_phase(basis: &PhaseBasis, cfg: &PhaseConfig, sign: Sign) -> Result<FockOperator> {
    let spectral = exp_phase_spectral(basis, sign);
    let shift = exp_phase_shift(cfg, sign);
    let residual = relative_residual(spectral.matrix(), shift.matrix());
    if residual <= EXP_PHASE_TOL {
        Ok(shift)
    } else {
        Err(Error::Mismatch {
            name: "exp_phase",
            residual,
            detail: format!(
                "spectral = {}, shift = {}",
                serde_json::to_string(&spectral).expect("finite"),
                serde_json::to_string(&shift).expect("finite")
            ),
        })
    }
}

/// `op^k = expected · I`.
pub fn periodicity_check(op: &FockOperator, k: usize, expected: C64, tag: Tag, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let power = op.pow(k as u32);
    let target = FockOperator::identity(op.dim()).scale(expected);
    let residual = relative_residual(power.matrix(), target.matrix());
    report.record(
        tag,
        k,
        [("expected", format!("{}{:+}i", expected.re, expected.im))],
        residual,
        tol,
        Some(format!("norm of op^k - expected*I = {:.3e}", (&power - &target).norm())),
    );
    report
}

/// Phase basis, phase operator and `e^{±iφ}` checks.
pub fn phase_basis_check(cfg: &PhaseConfig, tol: f64) -> Result<VerificationReport> {
    let k = cfg.k();
    let basis = phase_states(k, cfg)?;
    let theta_label = || ("theta0", format!("{}", cfg.theta0()));
    let mut report = VerificationReport::new();
    let b = basis.matrix();
    let id = FockOperator::identity(k);

    let gram = &b.adjoint() * &b;
    report.record(Tag::Eq70, k, [theta_label()], relative_residual(gram.matrix(), id.matrix()), tol, None);
    let round_trip = &b * &b.adjoint();
    report.record(Tag::Eq73, k, [theta_label()], relative_residual(round_trip.matrix(), id.matrix()), tol, None);

    let phi = phase_operator(&basis);
    report.record(
        Tag::Eq74,
        k,
        [theta_label(), ("check", "hermitean".to_string())],
        relative_residual(phi.matrix(), phi.adjoint().matrix()),
        tol,
        None,
    );
    let mut eigen = 0.0f64;
    for (theta, v) in basis.thetas.iter().zip(&basis.vectors) {
        let image = phi.apply(v);
        let err: f64 = image
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        eigen = eigen.max(err / theta.abs().max(1.0));
    }
    report.record(Tag::Eq74, k, [theta_label(), ("check", "eigenvectors".to_string())], eigen, tol, None);

    for sign in [Sign::Plus, Sign::Minus] {
        let spectral = exp_phase_spectral(&basis, sign);
        let shift = exp_phase_shift(cfg, sign);
        let residual = relative_residual(spectral.matrix(), shift.matrix());
        let detail = (residual > EXP_PHASE_TOL.max(tol)).then(|| {
            format!(
                "spectral = {}, shift = {}",
                serde_json::to_string(&spectral).expect("finite"),
                serde_json::to_string(&shift).expect("finite")
            )
        });
        report.record(
            Tag::Eq75,
            k,
            [theta_label(), ("sign", sign.label().to_string())],
            residual,
            EXP_PHASE_TOL.max(tol),
            detail,
        );
        report.extend(shift_action_check(&shift, cfg, sign, tol));
        report.extend(periodicity_check(&shift, k, cfg.omega(sign), Tag::Eq81, tol).tagged_with(
            [theta_label(), ("sign", sign.label().to_string())],
        ));
    }
    let plus = exp_phase_shift(cfg, Sign::Plus);
    let minus = exp_phase_shift(cfg, Sign::Minus);
    report.record(
        Tag::Eq75,
        k,
        [theta_label(), ("check", "e^{+i phi} e^{-i phi} = I".to_string())],
        relative_residual((&plus * &minus).matrix(), id.matrix()),
        tol,
        None,
    );
    Ok(report)
}

/// `e^{+iφ}|n⟩ = |n-1⟩`, `e^{+iφ}|0⟩ = ω_{+k}|k-1⟩` and the mirrored
/// actions of `e^{-iφ}`, column by column.
fn shift_action_check(op: &FockOperator, cfg: &PhaseConfig, sign: Sign, tol: f64) -> VerificationReport {
    let k = cfg.k();
    let mut worst = 0.0f64;
    for n in 0..k {
        let mut basis = vec![ZERO; k];
        basis[n] = ONE;
        let image = op.apply(&basis);
        let mut expected = vec![ZERO; k];
        match sign {
            Sign::Plus if n == 0 => expected[k - 1] = cfg.omega_plus(),
            Sign::Plus => expected[n - 1] = ONE,
            Sign::Minus if n == k - 1 => expected[0] = cfg.omega_minus(),
            Sign::Minus => expected[n + 1] = ONE,
        }
        let err: f64 = image.iter().zip(&expected).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(err);
    }
    let tag = match sign {
        Sign::Plus => Tag::Eq76,
        Sign::Minus => Tag::Eq77,
    };
    let mut report = VerificationReport::new();
    report.record(tag, k, [("theta0", format!("{}", cfg.theta0()))], worst, tol, None);
    report
}

/// `E^{+iΦ} = ([k-1]_q!)^{-1/k} [a₋ + ω_{+k} (a₊)^{k-1}]` and
/// `E^{-iΦ} = ([k-1]_q̄!)^{-1/k} [a₋⁺ + ω_{-k} (a₊⁺)^{k-1}]`, principal k-th root.
pub fn quon_phase(rep: &QuonRep, cfg: &PhaseConfig, sign: Sign) -> FockOperator {
    let k = rep.k();
    let params = rep.params;
    let (deformation, lower, raise) = match sign {
        Sign::Plus => (params.q(), &rep.a_minus, &rep.a_plus),
        Sign::Minus => (params.q_bar(), &rep.a_minus_dag, &rep.a_plus_dag),
    };
    let prefactor = principal_pow(qfactorial(k - 1, deformation), -1.0 / k as f64);
    let wrap = raise.pow(k as u32 - 1).scale(cfg.omega(sign));
    (lower + &wrap).scale(prefactor)
}

/// Actions of `E^{±iΦ}` on the number basis, diagonality of both products,
/// periodicity `(E^{±iΦ})^k = ω_{±k} I`, and the unitarity structure.
pub fn quon_phase_check(rep: &QuonRep, cfg: &PhaseConfig) -> VerificationReport {
    let k = rep.k();
    let params = rep.params;
    let tol = params.tol();
    let theta_label = || ("theta0", format!("{}", cfg.theta0()));
    let mut report = VerificationReport::new();
    let plus = quon_phase(rep, cfg, Sign::Plus);
    let minus = quon_phase(rep, cfg, Sign::Minus);

    // E^{+iΦ}|n⟩ = c^{-1/k} sqrt([n]_q)|n-1⟩, wrap c^{1/2-1/k} ω_{+k}|k-1⟩
    let c_plus = qfactorial(k - 1, params.q());
    let pre_plus = principal_pow(c_plus, -1.0 / k as f64);
    let expected_plus = FockOperator::from_fn(k, |row, col| {
        if col == 0 && row == k - 1 {
            pre_plus * qfactorial_sqrt(k - 1, params.q()) * cfg.omega_plus()
        } else if col >= 1 && row == col - 1 {
            pre_plus * params.qnum(col as f64).sqrt()
        } else {
            ZERO
        }
    });
    report.record(
        Tag::Eq84,
        k,
        [theta_label()],
        relative_residual(plus.matrix(), expected_plus.matrix()),
        tol,
        None,
    );

    // E^{-iΦ}|n⟩ = c̄^{-1/k} sqrt([n+1]_q̄)|n+1⟩, wrap c̄^{1/2-1/k} ω_{-k}|0⟩
    let c_minus = qfactorial(k - 1, params.q_bar());
    let pre_minus = principal_pow(c_minus, -1.0 / k as f64);
    let expected_minus = FockOperator::from_fn(k, |row, col| {
        if col == k - 1 && row == 0 {
            pre_minus * qfactorial_sqrt(k - 1, params.q_bar()) * cfg.omega_minus()
        } else if row == col + 1 {
            pre_minus * params.qnum_bar(row as f64).sqrt()
        } else {
            ZERO
        }
    });
    report.record(
        Tag::Eq85,
        k,
        [theta_label()],
        relative_residual(minus.matrix(), expected_minus.matrix()),
        tol,
        None,
    );

    for (label, product) in [("E+ E-", &plus * &minus), ("E- E+", &minus * &plus)] {
        let off = product.off_diagonal_norm() / product.norm().max(1.0);
        report.record(
            Tag::Eq85,
            k,
            [theta_label(), ("check", format!("{label} diagonal"))],
            off,
            tol,
            None,
        );
    }

    for (sign, op) in [(Sign::Plus, &plus), (Sign::Minus, &minus)] {
        report.extend(
            periodicity_check(op, k, cfg.omega(sign), Tag::Eq86, tol)
                .tagged_with([theta_label(), ("sign", sign.label().to_string())]),
        );
    }

    // E^{±iΦ} is a weighted cyclic shift, unitary iff every |[n]_q| = 1
    // for n < k, which happens only for k ≤ 3.
    let unitary_expected = k <= 3;
    let id = rep.identity();
    let deviation = relative_residual((&plus * &plus.adjoint()).matrix(), id.matrix());
    let (residual, detail) = if unitary_expected {
        (deviation, "E E^dag = I expected for k <= 3".to_string())
    } else {
        let indicator = if deviation > tol { 0.0 } else { 1.0 };
        (indicator, format!("non-unitary expected; |E E^dag - I| = {deviation:.3e}"))
    };
    report.record(Tag::Eq84, k, [theta_label(), ("check", "unitarity".to_string())], residual, tol, Some(detail));

    if k == 2 && cfg.theta0() == 0.0 {
        report.record(
            Tag::Eq84,
            k,
            [theta_label(), ("check", "hermitean".to_string())],
            relative_residual(plus.matrix(), plus.adjoint().matrix()),
            tol,
            None,
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockrep::build_rep;
    use crate::qcore::DeformationParams;
    use nalgebra::DMatrix;

    fn cfg(k: usize, theta0: f64) -> PhaseConfig {
        PhaseConfig::new(k, theta0).unwrap()
    }

    /// Taylor series with scaling and squaring.
    fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
        let n = a.nrows();
        let mut s = 0;
        let mut scaled = a.clone();
        while scaled.norm() > 0.25 {
            scaled /= C64::new(2.0, 0.0);
            s += 1;
        }
        let mut sum = DMatrix::<C64>::identity(n, n);
        let mut term = DMatrix::<C64>::identity(n, n);
        for j in 1..30 {
            term = &term * &scaled / C64::new(j as f64, 0.0);
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn config_invariants() {
        for theta0 in [0.0, 0.3, PI / 7.0, -2.0] {
            let c = cfg(5, theta0);
            assert!((c.omega_plus() * c.omega_minus() - ONE).norm() < 1e-15);
            assert!((c.omega_plus().norm() - 1.0).abs() < 1e-15);
        }
        assert!(PhaseConfig::new(1, 0.0).is_err());
        assert!(PhaseConfig::new(3, f64::NAN).is_err());
    }

    #[test]
    fn k2_phase_states() {
        let b = phase_states(2, &cfg(2, 0.0)).unwrap();
        let r = 0.5f64.sqrt();
        assert!((b.vectors[0][0] - r).norm() < 1e-15 && (b.vectors[0][1] - r).norm() < 1e-15);
        assert!((b.vectors[1][0] - r).norm() < 1e-15 && (b.vectors[1][1] + r).norm() < 1e-15);
        assert!(phase_states(3, &cfg(2, 0.0)).is_err());
    }

    #[test]
    fn phase_operator_spectrum() {
        let basis = phase_states(3, &cfg(3, 0.0)).unwrap();
        let phi = phase_operator(&basis);
        let mut eig: Vec<f64> = phi.matrix().clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let expected = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (a, b) in eig.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{eig:?}");
        }
        for (m, v) in basis.vectors.iter().enumerate() {
            let image = phi.apply(v);
            let expectation: C64 = v.iter().zip(&image).map(|(a, b)| a.conj() * b).sum();
            assert!((expectation - basis.thetas[m]).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_matches_taylor_series_and_shift() {
        for k in 2..=8 {
            for theta0 in [0.0, 0.3, PI / 7.0] {
                let c = cfg(k, theta0);
                let basis = phase_states(k, &c).unwrap();
                let phi = phase_operator(&basis);
                for sign in [Sign::Plus, Sign::Minus] {
                    let series = expm(&(phi.matrix() * C64::new(0.0, sign.value())));
                    let spectral = exp_phase_spectral(&basis, sign);
                    assert!((spectral.matrix() - &series).norm() < 1e-10, "k={k}");
                    let shift = exp_phase(&basis, &c, sign).unwrap();
                    assert_eq!(shift, exp_phase_shift(&c, sign));
                }
            }
        }
    }

    #[test]
    fn k3_shift_is_cyclic_permutation() {
        let m = exp_phase_shift(&cfg(3, 0.0), Sign::Plus);
        let expected = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(m.entry(r, c), C64::new(expected[r][c], 0.0));
            }
        }
    }

    #[test]
    fn exp_phase_mismatch_is_reported() {
        let basis = phase_states(4, &cfg(4, 0.0)).unwrap();
        let err = exp_phase(&basis, &cfg(4, 0.3), Sign::Plus).unwrap_err();
        assert!(matches!(err, Error::Mismatch { .. }));
    }

    #[test]
    fn periodicity_and_negative_control() {
        for k in 2..=8 {
            let c = cfg(k, 0.3);
            let shift = exp_phase_shift(&c, Sign::Plus);
            assert!(periodicity_check(&shift, k, c.omega_plus(), Tag::Eq81, 1e-9).all_passed());
            assert!(!periodicity_check(&shift, k - 1, c.omega_plus(), Tag::Eq81, 1e-9).all_passed());
        }
    }

    #[test]
    fn basis_suite_passes() {
        for k in 2..=12 {
            for theta0 in [0.0, 0.3, PI / 7.0] {
                let r = phase_basis_check(&cfg(k, theta0), 1e-9).unwrap();
                assert!(r.all_passed(), "{r}");
            }
        }
    }

    #[test]
    fn k2_quon_phase_is_pauli_x() {
        let rep = build_rep(DeformationParams::new(2).unwrap());
        let e = quon_phase(&rep, &cfg(2, 0.0), Sign::Plus);
        let x = FockOperator::from_fn(2, |r, c| if r != c { ONE } else { ZERO });
        assert!((&e - &x).norm() < 1e-15);
        assert!((&(&e * &e) - &FockOperator::identity(2)).norm() < 1e-15);
    }

    #[test]
    fn quon_phase_wrap_coefficient() {
        let params = DeformationParams::new(5).unwrap();
        let rep = build_rep(params);
        let c = cfg(5, 0.3);
        let e = quon_phase(&rep, &c, Sign::Plus);
        let fact = qfactorial(4, params.q());
        let roots: C64 = (1..=4).map(|j| params.qnum(j as f64).sqrt()).product();
        let expected = roots * principal_pow(fact, -0.2) * c.omega_plus();
        assert!((e.entry(4, 0) - expected).norm() < 1e-12);
        assert!((e.entry(4, 0).norm() - fact.norm().powf(0.3)).abs() < 1e-12);
    }

    #[test]
    fn quon_phase_suite_passes() {
        for k in 2..=10 {
            let rep = build_rep(DeformationParams::new(k).unwrap());
            for theta0 in [0.0, 0.3, PI / 7.0] {
                let r = quon_phase_check(&rep, &cfg(k, theta0));
                assert!(r.all_passed(), "{r}");
            }
        }
    }

    #[test]
    fn quon_phase_unitarity_by_k() {
        for k in 2..=8 {
            let rep = build_rep(DeformationParams::new(k).unwrap());
            let e = quon_phase(&rep, &cfg(k, 0.0), Sign::Plus);
            let dev = (&(&e * &e.adjoint()) - &FockOperator::identity(k)).norm();
            if k <= 3 {
                assert!(dev < 1e-12, "k={k}");
            } else {
                assert!(dev > 1e-3, "k={k}");
            }
        }
    }

    #[test]
    fn periodicity_matches_shift_phase() {
        for k in 3..=8 {
            let rep = build_rep(DeformationParams::new(k).unwrap());
            let c = cfg(k, 0.3);
            let e = quon_phase(&rep, &c, Sign::Minus).pow(k as u32);
            let s = exp_phase_shift(&c, Sign::Minus).pow(k as u32);
            assert!((&e - &s).norm() < 1e-9);
        }
    }
}
