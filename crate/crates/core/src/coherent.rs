//! k-fermionic coherent states with Grassmann-valued amplitudes, their
//! scalar products and resolution of the identity, the coherence factor, and
//! the `Q → q` limit producing fractional supercoherent states.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockrep::QuonRep;
use crate::grassmann::GrassmannElement;
use crate::operator::FockOperator;
use crate::qcore::{qfactorial, qfactorial_sqrt, DeformationParams};
use crate::report::{relative_residual, Tag, VerificationReport};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Default truncation of the bosonic sector of a supercoherent state.
pub const DEFAULT_R_MAX: usize = 8;

/// Which Grassmann variable labels a coherent ket (or bra).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    /// `|z)` and `(z|`.
    Z,
    /// `|z̄)` and `(z̄|`.
    Zbar,
}

/// A Fock-space vector with Grassmann-valued components `ψ_n`, `n = 0..k-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannState {
    pub params: DeformationParams,
    pub variable: Variable,
    pub components: Vec<GrassmannElement>,
}

impl GrassmannState {
    /// `Σ_n M_{mn} ψ_n` in slot `m`.
    pub fn apply(&self, op: &FockOperator) -> GrassmannState {
        let k = self.params.k();
        assert_eq!(op.dim(), k);
        let components = (0..k)
            .map(|row| {
                (0..k).fold(GrassmannElement::zero(self.params), |acc, col| {
                    let entry = op.entry(row, col);
                    if entry == ZERO {
                        acc
                    } else {
                        acc.try_add(&self.components[col].scale(entry)).expect("same params")
                    }
                })
            })
            .collect();
        GrassmannState { components, ..self.clone() }
    }

    /// Left-multiplies every component by `x`.
    pub fn left_multiply(&self, x: &GrassmannElement) -> Result<GrassmannState> {
        let components = self
            .components
            .iter()
            .map(|c| x.multiply(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(GrassmannState { components, ..self.clone() })
    }
}

/// Component `n` of `|z)`, also the bra `(z̄|`: `z^n / sqrt([n]_q!)`.
fn z_component(params: DeformationParams, n: usize) -> GrassmannElement {
    GrassmannElement::monomial(params, n, 0, qfactorial_sqrt(n, params.q()).inv())
}

/// Component `n` of `|z̄)`, also the bra `(z|`: `z̄^n / sqrt([n]_q̄!)`.
fn zbar_component(params: DeformationParams, n: usize) -> GrassmannElement {
    GrassmannElement::monomial(params, 0, n, qfactorial_sqrt(n, params.q_bar()).inv())
}

fn component(variable: Variable, params: DeformationParams, n: usize) -> GrassmannElement {
    match variable {
        Variable::Z => z_component(params, n),
        Variable::Zbar => zbar_component(params, n),
    }
}

/// `|z) = Σ z^n / sqrt([n]_q!) |n⟩`.
pub fn coherent_ket(params: DeformationParams) -> GrassmannState {
    GrassmannState {
        params,
        variable: Variable::Z,
        components: (0..params.k()).map(|n| z_component(params, n)).collect(),
    }
}

/// `|z̄) = Σ z̄^n / sqrt([n]_q̄!) |n⟩`.
pub fn coherent_ket_bar(params: DeformationParams) -> GrassmannState {
    GrassmannState {
        params,
        variable: Variable::Zbar,
        components: (0..params.k()).map(|n| zbar_component(params, n)).collect(),
    }
}

/// `|z)` is an eigenvector of `a₋` with eigenvalue `z`; `|z̄)` one of `a₊⁺`
/// with eigenvalue `z̄`. One entry per Fock component.
pub fn eigenstate_check(rep: &QuonRep, state: &GrassmannState) -> Result<VerificationReport> {
    if rep.k() != state.params.k() {
        return Err(Error::ParamsMismatch { left: rep.k(), right: state.params.k() });
    }
    let params = state.params;
    let (tag, op, eigenvalue) = match state.variable {
        Variable::Z => (Tag::Eq39, &rep.a_minus, GrassmannElement::z(params)),
        Variable::Zbar => (Tag::Eq40, &rep.a_plus_dag, GrassmannElement::zbar(params)),
    };
    let lhs = state.apply(op);
    let rhs = state.left_multiply(&eigenvalue)?;
    let mut report = VerificationReport::new();
    for (n, (l, r)) in lhs.components.iter().zip(&rhs.components).enumerate() {
        report.record(
            tag,
            params.k(),
            [("component", n.to_string())],
            l.relative_distance(r),
            params.tol(),
            None,
        );
    }
    Ok(report)
}

/// `(bra|ket) = Σ_n bra_n · ket_n` in normal form. The bra `(z|` carries
/// `z̄^n / sqrt([n]_q̄!)` and `(z̄|` carries `z^n / sqrt([n]_q!)`.
pub fn scalar_product(bra: Variable, ket: Variable, params: DeformationParams) -> GrassmannElement {
    let bra_component = |n| match bra {
        Variable::Z => zbar_component(params, n),
        Variable::Zbar => z_component(params, n),
    };
    (0..params.k()).fold(GrassmannElement::zero(params), |acc, n| {
        let term = bra_component(n)
            .multiply(&component(ket, params, n))
            .expect("same params");
        acc.try_add(&term).expect("same params")
    })
}

fn truncated_exp(x: &GrassmannElement, deformation: C64) -> GrassmannElement {
    let params = *x.params();
    let mut power = GrassmannElement::one(params);
    let mut sum = GrassmannElement::zero(params);
    for n in 0..params.k() {
        sum = sum
            .try_add(&power.scale(qfactorial(n, deformation).inv()))
            .expect("same params");
        power = power.multiply(x).expect("same params");
    }
    sum
}

/// `e_q(x) = Σ_{n<k} x^n / [n]_q!`.
pub fn qexp(x: &GrassmannElement) -> GrassmannElement {
    truncated_exp(x, x.params().q())
}

/// `e_q̄(x) = Σ_{n<k} x^n / [n]_q̄!`.
pub fn qexp_bar(x: &GrassmannElement) -> GrassmannElement {
    truncated_exp(x, x.params().q_bar())
}

/// `(z|z) = Σ (z̄z)^n / [n]_q! = e_q(z̄z)` and `(z̄|z̄) = e_q̄(z z̄)`.
pub fn scalar_product_check(params: DeformationParams) -> VerificationReport {
    let mut report = VerificationReport::new();
    let k = params.k();
    let tol = params.tol();
    let z = GrassmannElement::z(params);
    let zbar = GrassmannElement::zbar(params);
    let zbar_z = zbar.multiply(&z).expect("same params");
    let z_zbar = z.multiply(&zbar).expect("same params");

    let zz = scalar_product(Variable::Z, Variable::Z, params);
    let series = (0..k).fold(GrassmannElement::zero(params), |acc, n| {
        acc.try_add(&zbar_z.pow(n).scale(qfactorial(n, params.q()).inv()))
            .expect("same params")
    });
    report.record(Tag::Eq46, k, [], zz.relative_distance(&series), tol, None);

    let bb = scalar_product(Variable::Zbar, Variable::Zbar, params);
    let series_bar = (0..k).fold(GrassmannElement::zero(params), |acc, n| {
        acc.try_add(&z_zbar.pow(n).scale(qfactorial(n, params.q_bar()).inv()))
            .expect("same params")
    });
    report.record(Tag::Eq47, k, [], bb.relative_distance(&series_bar), tol, None);

    report.record(
        Tag::Eq49,
        k,
        [("side", "(z|z) = e_q(zbar z)".to_string())],
        zz.relative_distance(&qexp(&zbar_z)),
        tol,
        None,
    );
    report.record(
        Tag::Eq49,
        k,
        [("side", "(zbar|zbar) = e_qbar(z zbar)".to_string())],
        bb.relative_distance(&qexp_bar(&z_zbar)),
        tol,
        None,
    );
    report
}

/// `μ(z, z̄) = Σ_n ([n]_q! [n]_q̄!)^{1/2} z^(k-1-n) z̄^(k-1-n)`, the root
/// taken factor by factor.
pub fn measure_mu(params: DeformationParams) -> GrassmannElement {
    let k = params.k();
    (0..k).fold(GrassmannElement::zero(params), |acc, n| {
        let weight = qfactorial_sqrt(n, params.q()) * qfactorial_sqrt(n, params.q_bar());
        let p = k - 1 - n;
        acc.try_add(&GrassmannElement::monomial(params, p, p, weight))
            .expect("same params")
    })
}

/// `μ(z̄, z)`: the same weights on the anti-normal monomials `z̄^p z^p`.
pub fn measure_mu_reversed(params: DeformationParams) -> GrassmannElement {
    let k = params.k();
    let z = GrassmannElement::z(params);
    let zbar = GrassmannElement::zbar(params);
    (0..k).fold(GrassmannElement::zero(params), |acc, n| {
        let weight = qfactorial_sqrt(n, params.q()) * qfactorial_sqrt(n, params.q_bar());
        let p = k - 1 - n;
        let mono = zbar.pow(p).multiply(&z.pow(p)).expect("same params");
        acc.try_add(&mono.scale(weight)).expect("same params")
    })
}

/// Conventions for the two resolutions of the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegrandOrdering {
    /// `∫dz |z) μ(z,z̄) (z| dz̄`: integrand `ψ_n · μ · φ_n'` multiplied in
    /// that order and normal-ordered; `∫dz` then `∫dz̄` on the normal form.
    KetZ,
    /// `∫dz̄ |z̄) μ(z̄,z) (z̄| dz`: same factor order; each differential acts
    /// on its adjacent variable, so the integrand is read in anti-normal
    /// order `z̄^b z^a` and the `z̄^(k-1) z^(k-1)` coefficient is taken.
    KetZbar,
}

impl IntegrandOrdering {
    pub fn describe(&self) -> &'static str {
        match self {
            Self::KetZ => "dz |z) mu(z,zbar) (z| dzbar; factors ket*mu*bra; integrate z then zbar on normal form",
            Self::KetZbar => "dzbar |zbar) mu(zbar,z) (zbar| dz; factors ket*mu*bra; top coefficient in anti-normal order",
        }
    }
}

/// The `k × k` matrix `M_{n n'}` of the resolution of the identity under
/// `ordering`.
pub fn overcompleteness_matrix(params: DeformationParams, ordering: IntegrandOrdering) -> FockOperator {
    let k = params.k();
    let top = k - 1;
    let (ket, mu, bra): (Variable, GrassmannElement, Variable) = match ordering {
        IntegrandOrdering::KetZ => (Variable::Z, measure_mu(params), Variable::Z),
        IntegrandOrdering::KetZbar => (Variable::Zbar, measure_mu_reversed(params), Variable::Zbar),
    };
    // the bra (z| has z̄ components and vice versa
    let bra_component = |n| match bra {
        Variable::Z => zbar_component(params, n),
        Variable::Zbar => z_component(params, n),
    };
    FockOperator::from_fn(k, |n, n_prime| {
        let integrand = component(ket, params, n)
            .multiply(&mu)
            .and_then(|x| x.multiply(&bra_component(n_prime)))
            .expect("same params");
        match ordering {
            IntegrandOrdering::KetZ => integrand.berezin_z().berezin_zbar().coeff(0, 0),
            IntegrandOrdering::KetZbar => integrand.anti_normal_coeff(top, top),
        }
    })
}

/// Both resolutions of the identity must give the unit matrix.
pub fn overcompleteness_check(rep: &QuonRep) -> VerificationReport {
    let params = rep.params;
    let mut report = VerificationReport::new();
    let id = rep.identity();
    for ordering in [IntegrandOrdering::KetZ, IntegrandOrdering::KetZbar] {
        let m = overcompleteness_matrix(params, ordering);
        let residual = relative_residual(m.matrix(), id.matrix());
        let detail = if residual <= params.tol() {
            None
        } else {
            Some(format!("matrix = {}", serde_json::to_string(&m).expect("finite matrix")))
        };
        report.record(
            Tag::Eq51,
            params.k(),
            [("ordering", ordering.describe().to_string())],
            residual,
            params.tol(),
            detail,
        );
    }
    report
}

/// `g^(m) = q^{-m(m-1)/4} θ(k-1-m)`.
pub fn coherence_factor(m: i64, params: &DeformationParams) -> Result<C64> {
    if m < 1 {
        return Err(Error::InvalidOrder(m));
    }
    if m > params.k() as i64 - 1 {
        return Ok(ZERO);
    }
    Ok(params.q_half_pow(-(m * (m - 1) / 2)))
}

/// The scalar `c` with `z̄^m z^m = c (z̄z)^m` in normal form, or zero when
/// both sides vanish.
pub fn coherence_factor_monomial_ratio(m: i64, params: &DeformationParams) -> Result<C64> {
    if m < 1 {
        return Err(Error::InvalidOrder(m));
    }
    let m = m as usize;
    let z = GrassmannElement::z(*params);
    let zbar = GrassmannElement::zbar(*params);
    let lhs = zbar.pow(m).multiply(&z.pow(m)).expect("same params");
    let rhs = zbar.multiply(&z).expect("same params").pow(m);
    if lhs.is_zero() && rhs.is_zero() {
        return Ok(ZERO);
    }
    match (lhs.pure_phase(m, m), rhs.pure_phase(m, m)) {
        (Some(e_lhs), Some(e_rhs)) => Ok(params.q_half_pow(e_lhs - e_rhs)),
        _ => Ok(lhs.coeff(m, m) / rhs.coeff(m, m)),
    }
}

/// Closed form against the monomial ratio for `m = 1..=m_max`; the two must
/// agree bit for bit.
pub fn coherence_factor_check(m_max: i64, params: &DeformationParams) -> VerificationReport {
    let mut report = VerificationReport::new();
    let k = params.k();
    for m in 1..=m_max {
        let closed = coherence_factor(m, params).expect("m >= 1");
        let ratio = coherence_factor_monomial_ratio(m, params).expect("m >= 1");
        let residual = (closed - ratio).norm();
        report.record(
            Tag::Eq57,
            k,
            [("m", m.to_string())],
            residual,
            params.tol(),
            Some(format!("g = {}{:+}i; bitwise equal: {}", closed.re, closed.im, closed == ratio)),
        );
        if k == 2 {
            let expected = if m == 1 { ONE } else { ZERO };
            report.record(Tag::Eq58, k, [("m", m.to_string())], (closed - expected).norm(), params.tol(), None);
        }
    }
    report
}

/// Which of the two limit ratios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitRatio {
    /// `[k]_Q / [rk]_Q → 1/r`.
    Block,
    /// `[s]_Q / [rk+s]_Q → 1`.
    Offset,
}

impl LimitRatio {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Block => "k/rk",
            Self::Offset => "s/rk+s",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub ratio: LimitRatio,
    pub eps: f64,
    pub value: C64,
    pub expected: f64,
    pub abs_err: f64,
}

/// `[n]_Q` at the radial point `Q = q(1 - ε)` using integer powers.
fn radial_qnum(n: usize, deformation: C64) -> C64 {
    (ONE - deformation.powi(n as i32)) / (ONE - deformation)
}

/// Evaluates the limit ratio at `Q = q(1 - ε)`.
pub fn limit_ratio(ratio: LimitRatio, r: usize, s: usize, eps: f64, params: &DeformationParams) -> LimitPoint {
    let k = params.k();
    let deformation = params.q() * (1.0 - eps);
    let (value, expected) = match ratio {
        LimitRatio::Block => (
            radial_qnum(k, deformation) / radial_qnum(r * k, deformation),
            1.0 / r as f64,
        ),
        LimitRatio::Offset => (
            radial_qnum(s, deformation) / radial_qnum(r * k + s, deformation),
            1.0,
        ),
    };
    LimitPoint { ratio, eps, value, expected, abs_err: (value - expected).norm() }
}

/// First-order coefficient `C` in `|ratio(ε) - limit| ≈ C ε` along the radial
/// path: `k(r-1)/(2r)` for the block ratio and `rk / |1 - q^s|` for the
/// offset ratio.
pub fn limit_slope(ratio: LimitRatio, r: usize, s: usize, params: &DeformationParams) -> f64 {
    let k = params.k() as f64;
    let r = r as f64;
    match ratio {
        LimitRatio::Block => k * (r - 1.0) / (2.0 * r),
        LimitRatio::Offset => r * k / (ONE - params.q_pow(s as i64)).norm(),
    }
}

fn validate_schedule(eps_schedule: &[f64]) -> Result<()> {
    if eps_schedule.is_empty() {
        return Err(Error::Config("empty epsilon schedule".into()));
    }
    if eps_schedule.iter().any(|&e| !(e > 0.0 && e <= 0.1)) {
        return Err(Error::Config("epsilon values must lie in (0, 0.1]".into()));
    }
    if eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("epsilon schedule must be strictly decreasing".into()));
    }
    Ok(())
}

/// Convergence of both limit ratios along `eps_schedule`.
///
/// Each entry's residual is the observed first-order coefficient
/// `max_ε |err(ε)| / ε`, checked against twice the analytic coefficient
/// (floored at 1e-6 for ratios that are exact). Errors must also decrease
/// along the schedule; a violation fails the entry and carries the trace.
/// For `s = 0` the offset ratio is the `0/0`-free constant 0 rather than a
/// limit of 1, so it is flagged and skipped.
pub fn limit_ratios(r: usize, s: usize, eps_schedule: &[f64], params: &DeformationParams) -> Result<VerificationReport> {
    if r < 1 {
        return Err(Error::Config("block index r must be at least 1".into()));
    }
    if s >= params.k() {
        return Err(Error::Config(format!("offset s = {s} must be below k = {}", params.k())));
    }
    validate_schedule(eps_schedule)?;
    let k = params.k();
    let mut report = VerificationReport::new();
    for (tag, ratio) in [(Tag::Eq64a, LimitRatio::Block), (Tag::Eq64b, LimitRatio::Offset)] {
        let labels = [("r", r.to_string()), ("s", s.to_string())];
        if ratio == LimitRatio::Offset && s == 0 {
            report.record(tag, k, labels, 0.0, 1.0, Some("s = 0 excluded: degenerate index".into()));
            continue;
        }
        let trace: Vec<LimitPoint> = eps_schedule
            .iter()
            .map(|&eps| limit_ratio(ratio, r, s, eps, params))
            .collect();
        let observed = trace.iter().map(|p| p.abs_err / p.eps).fold(0.0, f64::max);
        let tol = (2.0 * limit_slope(ratio, r, s, params)).max(1e-6);
        let monotone = trace.windows(2).all(|w| w[1].abs_err <= w[0].abs_err + 1e-15);
        let trace_text = trace
            .iter()
            .map(|p| format!("{:e}:{:.3e}", p.eps, p.abs_err))
            .collect::<Vec<_>>()
            .join(",");
        let (residual, detail) = if monotone {
            (observed, format!("trace eps:err = {trace_text}"))
        } else {
            (f64::MAX, format!("non-monotone error; trace eps:err = {trace_text}"))
        };
        report.record(tag, k, labels, residual, tol, Some(detail));
    }
    Ok(report)
}

/// Truncated `Q`-deformed coherent state `Σ_{n ≤ n_max} Z^n / sqrt([n]_Q!) |n⟩`
/// with `|Q| ≠ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QCoherentTruncation {
    pub deformation: C64,
    pub amplitude: C64,
    pub n_max: usize,
    pub coefficients: Vec<C64>,
}

impl QCoherentTruncation {
    /// `n_max` must reach at least `k` so the truncation straddles a block.
    pub fn new(deformation: C64, amplitude: C64, n_max: usize, k: usize) -> Result<Self> {
        if (deformation.norm() - 1.0).abs() < 1e-12 {
            return Err(Error::Config("Q must lie off the unit circle".into()));
        }
        if n_max < k {
            return Err(Error::Config(format!("n_max = {n_max} must be at least k = {k}")));
        }
        let mut coefficients = Vec::with_capacity(n_max + 1);
        let mut power = ONE;
        let mut root = ONE;
        for n in 0..=n_max {
            if n > 0 {
                power *= amplitude;
                root *= radial_qnum(n, deformation).sqrt();
            }
            coefficients.push(power / root);
        }
        Ok(Self { deformation, amplitude, n_max, coefficients })
    }
}

/// `Σ_r Σ_s c_{r,s} z^s |r⟩ ⊗ |s⟩` with
/// `c_{r,s} = α^r / sqrt(r!) · 1 / sqrt([s]_q!)`, truncated at `r ≤ r_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupercoherentState {
    pub params: DeformationParams,
    pub alpha: C64,
    pub r_max: usize,
    /// `coefficients[r][s]`.
    pub coefficients: Vec<Vec<C64>>,
}

impl SupercoherentState {
    /// `α^r / sqrt(r!)`.
    pub fn bosonic_factor(&self, r: usize) -> C64 {
        let fact: f64 = (1..=r).map(|j| j as f64).product();
        self.alpha.powi(r as i32) / fact.sqrt()
    }

    /// `1 / sqrt([s]_q!)`.
    pub fn fermionic_factor(&self, s: usize) -> C64 {
        qfactorial_sqrt(s, self.params.q()).inv()
    }

    pub fn coefficient(&self, r: usize, s: usize) -> C64 {
        self.coefficients[r][s]
    }

    /// Grassmann amplitude of the Fock level `n = rk + s`.
    pub fn component(&self, n: usize) -> GrassmannElement {
        let k = self.params.k();
        let (r, s) = (n / k, n % k);
        if r > self.r_max {
            return GrassmannElement::zero(self.params);
        }
        GrassmannElement::monomial(self.params, s, 0, self.coefficient(r, s))
    }

    /// `|α|^r_max / sqrt(r_max!)`, the size of the last kept bosonic term.
    pub fn tail_magnitude(&self) -> f64 {
        self.bosonic_factor(self.r_max).norm()
    }

    /// Warning text when the bosonic truncation leaves a tail above `tol`.
    pub fn tail_warning(&self) -> Option<String> {
        let tail = self.tail_magnitude();
        (tail > self.params.tol())
            .then(|| format!("bosonic truncation r_max = {} leaves tail {tail:.3e}", self.r_max))
    }
}

/// Builds the limit state from the double sum over `n = rk + s`.
pub fn supercoherent_limit(alpha: C64, r_max: usize, params: DeformationParams) -> Result<SupercoherentState> {
    if r_max < 1 {
        return Err(Error::Config("r_max must be at least 1".into()));
    }
    let k = params.k();
    let mut coefficients = vec![vec![ZERO; k]; r_max + 1];
    let mut fact = 1.0f64;
    for n in 0..(r_max + 1) * k {
        let (r, s) = (n / k, n % k);
        if s == 0 && r > 0 {
            fact *= r as f64;
        }
        coefficients[r][s] = alpha.powi(r as i32) / fact.sqrt() / qfactorial_sqrt(s, params.q());
    }
    Ok(SupercoherentState { params, alpha, r_max, coefficients })
}

/// Coefficient of `z^s |rk+s⟩` obtained from the truncated `Q`-deformed
/// coherent state at `Q = q(1 - ε)`, with `Z` chosen so that
/// `Z^k / sqrt([k]_Q!) = α`, after dividing out `Z^s`.
pub fn supercoherent_limit_oracle(alpha: C64, r: usize, s: usize, eps: f64, params: &DeformationParams) -> Result<C64> {
    let k = params.k();
    let deformation = params.q() * (1.0 - eps);
    let block_root: C64 = (1..=k).map(|j| radial_qnum(j, deformation).sqrt()).product();
    let amplitude = crate::qcore::principal_pow(alpha * block_root, 1.0 / k as f64);
    let n = r * k + s;
    let truncation = QCoherentTruncation::new(deformation, amplitude, n.max(k), k)?;
    Ok(truncation.coefficients[n] / amplitude.powi(s as i32))
}

/// Index bijection `n ↔ (r, s)`, factorization of the double sum into a
/// bosonic and a k-fermionic coherent state, and the rank-one structure of
/// the coefficient grid.
pub fn supercoherent_check(state: &SupercoherentState) -> VerificationReport {
    let params = state.params;
    let k = params.k();
    let tol = params.tol();
    let mut report = VerificationReport::new();
    let labels = || [("alpha", format!("{}{:+}i", state.alpha.re, state.alpha.im)), ("r_max", state.r_max.to_string())];

    let total = (state.r_max + 1) * k;
    let mut seen = vec![false; total];
    let mut bijective = true;
    for r in 0..=state.r_max {
        for s in 0..k {
            let n = r * k + s;
            bijective &= n < total && !seen[n] && (n / k, n % k) == (r, s);
            if n < total {
                seen[n] = true;
            }
        }
    }
    bijective &= seen.iter().all(|&v| v);
    report.record(
        Tag::Eq69,
        k,
        labels().into_iter().chain([("check", "index bijection".to_string())]),
        if bijective { 0.0 } else { 1.0 },
        tol,
        None,
    );

    let mut worst = 0.0f64;
    for n in 0..total {
        let (r, s) = (n / k, n % k);
        let tensor = state.bosonic_factor(r) * state.fermionic_factor(s);
        let direct = state.component(n).coeff(s, 0);
        worst = worst.max((tensor - direct).norm() / tensor.norm().max(1.0));
    }
    report.record(
        Tag::Eq69,
        k,
        labels().into_iter().chain([("check", "tensor factorization".to_string())]),
        worst,
        tol,
        None,
    );

    let scale = state
        .coefficients
        .iter()
        .flatten()
        .map(|c| c.norm_sqr())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut minor = 0.0f64;
    for r1 in 0..=state.r_max {
        for r2 in r1 + 1..=state.r_max {
            for s1 in 0..k {
                for s2 in s1 + 1..k {
                    let det = state.coefficient(r1, s1) * state.coefficient(r2, s2)
                        - state.coefficient(r1, s2) * state.coefficient(r2, s1);
                    minor = minor.max(det.norm() / scale);
                }
            }
        }
    }
    report.record(
        Tag::Eq69,
        k,
        labels().into_iter().chain([("check", "rank one".to_string())]),
        minor,
        tol,
        state.tail_warning(),
    );
    report
}

/// Relative deviation between the constructed coefficient at `(r, s)` and
/// the `Q → q` oracle at `ε`, over the Fock levels `rk + s ≤ n_max`.
pub fn supercoherent_limit_check(
    state: &SupercoherentState,
    n_max: usize,
    eps: f64,
) -> Result<VerificationReport> {
    let params = state.params;
    let k = params.k();
    let mut report = VerificationReport::new();
    for r in 0..=state.r_max {
        for s in (0..k).filter(|s| r * k + s <= n_max) {
            let oracle = supercoherent_limit_oracle(state.alpha, r, s, eps, &params)?;
            let expected = state.coefficient(r, s);
            let residual = (oracle - expected).norm() / expected.norm().max(1e-300);
            report.record(
                Tag::Eq69,
                k,
                [("check", "Q->q limit".to_string()), ("r", r.to_string()), ("s", s.to_string()), ("eps", format!("{eps:e}"))],
                residual,
                supercoherent_limit_tol(r, s, eps, k),
                None,
            );
        }
    }
    Ok(report)
}

/// Linear-in-ε bound for the relative error of the limit oracle:
/// every deformed factor in `[rk+s]_Q!` contributes at most `(rk+s)/|1-q|`
/// times `ε` to first order.
pub fn supercoherent_limit_tol(r: usize, s: usize, eps: f64, k: usize) -> f64 {
    let n = (r * k + s) as f64;
    let gap = 2.0 * (std::f64::consts::PI / k as f64).sin();
    (2.0 * n * n * eps / gap).max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockrep::build_rep;

    fn p(k: usize) -> DeformationParams {
        DeformationParams::new(k).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ket_components() {
        for k in 2..=8 {
            let ket = coherent_ket(p(k));
            assert_eq!(ket.components[0], GrassmannElement::one(p(k)));
            assert!(ket.components[1].distance(&GrassmannElement::z(p(k))) < 1e-15);
        }
        let ket = coherent_ket(p(4));
        let expected = c(1.0, 1.0).sqrt().inv();
        assert!((ket.components[2].coeff(2, 0) - expected).norm() < 1e-15);
        assert_eq!(ket.components[2].len(), 1);
    }

    #[test]
    fn eigenstates() {
        for k in 2..=12 {
            let rep = build_rep(p(k));
            let r = eigenstate_check(&rep, &coherent_ket(p(k))).unwrap();
            assert!(r.all_passed(), "{r}");
            assert_eq!(r.len(), k);
            let r = eigenstate_check(&rep, &coherent_ket_bar(p(k))).unwrap();
            assert!(r.all_passed(), "{r}");
        }
        let rep = build_rep(p(3));
        assert!(eigenstate_check(&rep, &coherent_ket(p(4))).is_err());
    }

    #[test]
    fn k2_eigenstate_is_exact() {
        let rep = build_rep(p(2));
        let r = eigenstate_check(&rep, &coherent_ket(p(2))).unwrap();
        assert!(r.entries().iter().all(|e| e.residual < 1e-15));
    }

    #[test]
    fn top_component_of_eigen_equation_vanishes() {
        let k = 5;
        let rep = build_rep(p(k));
        let ket = coherent_ket(p(k));
        assert!(ket.apply(&rep.a_minus).components[k - 1].is_zero());
        let z = GrassmannElement::z(p(k));
        assert!(ket.left_multiply(&z).unwrap().components[k - 1].is_zero());
    }

    #[test]
    fn scalar_product_k2_two_terms() {
        let params = p(2);
        let zz = scalar_product(Variable::Z, Variable::Z, params);
        assert_eq!(zz.len(), 2);
        assert!((zz.coeff(0, 0) - ONE).norm() < 1e-15);
        // z̄ z = q^{-1/2} z z̄ = -i z z̄ at k = 2
        assert!((zz.coeff(1, 1) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn scalar_product_constant_term() {
        for k in 2..=8 {
            let zz = scalar_product(Variable::Z, Variable::Z, p(k));
            assert!((zz.coeff(0, 0) - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn scalar_products_are_q_exponentials() {
        for k in 2..=12 {
            let r = scalar_product_check(p(k));
            assert!(r.all_passed(), "k={k}\n{r}");
        }
    }

    #[test]
    fn qexp_examples() {
        let params = p(5);
        assert_eq!(qexp(&GrassmannElement::zero(params)), GrassmannElement::one(params));
        let ez = qexp(&GrassmannElement::z(params));
        for n in 0..5 {
            let expected = qfactorial(n, params.q()).inv();
            assert!((ez.coeff(n, 0) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn measure_examples() {
        for k in 2..=8 {
            let mu = measure_mu(p(k));
            assert!((mu.coeff(k - 1, k - 1) - ONE).norm() < 1e-15);
            let params = p(k);
            let expected = qfactorial(k - 1, params.q()).norm();
            assert!((mu.coeff(0, 0) - expected).norm() < 1e-12 * expected.max(1.0));
        }
        let mu = measure_mu(p(2));
        assert!((mu.coeff(1, 1) - ONE).norm() < 1e-15);
        assert!((mu.coeff(0, 0) - ONE).norm() < 1e-15);
        assert_eq!(mu.len(), 2);
    }

    #[test]
    fn resolution_of_identity() {
        for k in 2..=12 {
            let rep = build_rep(p(k));
            let r = overcompleteness_check(&rep);
            assert!(r.all_passed(), "k={k}\n{r}");
            assert_eq!(r.len(), 2);
        }
    }

    #[test]
    fn resolution_k2_matches_hand_expansion() {
        // integrand for n = n' = 0 is μ itself; for n = n' = 1 it is
        // z · (z z̄ + 1) · z̄ = z z̄ (z² = 0).
        let m = overcompleteness_matrix(p(2), IntegrandOrdering::KetZ);
        assert!((&m - &FockOperator::identity(2)).norm() < 1e-15);
    }

    #[test]
    fn coherence_factor_values() {
        let p2 = p(2);
        assert_eq!(coherence_factor(1, &p2).unwrap(), ONE);
        assert_eq!(coherence_factor(2, &p2).unwrap(), ZERO);
        assert_eq!(coherence_factor(0, &p2), Err(Error::InvalidOrder(0)));

        let p4 = p(4);
        let g2 = coherence_factor(2, &p4).unwrap();
        assert!((g2 - C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)).norm() < 1e-15);

        let big = p(64);
        assert_eq!(coherence_factor(1, &big).unwrap(), ONE);
        for m in 1..=5 {
            assert!((coherence_factor(m, &big).unwrap().norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coherence_factor_closed_form_matches_monomial_ratio_exactly() {
        for k in 2..=16 {
            let params = p(k);
            for m in 1..=(k as i64 + 3) {
                let closed = coherence_factor(m, &params).unwrap();
                let ratio = coherence_factor_monomial_ratio(m, &params).unwrap();
                assert_eq!(closed, ratio, "k={k} m={m}");
                if m >= k as i64 {
                    assert_eq!(closed, ZERO);
                }
            }
            assert!(coherence_factor_check(k as i64 + 2, &params).all_passed());
        }
    }

    #[test]
    fn limit_ratio_r1_is_exact() {
        let params = p(5);
        for eps in [1e-2, 1e-4] {
            let pt = limit_ratio(LimitRatio::Block, 1, 0, eps, &params);
            assert!(pt.abs_err < 1e-14);
        }
    }

    #[test]
    fn limit_ratio_r2_k3() {
        let params = p(3);
        let a = limit_ratio(LimitRatio::Block, 2, 0, 1e-3, &params);
        let b = limit_ratio(LimitRatio::Block, 2, 0, 1e-5, &params);
        assert!(b.abs_err < a.abs_err);
        assert!(a.abs_err < 1e-2 && b.abs_err < 1e-4);
        assert_eq!(a.expected, 0.5);
    }

    #[test]
    fn limit_errors_scale_linearly() {
        for k in 2..=8 {
            let params = p(k);
            for r in 1..=3 {
                for s in 1..k {
                    for ratio in [LimitRatio::Block, LimitRatio::Offset] {
                        let slope = limit_slope(ratio, r, s, &params);
                        let e1 = limit_ratio(ratio, r, s, 1e-4, &params).abs_err;
                        let e2 = limit_ratio(ratio, r, s, 1e-5, &params).abs_err;
                        if slope > 0.0 {
                            assert!((e1 / 1e-4 - slope).abs() < 0.01 * slope, "k={k} r={r} s={s} {ratio:?}");
                            assert!((e1 / e2 - 10.0).abs() < 0.05);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn limit_report_flags_s0_and_passes() {
        let params = p(4);
        let sched = [1e-2, 1e-3, 1e-4, 1e-5];
        for r in 1..=3 {
            for s in 0..4 {
                let rep = limit_ratios(r, s, &sched, &params).unwrap();
                assert!(rep.all_passed(), "{rep}");
            }
        }
        let rep = limit_ratios(2, 0, &sched, &params).unwrap();
        let flagged = rep.with_tag(Tag::Eq64b).next().unwrap();
        assert!(flagged.detail.as_deref().unwrap().contains("s = 0"));
        assert!(limit_ratios(1, 1, &[1e-3, 1e-2], &params).is_err());
        assert!(limit_ratios(1, 1, &[0.5], &params).is_err());
        assert!(limit_ratios(1, 4, &[1e-3], &params).is_err());
    }

    #[test]
    fn truncation_requires_off_circle_and_straddle() {
        let params = p(3);
        assert!(QCoherentTruncation::new(params.q(), ONE, 5, 3).is_err());
        assert!(QCoherentTruncation::new(params.q() * 0.9, ONE, 2, 3).is_err());
        let t = QCoherentTruncation::new(params.q() * 0.9, c(0.5, 0.1), 6, 3).unwrap();
        assert_eq!(t.coefficients.len(), 7);
        assert_eq!(t.coefficients[0], ONE);
    }

    #[test]
    fn supercoherent_vacuum_alpha() {
        let params = p(4);
        let st = supercoherent_limit(ZERO, 3, params).unwrap();
        let ket = coherent_ket(params);
        for s in 0..4 {
            assert!((st.coefficient(0, s) - ket.components[s].coeff(s, 0)).norm() < 1e-15);
            for r in 1..=3 {
                assert_eq!(st.coefficient(r, s), ZERO);
            }
        }
    }

    #[test]
    fn supercoherent_k2_alpha1() {
        let params = p(2);
        let st = supercoherent_limit(ONE, 4, params).unwrap();
        let mut fact = 1.0;
        for r in 0..=4 {
            if r > 0 {
                fact *= r as f64;
            }
            let b = 1.0 / f64::sqrt(fact);
            assert!((st.coefficient(r, 0) - b).norm() < 1e-15);
            assert!((st.coefficient(r, 1) - b).norm() < 1e-15);
        }
        assert!(supercoherent_check(&st).all_passed());
    }

    #[test]
    fn supercoherent_factorizes() {
        for k in 2..=8 {
            let st = supercoherent_limit(c(0.7, -0.4), DEFAULT_R_MAX, p(k)).unwrap();
            let r = supercoherent_check(&st);
            assert!(r.all_passed(), "{r}");
        }
        assert!(supercoherent_limit(ONE, 0, p(3)).is_err());
    }

    #[test]
    fn supercoherent_matches_q_limit() {
        let params = p(3);
        let st = supercoherent_limit(c(0.8, 0.3), 2, params).unwrap();
        let r = supercoherent_limit_check(&st, 8, 1e-4).unwrap();
        assert!(r.all_passed(), "{r}");
        // error shrinks with ε
        let coarse = supercoherent_limit_oracle(st.alpha, 2, 1, 1e-3, &params).unwrap();
        let fine = supercoherent_limit_oracle(st.alpha, 2, 1, 1e-5, &params).unwrap();
        let exact = st.coefficient(2, 1);
        assert!((fine - exact).norm() < (coarse - exact).norm());
    }

    #[test]
    fn tail_warning_for_large_alpha() {
        let st = supercoherent_limit(c(5.0, 0.0), 8, p(3)).unwrap();
        assert!(st.tail_warning().is_some());
        let st = supercoherent_limit(c(0.01, 0.0), 8, p(3)).unwrap();
        assert!(st.tail_warning().is_none());
    }
}
