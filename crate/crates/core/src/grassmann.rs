//! Generalized Grassmann algebra in one pair of variables `z`, `z̄` with
//! `z^k = z̄^k = 0` and `z z̄ = q^{1/2} z̄ z`.
//!
//! Elements are kept in normal form `Σ c_ab z^a z̄^b` (every `z` to the left
//! of every `z̄`). Each coefficient is stored as a sum `Σ_e c_e (q^{1/2})^e`
//! over integer phase exponents `0 ≤ e < k`, so that reordering phases are
//! tracked in integer arithmetic and only evaluated on demand. Using
//! `(q^{1/2})^k = -1`, exponents are reduced into `[0, k)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockrep::{verify_defining_relations, QuonRep};
use crate::operator::FockOperator;
use crate::qcore::{qfactorial_sqrt, DeformationParams};
use crate::report::{relative_residual, Tag, VerificationReport};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A complex number written as `Σ_e c_e (q^{1/2})^e` with `0 ≤ e < k`.
#[derive(Clone, Debug, Default, PartialEq)]
struct PhasedCoeff {
    parts: BTreeMap<u32, C64>,
}

impl PhasedCoeff {
    fn phased(c: C64, e: i64, k: usize) -> Self {
        let mut out = Self::default();
        out.add_part(c, e, k);
        out
    }

    fn add_part(&mut self, c: C64, e: i64, k: usize) {
        let k = k as i64;
        let mut e = e.rem_euclid(2 * k);
        let mut c = c;
        if e >= k {
            e -= k;
            c = -c;
        }
        let slot = self.parts.entry(e as u32).or_insert(ZERO);
        *slot += c;
        if *slot == ZERO {
            self.parts.remove(&(e as u32));
        }
    }

    fn add(&mut self, other: &Self, k: usize) {
        for (&e, &c) in &other.parts {
            self.add_part(c, e as i64, k);
        }
    }

    fn scale(&self, c: C64) -> Self {
        Self {
            parts: self
                .parts
                .iter()
                .map(|(&e, &v)| (e, v * c))
                .filter(|(_, v)| *v != ZERO)
                .collect(),
        }
    }

    /// Multiplies by `(q^{1/2})^shift`.
    fn rotate(&self, shift: i64, k: usize) -> Self {
        let mut out = Self::default();
        for (&e, &c) in &self.parts {
            out.add_part(c, e as i64 + shift, k);
        }
        out
    }

    fn mul(&self, other: &Self, k: usize) -> Self {
        let mut out = Self::default();
        for (&e1, &c1) in &self.parts {
            for (&e2, &c2) in &other.parts {
                out.add_part(c1 * c2, e1 as i64 + e2 as i64, k);
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    fn evaluate(&self, params: &DeformationParams) -> C64 {
        self.parts
            .iter()
            .map(|(&e, &c)| c * params.q_half_pow(e as i64))
            .sum()
    }
}

/// Normal-ordered polynomial in `z`, `z̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannElement {
    params: DeformationParams,
    coeffs: BTreeMap<(usize, usize), PhasedCoeff>,
}

impl GrassmannElement {
    pub fn zero(params: DeformationParams) -> Self {
        Self { params, coeffs: BTreeMap::new() }
    }

    pub fn scalar(params: DeformationParams, c: C64) -> Self {
        Self::monomial(params, 0, 0, c)
    }

    pub fn one(params: DeformationParams) -> Self {
        Self::scalar(params, ONE)
    }

    /// `c · z^a z̄^b`; zero when either exponent reaches `k`.
    pub fn monomial(params: DeformationParams, a: usize, b: usize, c: C64) -> Self {
        Self::phased_monomial(params, a, b, c, 0)
    }

    /// `c · (q^{1/2})^phase · z^a z̄^b`, with the phase kept symbolic.
    pub fn phased_monomial(params: DeformationParams, a: usize, b: usize, c: C64, phase: i64) -> Self {
        let mut out = Self::zero(params);
        let k = params.k();
        if a < k && b < k && c != ZERO {
            out.coeffs.insert((a, b), PhasedCoeff::phased(c, phase, k));
        }
        out
    }

    pub fn z(params: DeformationParams) -> Self {
        Self::monomial(params, 1, 0, ONE)
    }

    pub fn zbar(params: DeformationParams) -> Self {
        Self::monomial(params, 0, 1, ONE)
    }

    pub fn params(&self) -> &DeformationParams {
        &self.params
    }

    pub fn k(&self) -> usize {
        self.params.k()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (non-zero) monomials.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluated coefficient of `z^a z̄^b` in normal form.
    pub fn coeff(&self, a: usize, b: usize) -> C64 {
        self.coeffs
            .get(&(a, b))
            .map_or(ZERO, |c| c.evaluate(&self.params))
    }

    /// Coefficient of `z̄^b z^a` when the element is written in anti-normal
    /// order, using `z^a z̄^b = q^{ab/2} z̄^b z^a`.
    pub fn anti_normal_coeff(&self, a: usize, b: usize) -> C64 {
        self.coeffs.get(&(a, b)).map_or(ZERO, |c| {
            c.rotate((a * b) as i64, self.k()).evaluate(&self.params)
        })
    }

    /// If the coefficient of `z^a z̄^b` is exactly `(q^{1/2})^e`, returns `e`
    /// reduced into `[0, 2k)`.
    pub fn pure_phase(&self, a: usize, b: usize) -> Option<i64> {
        let coeff = self.coeffs.get(&(a, b))?;
        if coeff.parts.len() != 1 {
            return None;
        }
        let (&e, &v) = coeff.parts.iter().next()?;
        if v == ONE {
            Some(e as i64)
        } else if v == -ONE {
            Some(e as i64 + self.k() as i64)
        } else {
            None
        }
    }

    /// `((a, b), coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), C64)> + '_ {
        self.coeffs
            .iter()
            .map(|(&ab, c)| (ab, c.evaluate(&self.params)))
    }

    fn check_params(&self, other: &Self) -> Result<()> {
        if self.k() != other.k() {
            return Err(Error::ParamsMismatch { left: self.k(), right: other.k() });
        }
        Ok(())
    }

    fn insert(&mut self, ab: (usize, usize), c: &PhasedCoeff) {
        let k = self.k();
        let slot = self.coeffs.entry(ab).or_default();
        slot.add(c, k);
        if slot.is_zero() {
            self.coeffs.remove(&ab);
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        let mut out = self.clone();
        for (&ab, c) in &other.coeffs {
            out.insert(ab, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.params);
        if c == ZERO {
            return out;
        }
        for (&ab, coeff) in &self.coeffs {
            let scaled = coeff.scale(c);
            if !scaled.is_zero() {
                out.coeffs.insert(ab, scaled);
            }
        }
        out
    }

    /// Multiplies every coefficient by `(q^{1/2})^e`, kept symbolic.
    pub fn rotate_phase(&self, e: i64) -> Self {
        let k = self.k();
        let mut out = Self::zero(self.params);
        for (&ab, coeff) in &self.coeffs {
            out.coeffs.insert(ab, coeff.rotate(e, k));
        }
        out
    }

    /// Product in normal form. Monomials obey
    /// `(z^a1 z̄^b1)(z^a2 z̄^b2) = q^{-a2 b1 / 2} z^(a1+a2) z̄^(b1+b2)`,
    /// and a term vanishes once either exponent reaches `k`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        let k = self.k();
        let mut out = Self::zero(self.params);
        for (&(a1, b1), c1) in &self.coeffs {
            for (&(a2, b2), c2) in &other.coeffs {
                if a1 + a2 >= k || b1 + b2 >= k {
                    continue;
                }
                let swap = -((a2 * b1) as i64);
                let c = c1.mul(c2, k).rotate(swap, k);
                out.insert((a1 + a2, b1 + b2), &c);
            }
        }
        Ok(out)
    }

    /// `self^n`, with `x^0 = 1`.
    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::one(self.params);
        for _ in 0..n {
            out = out.multiply(self).expect("same params");
        }
        out
    }

    /// `∂_z (z^a z̄^b) = [a]_q z^(a-1) z̄^b`.
    pub fn d_z(&self) -> Self {
        let mut out = Self::zero(self.params);
        for (&(a, b), c) in &self.coeffs {
            if a == 0 {
                continue;
            }
            let scaled = c.scale(self.params.qnum(a as f64));
            if !scaled.is_zero() {
                out.insert((a - 1, b), &scaled);
            }
        }
        out
    }

    /// `∂_z̄ (z^a z̄^b) = q^{-a/2} [b]_q̄ z^a z̄^(b-1)`: the derivative picks up
    /// the reordering phase of crossing `z^a`.
    pub fn d_zbar(&self) -> Self {
        let k = self.k();
        let mut out = Self::zero(self.params);
        for (&(a, b), c) in &self.coeffs {
            if b == 0 {
                continue;
            }
            let scaled = c.scale(self.params.qnum_bar(b as f64)).rotate(-(a as i64), k);
            if !scaled.is_zero() {
                out.insert((a, b - 1), &scaled);
            }
        }
        out
    }

    /// `∫dz`: keeps the `z^(k-1)` terms and strips that factor; all lower
    /// powers of `z` integrate to zero.
    pub fn berezin_z(&self) -> Self {
        let top = self.k() - 1;
        let mut out = Self::zero(self.params);
        for (&(a, b), c) in &self.coeffs {
            if a == top {
                out.insert((0, b), c);
            }
        }
        out
    }

    /// `∫dz̄`, the mirror of [`berezin_z`](Self::berezin_z) on the `z̄` slot.
    pub fn berezin_zbar(&self) -> Self {
        let top = self.k() - 1;
        let mut out = Self::zero(self.params);
        for (&(a, b), c) in &self.coeffs {
            if b == top {
                out.insert((a, 0), c);
            }
        }
        out
    }

    /// Largest evaluated coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut keys: Vec<(usize, usize)> = self.coeffs.keys().copied().collect();
        keys.extend(other.coeffs.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|(a, b)| (self.coeff(a, b) - other.coeff(a, b)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest evaluated coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// `distance / max(1, max_abs(other))`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        self.distance(other) / other.max_abs().max(1.0)
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for ((a, b), c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            match (a, b) {
                (0, 0) => {}
                (a, 0) => write!(f, "·z^{a}")?,
                (0, b) => write!(f, "·z̄^{b}")?,
                (a, b) => write!(f, "·z^{a} z̄^{b}")?,
            }
        }
        Ok(())
    }
}

/// Wire form: `{"k": k, "terms": [[[a, b], [re, im]], ...]}` with terms in
/// increasing `(a, b)` order.
#[derive(Serialize, Deserialize)]
struct ElementWire {
    k: usize,
    terms: Vec<([usize; 2], [f64; 2])>,
}

impl Serialize for GrassmannElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ElementWire {
            k: self.k(),
            terms: self.terms().map(|((a, b), c)| ([a, b], [c.re, c.im])).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GrassmannElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = ElementWire::deserialize(deserializer)?;
        let params = DeformationParams::new(wire.k).map_err(serde::de::Error::custom)?;
        let mut out = Self::zero(params);
        for ([a, b], [re, im]) in wire.terms {
            if a >= wire.k || b >= wire.k {
                return Err(serde::de::Error::custom(format!(
                    "exponent pair ({a}, {b}) exceeds k - 1 = {}",
                    wire.k - 1
                )));
            }
            let term = Self::monomial(params, a, b, C64::new(re, im));
            out = out.try_add(&term).map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

/// Linear operators on the algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum GrassmannOperator {
    /// Left multiplication by `z`.
    MulZ,
    /// Left multiplication by `z̄`.
    MulZbar,
    Dz,
    Dzbar,
    /// `Compose(vec![A, B, C])` is `A ∘ B ∘ C`: `C` acts first.
    Compose(Vec<GrassmannOperator>),
}

impl GrassmannOperator {
    pub fn apply(&self, f: &GrassmannElement) -> GrassmannElement {
        match self {
            Self::MulZ => GrassmannElement::z(f.params).multiply(f).expect("same params"),
            Self::MulZbar => GrassmannElement::zbar(f.params).multiply(f).expect("same params"),
            Self::Dz => f.d_z(),
            Self::Dzbar => f.d_zbar(),
            Self::Compose(ops) => ops.iter().rev().fold(f.clone(), |acc, op| op.apply(&acc)),
        }
    }

    /// `self` composed with itself `n` times.
    pub fn power(&self, n: usize) -> Self {
        Self::Compose(vec![self.clone(); n])
    }

    pub fn name(&self) -> String {
        match self {
            Self::MulZ => "z".into(),
            Self::MulZbar => "zbar".into(),
            Self::Dz => "d_z".into(),
            Self::Dzbar => "d_zbar".into(),
            Self::Compose(ops) => ops.iter().map(|o| o.name()).collect::<Vec<_>>().join("∘"),
        }
    }
}

/// Matrix of a generator on the normalized basis `z^n / sqrt([n]_q!)`
/// (for `z`, `∂_z`) or `z̄^n / sqrt([n]_q̄!)` (for `z̄`, `∂_z̄`).
pub fn realization_matrix(op: &GrassmannOperator, params: DeformationParams) -> Result<FockOperator> {
    let k = params.k();
    let (barred, deformation) = match op {
        GrassmannOperator::MulZ | GrassmannOperator::Dz => (false, params.q()),
        GrassmannOperator::MulZbar | GrassmannOperator::Dzbar => (true, params.q_bar()),
        GrassmannOperator::Compose(_) => return Err(Error::NotAGenerator(op.name())),
    };
    let norms: Vec<C64> = (0..k).map(|n| qfactorial_sqrt(n, deformation)).collect();
    let basis = |n: usize| {
        let (a, b) = if barred { (0, n) } else { (n, 0) };
        GrassmannElement::monomial(params, a, b, norms[n].inv())
    };
    let mut m = FockOperator::zeros(k);
    for col in 0..k {
        let image = op.apply(&basis(col));
        for ((a, b), c) in image.terms() {
            let row = if barred { b } else { a };
            debug_assert!(if barred { a == 0 } else { b == 0 });
            m.set(row, col, c * norms[row]);
        }
    }
    Ok(m)
}

/// The four realization matrices against the representation matrices
/// `a₋ ↔ ∂_z`, `a₊ ↔ z`, `a₊⁺ ↔ ∂_z̄`, `a₋⁺ ↔ z̄`, compared to a thousandth of
/// the run tolerance, and the defining relations evaluated on the realized
/// operators.
pub fn realization_check(rep: &QuonRep) -> VerificationReport {
    let params = rep.params;
    let k = params.k();
    let tol = params.tol() * 1e-3;
    let realize = |op: &GrassmannOperator| realization_matrix(op, params).expect("generator");
    let d_z = realize(&GrassmannOperator::Dz);
    let mul_z = realize(&GrassmannOperator::MulZ);
    let d_zbar = realize(&GrassmannOperator::Dzbar);
    let mul_zbar = realize(&GrassmannOperator::MulZbar);
    let mut report = VerificationReport::new();
    for (tag, name, realized, target) in [
        (Tag::Eq33, "d_z = a_minus", &d_z, &rep.a_minus),
        (Tag::Eq33, "z = a_plus", &mul_z, &rep.a_plus),
        (Tag::Eq34, "d_zbar = a_plus^+", &d_zbar, &rep.a_plus_dag),
        (Tag::Eq34, "zbar = a_minus^+", &mul_zbar, &rep.a_minus_dag),
    ] {
        report.record(
            tag,
            k,
            [("check", name.to_string())],
            relative_residual(realized.matrix(), target.matrix()),
            tol,
            None,
        );
    }
    let realized = QuonRep {
        params,
        a_minus: d_z,
        a_plus: mul_z,
        a_plus_dag: d_zbar,
        a_minus_dag: mul_zbar,
        number_op: rep.number_op.clone(),
    };
    report.extend(verify_defining_relations(&realized).tagged_with([("operators", "realized".to_string())]));
    report
}

/// Checks `z̄^n z^n = q^{-n(n-1)/4} (z̄ z)^n` in normal form, and both sides
/// against the closed normal form `q^{-n²/2} z^n z̄^n`.
pub fn reorder_identity_check(n: usize, params: DeformationParams) -> VerificationReport {
    let mut report = VerificationReport::new();
    let k = params.k();
    let z = GrassmannElement::z(params);
    let zbar = GrassmannElement::zbar(params);

    let lhs = zbar.pow(n).multiply(&z.pow(n)).expect("same params");
    let pair = zbar.multiply(&z).expect("same params");
    let rhs = pair.pow(n).rotate_phase(-((n * n.saturating_sub(1) / 2) as i64));
    let closed = GrassmannElement::phased_monomial(params, n, n, ONE, -((n * n) as i64));

    let exact = lhs == rhs && lhs == closed;
    let residual = lhs.distance(&rhs).max(lhs.distance(&closed));
    report.record(
        Tag::Eq45,
        k,
        [("n", n.to_string())],
        residual,
        params.tol(),
        Some(format!("symbolic phases identical: {exact}")),
    );
    report
}

/// Algebra-level checks: derivative actions on pure powers, nilpotency of the
/// derivatives, the derivative exchange relation and the variable exchange
/// relation on every basis monomial.
pub fn verify_calculus(params: DeformationParams) -> VerificationReport {
    let mut report = VerificationReport::new();
    let k = params.k();
    let tol = params.tol();
    let monomials: Vec<GrassmannElement> = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| GrassmannElement::monomial(params, a, b, ONE))
        .collect();

    let mut worst_dz = 0.0f64;
    let mut worst_dzbar = 0.0f64;
    for n in 0..k {
        let dz = GrassmannElement::monomial(params, n, 0, ONE).d_z();
        let expected = GrassmannElement::monomial(params, n.saturating_sub(1), 0, params.qnum(n as f64));
        let expected = if n == 0 { GrassmannElement::zero(params) } else { expected };
        worst_dz = worst_dz.max(dz.distance(&expected));

        let dzbar = GrassmannElement::monomial(params, 0, n, ONE).d_zbar();
        let expected = if n == 0 {
            GrassmannElement::zero(params)
        } else {
            GrassmannElement::monomial(params, 0, n - 1, params.qnum_bar(n as f64))
        };
        worst_dzbar = worst_dzbar.max(dzbar.distance(&expected));
    }
    report.record(Tag::Eq25, k, [], worst_dz, tol, None);
    report.record(Tag::Eq26, k, [], worst_dzbar, tol, None);

    for (tag, op) in [(Tag::Eq31, GrassmannOperator::Dz), (Tag::Eq32, GrassmannOperator::Dzbar)] {
        let power = op.power(k);
        let worst = monomials
            .iter()
            .map(|m| power.apply(m).max_abs())
            .fold(0.0, f64::max);
        report.record(tag, k, [("monomials", (k * k).to_string())], worst, tol, None);
    }

    let q_half_inv = -1i64;
    let mut worst = 0.0f64;
    let mut exact = true;
    for m in &monomials {
        let lhs = m.d_zbar().d_z();
        let rhs = m.d_z().d_zbar().rotate_phase(q_half_inv);
        exact &= lhs == rhs;
        worst = worst.max(lhs.distance(&rhs));
    }
    report.record(
        Tag::Eq36,
        k,
        [("monomials", (k * k).to_string())],
        worst,
        tol,
        Some(format!("symbolic phases identical: {exact}")),
    );

    let z = GrassmannElement::z(params);
    let zbar = GrassmannElement::zbar(params);
    let lhs = z.multiply(&zbar).expect("same params");
    let rhs = zbar.multiply(&z).expect("same params").rotate_phase(1);
    report.record(Tag::Eq35, k, [], lhs.distance(&rhs), tol, None);
    report
}
