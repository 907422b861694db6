//! The `(U, V)` and `(X, Y)` operator pairs, the lattice generators `T_n`
//! realizing the sine algebra, and the `U_q(sl(2))` generators built from them.

use std::f64::consts::PI;
use std::ops::Add;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockrep::QuonRep;
use crate::operator::FockOperator;
use crate::phase::{quon_phase, PhaseConfig, Sign};
use crate::qcore::DeformationParams;
use crate::report::{relative_residual, Tag, VerificationReport};

/// Default sweep bound `|n1|, |n2| ≤ 3`.
pub const DEFAULT_SWEEP: i64 = 3;

/// A point of the two-dimensional integer lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeIndex {
    pub n1: i64,
    pub n2: i64,
}

impl LatticeIndex {
    pub const fn new(n1: i64, n2: i64) -> Self {
        Self { n1, n2 }
    }

    /// `m × n = m1 n2 - m2 n1`.
    pub fn cross(&self, other: &LatticeIndex) -> i64 {
        self.n1 * other.n2 - self.n2 * other.n1
    }

    /// All indices with `|n1|, |n2| ≤ bound`.
    pub fn sweep(bound: i64) -> Vec<LatticeIndex> {
        (-bound..=bound)
            .flat_map(|n1| (-bound..=bound).map(move |n2| LatticeIndex::new(n1, n2)))
            .collect()
    }
}

impl Add for LatticeIndex {
    type Output = LatticeIndex;
    fn add(self, rhs: LatticeIndex) -> LatticeIndex {
        LatticeIndex::new(self.n1 + rhs.n1, self.n2 + rhs.n2)
    }
}

impl std::fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.n1, self.n2)
    }
}

/// `U = a₋a₊ - a₊a₋`, `V = E^{+iΦ}`, `X = a₊⁺a₋⁺ - a₋⁺a₊⁺`, `Y = E^{-iΦ}`,
/// with validated inverses.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryPair {
    pub params: DeformationParams,
    pub u: FockOperator,
    pub v: FockOperator,
    pub x: FockOperator,
    pub y: FockOperator,
    pub u_inv: FockOperator,
    pub v_inv: FockOperator,
    pub x_inv: FockOperator,
    pub y_inv: FockOperator,
}

pub fn build_pair(rep: &QuonRep, cfg: &PhaseConfig) -> Result<SymmetryPair> {
    if rep.k() != cfg.k() {
        return Err(Error::ParamsMismatch { left: rep.k(), right: cfg.k() });
    }
    let tol = rep.params.tol();
    let u = rep.a_minus.commutator(&rep.a_plus);
    let v = quon_phase(rep, cfg, Sign::Plus);
    let x = rep.a_plus_dag.commutator(&rep.a_minus_dag);
    let y = quon_phase(rep, cfg, Sign::Minus);
    Ok(SymmetryPair {
        params: rep.params,
        u_inv: u.inverse("U", tol)?,
        v_inv: v.inverse("V", tol)?,
        x_inv: x.inverse("X", tol)?,
        y_inv: y.inverse("Y", tol)?,
        u,
        v,
        x,
        y,
    })
}

/// Which pair a lattice generator is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairSide {
    /// `T_n = q^{n1 n2/2} U^{n1} V^{n2}`.
    UV,
    /// `S_n = q^{n1 n2/2} X^{n1} Y^{n2}`, which equals `T_n^†`.
    XY,
}

impl PairSide {
    pub fn label(&self) -> &'static str {
        match self {
            PairSide::UV => "UV",
            PairSide::XY => "XY",
        }
    }
}

fn signed_pow(op: &FockOperator, inv: &FockOperator, e: i64) -> FockOperator {
    if e >= 0 {
        op.pow(e as u32)
    } else {
        inv.pow((-e) as u32)
    }
}

impl SymmetryPair {
    pub fn k(&self) -> usize {
        self.params.k()
    }

    fn operators(&self, side: PairSide) -> [&FockOperator; 4] {
        match side {
            PairSide::UV => [&self.u, &self.u_inv, &self.v, &self.v_inv],
            PairSide::XY => [&self.x, &self.x_inv, &self.y, &self.y_inv],
        }
    }

    /// Lattice generator on either side of the pair.
    pub fn generator(&self, side: PairSide, n: LatticeIndex) -> FockOperator {
        let [a, a_inv, b, b_inv] = self.operators(side);
        (&signed_pow(a, a_inv, n.n1) * &signed_pow(b, b_inv, n.n2)).scale(self.params.q_half_pow(n.n1 * n.n2))
    }

    /// `T_n^{-1} = q^{-n1 n2/2} V^{-n2} U^{-n1}` from the stored inverses.
    pub fn generator_inverse(&self, side: PairSide, n: LatticeIndex) -> FockOperator {
        let [a, a_inv, b, b_inv] = self.operators(side);
        (&signed_pow(b, b_inv, -n.n2) * &signed_pow(a, a_inv, -n.n1)).scale(self.params.q_half_pow(-n.n1 * n.n2))
    }
}

/// `T_n = q^{n1 n2/2} U^{n1} V^{n2}`; negative powers use the inverses.
pub fn t_generator(pair: &SymmetryPair, n: LatticeIndex) -> FockOperator {
    pair.generator(PairSide::UV, n)
}

/// `U = q^N`, `X = U^†`, `Y = V^†`, `VU = qUV` with its iterates
/// `V^n U^m = q^{nm} U^m V^n` for `0 ≤ n, m ≤ 3`, and the mirrored
/// exchange `YX = q XY`.
pub fn exchange_check(pair: &SymmetryPair) -> VerificationReport {
    let k = pair.k();
    let params = pair.params;
    let tol = params.tol();
    let mut report = VerificationReport::new();

    let q_number = FockOperator::from_diagonal(&(0..k as i64).map(|n| params.q_pow(n)).collect::<Vec<_>>());
    report.record(Tag::Eq87, k, [("check", "U = q^N".to_string())], relative_residual(pair.u.matrix(), q_number.matrix()), tol, None);
    report.record(
        Tag::Eq88,
        k,
        [("check", "X = U^dag".to_string())],
        relative_residual(pair.x.matrix(), pair.u.adjoint().matrix()),
        tol,
        None,
    );
    report.record(
        Tag::Eq88,
        k,
        [("check", "Y = V^dag".to_string())],
        relative_residual(pair.y.matrix(), pair.v.adjoint().matrix()),
        tol,
        None,
    );

    let vu = &pair.v * &pair.u;
    let quv = (&pair.u * &pair.v).scale(params.q());
    report.record(Tag::Eq89, k, [("pair", "UV".to_string())], relative_residual(vu.matrix(), quv.matrix()), tol, None);

    let yx = &pair.y * &pair.x;
    let qxy = (&pair.x * &pair.y).scale(params.q());
    let conj_form = relative_residual(yx.matrix(), (&pair.x * &pair.y).scale(params.q_bar()).matrix());
    report.record(
        Tag::Eq89,
        k,
        [("pair", "XY".to_string())],
        relative_residual(yx.matrix(), qxy.matrix()),
        tol,
        Some(format!("YX = q XY; residual of YX = qbar XY is {conj_form:.3e}")),
    );

    for n in 0..=3u32 {
        for m in 0..=3u32 {
            let lhs = &pair.v.pow(n) * &pair.u.pow(m);
            let rhs = (&pair.u.pow(m) * &pair.v.pow(n)).scale(params.q_pow((n * m) as i64));
            report.record(
                Tag::Eq90,
                k,
                [("n", n.to_string()), ("m", m.to_string())],
                relative_residual(lhs.matrix(), rhs.matrix()),
                tol,
                None,
            );
        }
    }
    report
}

/// `T_m T_n = q^{-(m×n)/2} T_{m+n}`, plus the scalar reading
/// `T_m T_n T_{m+n}^{-1} = q^{-(m×n)/2} I` through the `(0,0)` entry.
pub fn product_law_check(pair: &SymmetryPair, m: LatticeIndex, n: LatticeIndex) -> VerificationReport {
    product_law_check_on(pair, PairSide::UV, m, n)
}

pub fn product_law_check_on(pair: &SymmetryPair, side: PairSide, m: LatticeIndex, n: LatticeIndex) -> VerificationReport {
    let k = pair.k();
    let params = pair.params;
    let tol = params.tol();
    let labels = || [("pair", side.label().to_string()), ("m", m.to_string()), ("n", n.to_string())];
    let mut report = VerificationReport::new();
    let phase = params.q_half_pow(-m.cross(&n));
    let lhs = &pair.generator(side, m) * &pair.generator(side, n);
    let rhs = pair.generator(side, m + n).scale(phase);
    report.record(Tag::Eq93, k, labels(), relative_residual(lhs.matrix(), rhs.matrix()), tol, None);

    let ratio = &lhs * &pair.generator_inverse(side, m + n);
    let scalar = ratio.entry(0, 0);
    let scalar_residual = relative_residual(ratio.matrix(), FockOperator::identity(k).scale(phase).matrix());
    report.record(
        Tag::Eq93,
        k,
        labels().into_iter().chain([("check", "scalar ratio".to_string())]),
        scalar_residual,
        tol,
        Some(format!("(0,0) entry {}{:+}i", scalar.re, scalar.im)),
    );
    report
}

/// `‖AB - BA - R‖_F / max(1, ‖AB‖_F, ‖BA‖_F, ‖R‖_F)`: the commutator is a
/// difference of two products, so roundoff scales with the larger of them.
fn commutator_residual(forward: &FockOperator, backward: &FockOperator, rhs: &FockOperator) -> f64 {
    let diff = &(forward - backward) - rhs;
    let scale = forward.norm().max(backward.norm()).max(rhs.norm()).max(1.0);
    diff.norm() / scale
}

/// `[T_m, T_n] = -2i sin(π (m×n)/k) T_{m+n}`.
pub fn sine_commutator_check(pair: &SymmetryPair, m: LatticeIndex, n: LatticeIndex) -> VerificationReport {
    sine_commutator_check_on(pair, PairSide::UV, m, n)
}

pub fn sine_commutator_check_on(pair: &SymmetryPair, side: PairSide, m: LatticeIndex, n: LatticeIndex) -> VerificationReport {
    let k = pair.k();
    let tol = pair.params.tol();
    let tm = pair.generator(side, m);
    let tn = pair.generator(side, n);
    let forward = &tm * &tn;
    let backward = &tn * &tm;
    let coeff = C64::new(0.0, -2.0 * (PI * m.cross(&n) as f64 / k as f64).sin());
    let rhs = pair.generator(side, m + n).scale(coeff);
    let mut report = VerificationReport::new();
    report.record(
        Tag::Eq95,
        k,
        [("pair", side.label().to_string()), ("m", m.to_string()), ("n", n.to_string())],
        commutator_residual(&forward, &backward, &rhs),
        tol,
        None,
    );
    report
}

/// Product law and sine commutator over all `m, n` with `|m_i|, |n_i| ≤ bound`,
/// on both pairs. The `(X, Y)` entries use the same phase law as `(U, V)`;
/// their detail records the residual of the `q → q̄` conjugated law.
pub fn lattice_sweep_check(pair: &SymmetryPair, bound: i64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let points = LatticeIndex::sweep(bound);
    let params = pair.params;
    for side in [PairSide::UV, PairSide::XY] {
        let mut worst_product = (0.0f64, LatticeIndex::new(0, 0), LatticeIndex::new(0, 0));
        let mut worst_sine = worst_product;
        let mut worst_conjugated = 0.0f64;
        let generators: std::collections::BTreeMap<LatticeIndex, FockOperator> = LatticeIndex::sweep(2 * bound)
            .into_iter()
            .map(|n| (n, pair.generator(side, n)))
            .collect();
        for m in &points {
            for n in &points {
                let tm = &generators[m];
                let tn = &generators[n];
                let tmn = &generators[&(*m + *n)];
                let product = tm * tn;
                let cross = m.cross(n);
                let r_prod = relative_residual(product.matrix(), tmn.scale(params.q_half_pow(-cross)).matrix());
                if r_prod >= worst_product.0 {
                    worst_product = (r_prod, *m, *n);
                }
                if side == PairSide::XY {
                    let conj = relative_residual(product.matrix(), tmn.scale(params.q_half_pow(cross)).matrix());
                    worst_conjugated = worst_conjugated.max(conj);
                }
                let coeff = C64::new(0.0, -2.0 * (PI * cross as f64 / params.k() as f64).sin());
                let r_sine = commutator_residual(&product, &(tn * tm), &tmn.scale(coeff));
                if r_sine >= worst_sine.0 {
                    worst_sine = (r_sine, *m, *n);
                }
            }
        }
        let detail = |worst: (f64, LatticeIndex, LatticeIndex)| {
            let mut text = format!("{} pairs; worst at m={} n={}", points.len() * points.len(), worst.1, worst.2);
            if side == PairSide::XY {
                text.push_str(&format!("; conjugated phase law residual {worst_conjugated:.3e}"));
            }
            text
        };
        let labels = || [("pair", side.label().to_string()), ("sweep", bound.to_string())];
        report.record(Tag::Eq93, params.k(), labels(), worst_product.0, params.tol(), Some(detail(worst_product)));
        report.record(Tag::Eq95, params.k(), labels(), worst_sine.0, params.tol(), Some(detail(worst_sine)));
    }
    report
}

/// `J₊`, `J₋`, `K = q^{2J₃}` and `K^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UqSl2Generators {
    pub j_plus: FockOperator,
    pub j_minus: FockOperator,
    pub k: FockOperator,
    pub k_inv: FockOperator,
}

/// `J₊ = (T_{(1,1)} - T_{(-1,1)})/(q - q^{-1})`,
/// `J₋ = (T_{(-1,-1)} - T_{(1,-1)})/(q - q^{-1})`, `K = T_{(-2,0)}`,
/// `K^{-1} = T_{(2,0)}`. Rejects `k = 2`, where `q - q^{-1} = 0`.
pub fn uqsl2_generators(pair: &SymmetryPair, params: &DeformationParams) -> Result<UqSl2Generators> {
    if params.k() == 2 {
        return Err(Error::QuantumGroupDegenerate);
    }
    let denom = (params.q() - params.q_bar()).inv();
    let t = |n1, n2| t_generator(pair, LatticeIndex::new(n1, n2));
    Ok(UqSl2Generators {
        j_plus: (&t(1, 1) - &t(-1, 1)).scale(denom),
        j_minus: (&t(-1, -1) - &t(1, -1)).scale(denom),
        k: t(-2, 0),
        k_inv: t(2, 0),
    })
}

/// `K K^{-1} = I`, `[J₊, J₋] = (K - K^{-1})/(q - q^{-1})` and
/// `K J_± K^{-1} = q^{±2} J_±`.
pub fn uqsl2_relations_check(gens: &UqSl2Generators, params: &DeformationParams) -> VerificationReport {
    let k = params.k();
    let tol = params.tol();
    let mut report = VerificationReport::new();
    let id = FockOperator::identity(k);
    report.record(
        Tag::Eq98,
        k,
        [("check", "K K^-1 = I".to_string())],
        relative_residual((&gens.k * &gens.k_inv).matrix(), id.matrix()),
        tol,
        None,
    );
    let denom = (params.q() - params.q_bar()).inv();
    let lhs = gens.j_plus.commutator(&gens.j_minus);
    let rhs = (&gens.k - &gens.k_inv).scale(denom);
    report.record(Tag::Eq99, k, [], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);
    for (label, j, e) in [("+", &gens.j_plus, 2), ("-", &gens.j_minus, -2)] {
        let lhs = &(&gens.k * j) * &gens.k_inv;
        let rhs = j.scale(params.q_pow(e));
        report.record(Tag::Eq100, k, [("sign", label.to_string())], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);
    }
    report
}
