//! The k-dimensional nilpotent Fock representation of the quon algebras at
//! `q` and at `q̄`.

use num_complex::Complex64 as C64;

use crate::operator::FockOperator;
use crate::qcore::{qfactorial_sqrt, DeformationParams};
use crate::report::{relative_residual, Tag, VerificationReport};

/// Fixed value of the shift constant appearing in the representation.
pub const S: f64 = 0.5;

/// Generators of both quon algebras on the k-level Fock space.
///
/// `a_minus`, `a_plus` generate the algebra at `q`; `a_plus_dag`, `a_minus_dag`
/// (the adjoints of `a_plus`, `a_minus`) generate the algebra at `q̄`, with
/// `a_plus_dag` acting as the annihilator.
#[derive(Clone, Debug, PartialEq)]
pub struct QuonRep {
    pub params: DeformationParams,
    pub a_minus: FockOperator,
    pub a_plus: FockOperator,
    pub a_plus_dag: FockOperator,
    pub a_minus_dag: FockOperator,
    pub number_op: FockOperator,
}

/// Lowering matrix with `|n⟩ ↦ sqrt([n]_Q) |n-1⟩`.
fn lowering(k: usize, deformed: impl Fn(f64) -> C64) -> FockOperator {
    let mut m = FockOperator::zeros(k);
    for n in 1..k {
        m.set(n - 1, n, deformed(n as f64).sqrt());
    }
    m
}

/// Raising matrix with `|n⟩ ↦ sqrt([n+1]_Q) |n+1⟩`, annihilating `|k-1⟩`.
fn raising(k: usize, deformed: impl Fn(f64) -> C64) -> FockOperator {
    let mut m = FockOperator::zeros(k);
    for n in 0..k - 1 {
        m.set(n + 1, n, deformed((n + 1) as f64).sqrt());
    }
    m
}

/// Builds the representation. The `q̄` generators are constructed from their
/// own deformed numbers, not by taking adjoints; with principal square roots
/// the two coincide.
pub fn build_rep(params: DeformationParams) -> QuonRep {
    let k = params.k();
    let number: Vec<C64> = (0..k).map(|n| C64::new(n as f64, 0.0)).collect();
    QuonRep {
        a_minus: lowering(k, |x| params.qnum(x)),
        a_plus: raising(k, |x| params.qnum(x)),
        a_plus_dag: lowering(k, |x| params.qnum_bar(x)),
        a_minus_dag: raising(k, |x| params.qnum_bar(x)),
        number_op: FockOperator::from_diagonal(&number),
        params,
    }
}

impl QuonRep {
    pub fn k(&self) -> usize {
        self.params.k()
    }

    pub fn identity(&self) -> FockOperator {
        FockOperator::identity(self.k())
    }

    /// Diagonal operator `f(N)`.
    pub fn function_of_number(&self, f: impl Fn(f64) -> C64) -> FockOperator {
        let diag: Vec<C64> = (0..self.k()).map(|n| f(n as f64)).collect();
        FockOperator::from_diagonal(&diag)
    }
}

/// Quon commutation relations and number-operator commutators for both
/// algebras.
pub fn verify_defining_relations(rep: &QuonRep) -> VerificationReport {
    let mut report = VerificationReport::new();
    let k = rep.k();
    let tol = rep.params.tol();
    let q = rep.params.q();
    let q_bar = rep.params.q_bar();
    let id = rep.identity();
    let n_op = &rep.number_op;

    let quon = &(&rep.a_minus * &rep.a_plus) - &(&rep.a_plus * &rep.a_minus).scale(q);
    report.record(Tag::Eq1, k, [], relative_residual(quon.matrix(), id.matrix()), tol, None);

    let lower = n_op.commutator(&rep.a_minus);
    report.record(
        Tag::Eq2a,
        k,
        [],
        relative_residual(lower.matrix(), (-&rep.a_minus).matrix()),
        tol,
        None,
    );
    let raise = n_op.commutator(&rep.a_plus);
    report.record(Tag::Eq2b, k, [], relative_residual(raise.matrix(), rep.a_plus.matrix()), tol, None);

    let quon_bar =
        &(&rep.a_plus_dag * &rep.a_minus_dag) - &(&rep.a_minus_dag * &rep.a_plus_dag).scale(q_bar);
    report.record(Tag::Eq16, k, [], relative_residual(quon_bar.matrix(), id.matrix()), tol, None);

    let lower_bar = n_op.commutator(&rep.a_plus_dag);
    report.record(
        Tag::Eq17a,
        k,
        [],
        relative_residual(lower_bar.matrix(), (-&rep.a_plus_dag).matrix()),
        tol,
        None,
    );
    let raise_bar = n_op.commutator(&rep.a_minus_dag);
    report.record(
        Tag::Eq17b,
        k,
        [],
        relative_residual(raise_bar.matrix(), rep.a_minus_dag.matrix()),
        tol,
        None,
    );
    report
}

/// Relations that follow from the defining ones on this representation:
/// deformed-number products, ladder and number-shift identities, nilpotency,
/// basis generation from the vacuum, adjointness and the cross relation
/// between the two algebras.
pub fn verify_derived_relations(rep: &QuonRep) -> VerificationReport {
    let mut report = VerificationReport::new();
    let params = rep.params;
    let k = rep.k();
    let tol = params.tol();
    let id = rep.identity();

    let down_up = &rep.a_minus * &rep.a_plus;
    let up_down = &rep.a_plus * &rep.a_minus;
    let shifted_up = rep.function_of_number(|n| params.qnum(n + S + 0.5));
    let shifted_down = rep.function_of_number(|n| params.qnum(n + S - 0.5));
    report.record(Tag::Eq4a, k, [], relative_residual(down_up.matrix(), shifted_up.matrix()), tol, None);
    report.record(Tag::Eq4b, k, [], relative_residual(up_down.matrix(), shifted_down.matrix()), tol, None);

    let plus_powers: Vec<FockOperator> = (0..=k as u32).map(|l| rep.a_plus.pow(l)).collect();
    let minus_powers: Vec<FockOperator> = (0..=k as u32).map(|l| rep.a_minus.pow(l)).collect();

    for l in 1..k {
        let ql = params.q_pow(l as i64);
        let ell = params.qnum(l as f64);
        let lhs = &rep.a_minus * &plus_powers[l];
        let rhs = &plus_powers[l - 1].scale(ell) + &(&plus_powers[l] * &rep.a_minus).scale(ql);
        report.record(Tag::Eq6a, k, [("l", l.to_string())], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);

        let lhs = &minus_powers[l] * &rep.a_plus;
        let rhs = &minus_powers[l - 1].scale(ell) + &(&rep.a_plus * &minus_powers[l]).scale(ql);
        report.record(Tag::Eq6b, k, [("l", l.to_string())], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);
    }

    let lhs = &rep.a_minus * &plus_powers[k];
    let rhs = &plus_powers[k] * &rep.a_minus;
    report.record(Tag::Eq7a, k, [], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);
    let lhs = &minus_powers[k] * &rep.a_plus;
    let rhs = &rep.a_plus * &minus_powers[k];
    report.record(Tag::Eq7b, k, [], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);

    for l in 1..=k {
        let shift = &rep.number_op + &id.scale(C64::new(l as f64, 0.0));
        let lhs = &rep.number_op * &plus_powers[l];
        let rhs = &plus_powers[l] * &shift;
        report.record(Tag::Eq8a, k, [("l", l.to_string())], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);
        let lhs = &minus_powers[l] * &rep.number_op;
        let rhs = &shift * &minus_powers[l];
        report.record(Tag::Eq8b, k, [("l", l.to_string())], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);
    }

    for (tag, powers) in [(Tag::Eq9a, &plus_powers), (Tag::Eq9b, &minus_powers)] {
        report.record(tag, k, [("power", "k".to_string())], powers[k].norm(), tol, None);
        // the nilpotency order is exactly k: the (k-1)-th power survives
        let below = powers[k - 1].norm();
        report.record(
            tag,
            k,
            [("power", "k-1".to_string())],
            if below > tol { 0.0 } else { 1.0 },
            tol,
            Some(format!("norm of power k-1 = {below:.6e}")),
        );
    }

    let n_op = &rep.number_op;
    let hermitean = relative_residual(n_op.matrix(), n_op.adjoint().matrix());
    let expected_n = rep.function_of_number(|n| C64::new(n, 0.0));
    report.record(
        Tag::Eq13,
        k,
        [],
        hermitean.max(relative_residual(n_op.matrix(), expected_n.matrix())),
        tol,
        None,
    );

    let mut vacuum = vec![C64::new(0.0, 0.0); k];
    vacuum[0] = C64::new(1.0, 0.0);
    for n in 0..k {
        let generated = plus_powers[n].apply(&vacuum);
        let norm = qfactorial_sqrt(n, params.q());
        let residual = generated
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let target = if i == n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                (v / norm - target).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        report.record(Tag::Eq14, k, [("n", n.to_string())], residual, tol, None);
    }

    let adj_plus = relative_residual(rep.a_plus_dag.matrix(), rep.a_plus.adjoint().matrix());
    let adj_minus = relative_residual(rep.a_minus_dag.matrix(), rep.a_minus.adjoint().matrix());
    report.record(Tag::Eq19, k, [("generator", "a_plus_dag".to_string())], adj_plus, tol, None);
    report.record(Tag::Eq19, k, [("generator", "a_minus_dag".to_string())], adj_minus, tol, None);

    let q_half = params.q_half();
    let lhs = &rep.a_minus * &rep.a_plus_dag;
    let rhs = (&rep.a_plus_dag * &rep.a_minus).scale(q_half.inv());
    report.record(Tag::Eq20, k, [("form", "lowering".to_string())], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);
    let lhs = &rep.a_plus * &rep.a_minus_dag;
    let rhs = (&rep.a_minus_dag * &rep.a_plus).scale(q_half);
    report.record(Tag::Eq20, k, [("form", "raising".to_string())], relative_residual(lhs.matrix(), rhs.matrix()), tol, None);

    report
}
