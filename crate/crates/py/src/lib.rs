//! Python module `kfermion`. Matrices cross the boundary as row-major lists
//! of lists of `complex`.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use kfermion_core::coherent::{self, LimitRatio};
use kfermion_core::error::Error;
use kfermion_core::fockrep;
use kfermion_core::harness::{self, OutputFormat, RunConfig};
use kfermion_core::operator::FockOperator;
use kfermion_core::phase::{self, PhaseConfig, Sign};
use kfermion_core::qcore;
use kfermion_core::report;
use kfermion_core::symmetry::{self, LatticeIndex, PairSide};

type Matrix = Vec<Vec<C64>>;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io { .. } => PyOSError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn rows(op: &FockOperator) -> Matrix {
    let m = op.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn sign(value: i32) -> PyResult<Sign> {
    match value {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        _ => Err(PyValueError::new_err(format!("sign must be +1 or -1, got {value}"))),
    }
}

fn params(k: usize) -> PyResult<qcore::DeformationParams> {
    qcore::DeformationParams::new(k).map_err(to_py)
}

/// Deformation parameter `q = exp(2πi/k)` with a numerical tolerance.
#[pyclass(name = "DeformationParams", frozen, skip_from_py_object)]
struct PyDeformationParams(qcore::DeformationParams);

#[pymethods]
impl PyDeformationParams {
    #[new]
    #[pyo3(signature = (k, tol=None))]
    fn new(k: usize, tol: Option<f64>) -> PyResult<Self> {
        let inner = match tol {
            Some(tol) => qcore::DeformationParams::with_tol(k, tol),
            None => qcore::DeformationParams::new(k),
        };
        inner.map(Self).map_err(to_py)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn q(&self) -> C64 {
        self.0.q()
    }

    #[getter]
    fn q_bar(&self) -> C64 {
        self.0.q_bar()
    }

    #[getter]
    fn q_half(&self) -> C64 {
        self.0.q_half()
    }

    #[getter]
    fn tol(&self) -> f64 {
        self.0.tol()
    }

    fn qnum(&self, x: f64) -> C64 {
        self.0.qnum(x)
    }

    fn qnum_bar(&self, x: f64) -> C64 {
        self.0.qnum_bar(x)
    }

    fn __repr__(&self) -> String {
        format!("DeformationParams(k={}, tol={:e})", self.0.k(), self.0.tol())
    }
}

/// The `k`-dimensional Fock representation.
#[pyclass(name = "QuonRep", frozen)]
struct PyQuonRep(fockrep::QuonRep);

#[pymethods]
impl PyQuonRep {
    #[new]
    fn new(params: &PyDeformationParams) -> Self {
        Self(fockrep::build_rep(params.0))
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn a_minus(&self) -> Matrix {
        rows(&self.0.a_minus)
    }

    #[getter]
    fn a_plus(&self) -> Matrix {
        rows(&self.0.a_plus)
    }

    #[getter]
    fn a_plus_dag(&self) -> Matrix {
        rows(&self.0.a_plus_dag)
    }

    #[getter]
    fn a_minus_dag(&self) -> Matrix {
        rows(&self.0.a_minus_dag)
    }

    #[getter]
    fn number_op(&self) -> Matrix {
        rows(&self.0.number_op)
    }

    fn verify(&self) -> PyVerificationReport {
        let mut out = fockrep::verify_defining_relations(&self.0);
        out.extend(fockrep::verify_derived_relations(&self.0));
        PyVerificationReport(out)
    }
}

/// Ordered check results.
#[pyclass(name = "VerificationReport", frozen)]
struct PyVerificationReport(report::VerificationReport);

#[pymethods]
impl PyVerificationReport {
    #[getter]
    fn all_passed(&self) -> bool {
        self.0.all_passed()
    }

    /// `(total, passed, failed)`.
    fn summary(&self) -> (usize, usize, usize) {
        let s = self.0.summary();
        (s.total, s.passed, s.failed)
    }

    /// One `(equation_tag, k, residual, tol, passed)` tuple per entry.
    fn entries(&self) -> Vec<(String, usize, f64, f64, bool)> {
        self.0
            .entries()
            .iter()
            .map(|e| (e.equation_tag.to_string(), e.k, e.residual, e.tol, e.passed))
            .collect()
    }

    fn failures(&self) -> Vec<String> {
        self.0.failures().map(|e| e.to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// Runs the verification suites and returns the report.
#[pyfunction]
#[pyo3(signature = (k="2..8", theta0=0.0, tol=None, suite=None, eps=None))]
fn verify(k: &str, theta0: f64, tol: Option<f64>, suite: Option<&str>, eps: Option<&str>) -> PyResult<PyVerificationReport> {
    let cfg = config(k, theta0, tol, suite, eps, OutputFormat::Json)?;
    harness::run_suites(&cfg).map(PyVerificationReport).map_err(to_py)
}

/// Runs the suites and renders the report as `json`, `csv` or `text`.
#[pyfunction]
#[pyo3(signature = (k="2..8", theta0=0.0, tol=None, suite=None, eps=None, format="json"))]
fn verify_rendered(
    k: &str,
    theta0: f64,
    tol: Option<f64>,
    suite: Option<&str>,
    eps: Option<&str>,
    format: &str,
) -> PyResult<String> {
    let format = format.parse().map_err(to_py)?;
    let cfg = config(k, theta0, tol, suite, eps, format)?;
    let out = harness::run_suites(&cfg).map_err(to_py)?;
    harness::render_report(&out, &cfg).map_err(to_py)
}

fn config(
    k: &str,
    theta0: f64,
    tol: Option<f64>,
    suite: Option<&str>,
    eps: Option<&str>,
    output_format: OutputFormat,
) -> PyResult<RunConfig> {
    let mut cfg = RunConfig { k_list: harness::parse_k_list(k).map_err(to_py)?, theta0, output_format, ..RunConfig::default() };
    if let Some(tol) = tol {
        cfg.tol = tol;
    }
    if let Some(suite) = suite {
        cfg.suites = harness::parse_suites(suite).map_err(to_py)?;
    }
    if let Some(eps) = eps {
        cfg.eps_schedule = harness::parse_real_list(eps).map_err(to_py)?;
    }
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

#[pyfunction]
fn coherence_factor(m: i64, k: usize) -> PyResult<C64> {
    coherent::coherence_factor(m, &params(k)?).map_err(to_py)
}

#[pyfunction]
fn coherence_factor_monomial_ratio(m: i64, k: usize) -> PyResult<C64> {
    coherent::coherence_factor_monomial_ratio(m, &params(k)?).map_err(to_py)
}

/// `(value, expected, abs_err)` for `ratio` in `{"block", "offset"}` at `Q = q(1-eps)`.
#[pyfunction]
fn limit_ratio(ratio: &str, r: usize, s: usize, eps: f64, k: usize) -> PyResult<(C64, f64, f64)> {
    let ratio = match ratio {
        "block" => LimitRatio::Block,
        "offset" => LimitRatio::Offset,
        other => return Err(PyValueError::new_err(format!("unknown ratio '{other}'"))),
    };
    let p = coherent::limit_ratio(ratio, r, s, eps, &params(k)?);
    Ok((p.value, p.expected, p.abs_err))
}

#[pyfunction]
#[pyo3(signature = (k, theta0=0.0))]
fn phase_operator(k: usize, theta0: f64) -> PyResult<Matrix> {
    let cfg = PhaseConfig::new(k, theta0).map_err(to_py)?;
    let basis = phase::phase_states(k, &cfg).map_err(to_py)?;
    Ok(rows(&phase::phase_operator(&basis)))
}

/// `exp(±iφ)` on the phase basis; `sign` is `+1` or `-1`.
#[pyfunction]
#[pyo3(signature = (k, sign, theta0=0.0))]
fn exp_phase(k: usize, sign: i32, theta0: f64) -> PyResult<Matrix> {
    let cfg = PhaseConfig::new(k, theta0).map_err(to_py)?;
    let basis = phase::phase_states(k, &cfg).map_err(to_py)?;
    phase::exp_phase(&basis, &cfg, self::sign(sign)?).map(|op| rows(&op)).map_err(to_py)
}

/// The quon phase operator `E^{±iΦ}`.
#[pyfunction]
#[pyo3(signature = (k, sign, theta0=0.0))]
fn quon_phase(k: usize, sign: i32, theta0: f64) -> PyResult<Matrix> {
    let cfg = PhaseConfig::new(k, theta0).map_err(to_py)?;
    let rep = fockrep::build_rep(params(k)?);
    Ok(rows(&phase::quon_phase(&rep, &cfg, self::sign(sign)?)))
}

fn pair(k: usize, theta0: f64) -> PyResult<symmetry::SymmetryPair> {
    let cfg = PhaseConfig::new(k, theta0).map_err(to_py)?;
    symmetry::build_pair(&fockrep::build_rep(params(k)?), &cfg).map_err(to_py)
}

/// Lattice generator at `(n1, n2)` built from the `"UV"` or `"XY"` pair.
#[pyfunction]
#[pyo3(signature = (k, n1, n2, side="UV", theta0=0.0))]
fn sine_generator(k: usize, n1: i64, n2: i64, side: &str, theta0: f64) -> PyResult<Matrix> {
    let side = match side {
        "UV" => PairSide::UV,
        "XY" => PairSide::XY,
        other => return Err(PyValueError::new_err(format!("unknown pair '{other}'"))),
    };
    Ok(rows(&pair(k, theta0)?.generator(side, LatticeIndex::new(n1, n2))))
}

/// Product law and sine commutator on every index pair with entries in `[-bound, bound]`.
#[pyfunction]
#[pyo3(signature = (k, bound=3, theta0=0.0))]
fn lattice_sweep(k: usize, bound: i64, theta0: f64) -> PyResult<PyVerificationReport> {
    Ok(PyVerificationReport(symmetry::lattice_sweep_check(&pair(k, theta0)?, bound)))
}

/// JSON document with every named operator at `k`.
#[pyfunction]
#[pyo3(signature = (k, theta0=0.0))]
fn matrices_json(k: usize, theta0: f64) -> PyResult<String> {
    harness::matrices_json(k, theta0).map_err(to_py)
}

#[pymodule]
fn kfermion(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDeformationParams>()?;
    m.add_class::<PyQuonRep>()?;
    m.add_class::<PyVerificationReport>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_rendered, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_factor, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_factor_monomial_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(limit_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(phase_operator, m)?)?;
    m.add_function(wrap_pyfunction!(exp_phase, m)?)?;
    m.add_function(wrap_pyfunction!(quon_phase, m)?)?;
    m.add_function(wrap_pyfunction!(sine_generator, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(matrices_json, m)?)?;
    m.add("OUTPUT_DIR_ENV", harness::OUTPUT_DIR_ENV)?;
    Ok(())
}
