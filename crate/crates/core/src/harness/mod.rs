//! Run configuration, suite orchestration and machine-readable output.

mod export;
mod render;
mod tables;

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coherent::{
    coherence_factor_check, coherent_ket, coherent_ket_bar, eigenstate_check, limit_ratios, overcompleteness_check,
    scalar_product_check, supercoherent_check, supercoherent_limit, supercoherent_limit_check, DEFAULT_R_MAX,
};
use crate::error::{Error, Result};
use crate::fockrep::{build_rep, verify_defining_relations, verify_derived_relations, QuonRep};
use crate::grassmann::{realization_check, reorder_identity_check, verify_calculus};
use crate::phase::{phase_basis_check, quon_phase_check, PhaseConfig};
use crate::qcore::{
    conj_qnum_identity_check, qnum_consistency_check, DeformationParams, DEFAULT_TOL, EXTENDED_TOL, MAX_K,
    MAX_K_EXTENDED,
};
use crate::report::{Tag, VerificationReport, CONDITIONING};
use crate::symmetry::{build_pair, exchange_check, lattice_sweep_check, uqsl2_generators, uqsl2_relations_check, DEFAULT_SWEEP};

pub use export::{export_matrices, matrices_json};
pub use render::{render_report, write_output};
pub use tables::{emit_table, render_table, TableKind};

/// Environment variable naming the directory used when no output path is given.
pub const OUTPUT_DIR_ENV: &str = "KFERMION_OUTPUT_DIR";

/// Amplitude of the supercoherent state exercised by the coherent suite.
pub const SUPERCOHERENT_ALPHA: C64 = C64 { re: 0.6, im: 0.3 };

/// Default highest Fock level probed by the `Q → q` limit oracle.
pub const DEFAULT_N_MAX: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fockrep,
    Grassmann,
    Coherent,
    Phase,
    Symmetry,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Fockrep, Suite::Grassmann, Suite::Coherent, Suite::Phase, Suite::Symmetry];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Fockrep => "fockrep",
            Suite::Grassmann => "grassmann",
            Suite::Coherent => "coherent",
            Suite::Phase => "phase",
            Suite::Symmetry => "symmetry",
        }
    }

    /// Tag under which a suite-level failure (an error before any check ran)
    /// is reported.
    fn anchor_tag(&self) -> Tag {
        match self {
            Suite::Fockrep => Tag::Eq1,
            Suite::Grassmann => Tag::Eq25,
            Suite::Coherent => Tag::Eq39,
            Suite::Phase => Tag::Eq70,
            Suite::Symmetry => Tag::Eq87,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated suite list; `all` selects every suite.
pub fn parse_suites(text: &str) -> Result<Vec<Suite>> {
    let mut out = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(Suite::ALL);
        } else {
            out.insert(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no suites selected".into()));
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "txt",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// Parses `2,3,4`, `3..8` (inclusive) or a mix such as `2,5..7`.
pub fn parse_k_list(text: &str) -> Result<Vec<usize>> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("invalid k value '{}'", s.trim())))
    };
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
                if lo > hi {
                    return Err(Error::Config(format!("empty k range '{part}'")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(parse(part)?),
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty k list".into()));
    }
    Ok(out)
}

/// Parses a comma-separated list of reals.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid number '{}'", p.trim())))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k_list: Vec<usize>,
    pub theta0: f64,
    pub tol: f64,
    pub n_max: usize,
    pub r_max: usize,
    pub eps_schedule: Vec<f64>,
    pub suites: Vec<Suite>,
    pub output_format: OutputFormat,
    /// Not serialized, so reports written to different places stay identical.
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    /// Admits `k` up to 64 and raises the tolerance to at least 1e-6.
    pub extended: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k_list: (2..=8).collect(),
            theta0: 0.0,
            tol: DEFAULT_TOL,
            n_max: DEFAULT_N_MAX,
            r_max: DEFAULT_R_MAX,
            eps_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5],
            suites: Suite::ALL.to_vec(),
            output_format: OutputFormat::Json,
            output_path: None,
            extended: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            return Err(Error::Config("empty k list".into()));
        }
        let max = if self.extended { MAX_K_EXTENDED } else { MAX_K };
        for &k in &self.k_list {
            if k < 2 {
                return Err(Error::InvalidK(k));
            }
            if k > max {
                return Err(Error::KOutOfRange { k, max });
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.tol));
        }
        if !self.theta0.is_finite() {
            return Err(Error::Config(format!("theta0 must be finite, got {}", self.theta0)));
        }
        if self.eps_schedule.is_empty()
            || self.eps_schedule.iter().any(|&e| !(e > 0.0 && e <= 0.1))
            || self.eps_schedule.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Config("eps schedule must be strictly decreasing within (0, 0.1]".into()));
        }
        if self.r_max < 1 {
            return Err(Error::Config("r_max must be at least 1".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        Ok(())
    }

    /// Tolerance actually used by the checks.
    pub fn effective_tol(&self) -> f64 {
        if self.extended {
            self.tol.max(EXTENDED_TOL)
        } else {
            self.tol
        }
    }

    /// Selected suites in canonical order, without duplicates.
    pub fn suite_set(&self) -> Vec<Suite> {
        self.suites.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }
}

/// `dir/name` with `dir` from [`OUTPUT_DIR_ENV`], or `name` in the working
/// directory when the variable is unset.
pub fn default_output_path(name: &str) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => Path::new(&dir).join(name),
        _ => PathBuf::from(name),
    }
}

/// Runs every selected suite for every `k`, one thread per `k`, and merges
/// the per-`k` reports in `k_list` order.
pub fn run_suites(cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let reports: Vec<VerificationReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .k_list
            .iter()
            .map(|&k| scope.spawn(move || run_for_k(k, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|panic| std::panic::resume_unwind(panic)))
            .collect()
    });
    let mut out = VerificationReport::new();
    for report in reports {
        out.extend(report);
    }
    Ok(out)
}

fn run_for_k(k: usize, cfg: &RunConfig) -> VerificationReport {
    let mut report = VerificationReport::new();
    let params = match DeformationParams::with_tol(k, cfg.effective_tol()) {
        Ok(p) => p,
        Err(err) => {
            report.record(Tag::Eq1, k, [], f64::MAX, cfg.effective_tol(), Some(err.to_string()));
            return report;
        }
    };
    let rep = build_rep(params);
    for suite in cfg.suite_set() {
        let result = match suite {
            Suite::Fockrep => Ok(fockrep_suite(&rep)),
            Suite::Grassmann => Ok(grassmann_suite(&rep)),
            Suite::Coherent => coherent_suite(&rep, cfg),
            Suite::Phase => phase_suite(&rep, cfg),
            Suite::Symmetry => symmetry_suite(&rep, cfg),
        };
        match result {
            Ok(r) => report.extend(r.tagged_with([("suite", suite.name().to_string())])),
            Err(err) => report.record(
                suite.anchor_tag(),
                k,
                [("suite", suite.name().to_string())],
                f64::MAX,
                params.tol(),
                Some(format!("{CONDITIONING}: {err}")),
            ),
        }
    }
    report
}

fn fockrep_suite(rep: &QuonRep) -> VerificationReport {
    let params = rep.params;
    let mut report = qnum_consistency_check(&params);
    for n in 0..2 * params.k() {
        report.extend(conj_qnum_identity_check(n, &params));
    }
    report.extend(verify_defining_relations(rep));
    report.extend(verify_derived_relations(rep));
    report
}

fn grassmann_suite(rep: &QuonRep) -> VerificationReport {
    let params = rep.params;
    let mut report = verify_calculus(params);
    for n in 0..params.k() {
        report.extend(reorder_identity_check(n, params));
    }
    report.extend(realization_check(rep));
    report
}

fn coherent_suite(rep: &QuonRep, cfg: &RunConfig) -> Result<VerificationReport> {
    let params = rep.params;
    let k = params.k();
    let mut report = eigenstate_check(rep, &coherent_ket(params))?;
    report.extend(eigenstate_check(rep, &coherent_ket_bar(params))?);
    report.extend(scalar_product_check(params));
    report.extend(overcompleteness_check(rep));
    report.extend(coherence_factor_check(k as i64 + 1, &params));
    for r in 1..=3 {
        for s in 0..k {
            report.extend(limit_ratios(r, s, &cfg.eps_schedule, &params)?);
        }
    }
    let state = supercoherent_limit(SUPERCOHERENT_ALPHA, cfg.r_max, params)?;
    report.extend(supercoherent_check(&state));
    let eps = *cfg.eps_schedule.last().expect("validated non-empty");
    report.extend(supercoherent_limit_check(&state, cfg.n_max, eps)?);
    Ok(report)
}

fn phase_suite(rep: &QuonRep, cfg: &RunConfig) -> Result<VerificationReport> {
    let phase_cfg = PhaseConfig::new(rep.k(), cfg.theta0)?;
    let mut report = phase_basis_check(&phase_cfg, rep.params.tol())?;
    report.extend(quon_phase_check(rep, &phase_cfg));
    Ok(report)
}

fn symmetry_suite(rep: &QuonRep, cfg: &RunConfig) -> Result<VerificationReport> {
    let params = rep.params;
    let phase_cfg = PhaseConfig::new(rep.k(), cfg.theta0)?;
    let pair = build_pair(rep, &phase_cfg)?;
    let mut report = exchange_check(&pair);
    report.extend(lattice_sweep_check(&pair, DEFAULT_SWEEP));
    match uqsl2_generators(&pair, &params) {
        Ok(gens) => report.extend(uqsl2_relations_check(&gens, &params)),
        Err(Error::QuantumGroupDegenerate) => report.record(
            Tag::Eq98,
            params.k(),
            [("check", "k = 2 rejected".to_string())],
            0.0,
            params.tol(),
            Some(Error::QuantumGroupDegenerate.to_string()),
        ),
        Err(err) => return Err(err),
    }
    Ok(report)
}
