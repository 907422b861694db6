use std::path::PathBuf;
use std::str::FromStr;

use super::render::{csv_float, write_output};
use super::{default_output_path, run_suites, RunConfig};
use crate::coherent::{coherence_factor, limit_ratio, LimitRatio};
use crate::error::{Error, Result};
use crate::qcore::DeformationParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// `k, m, re, im, abs, expected` for `m = 1..=k+1`; `expected` is the
    /// predicted modulus `θ(k-1-m)`.
    Coherence,
    /// Limit-ratio traces along `Q = q(1 - ε)`.
    Limits,
    /// Every report entry, sorted by `(k, equation_tag)`.
    Residuals,
}

impl TableKind {
    pub fn name(&self) -> &'static str {
        match self {
            TableKind::Coherence => "coherence",
            TableKind::Limits => "limits",
            TableKind::Residuals => "residuals",
        }
    }
}

impl FromStr for TableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherence" => Ok(TableKind::Coherence),
            "limits" => Ok(TableKind::Limits),
            "residuals" => Ok(TableKind::Residuals),
            other => Err(Error::Config(format!("unknown table '{other}'"))),
        }
    }
}

fn to_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io { path: "<csv buffer>".into(), message: e.to_string() };
    writer.write_record(header).map_err(io)?;
    for row in rows {
        writer.write_record(row).map_err(io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io { path: "<csv buffer>".into(), message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Table contents as CSV text.
pub fn render_table(kind: TableKind, cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    match kind {
        TableKind::Coherence => {
            let mut rows = Vec::new();
            for &k in &cfg.k_list {
                let params = DeformationParams::with_tol(k, cfg.effective_tol())?;
                for m in 1..=(k as i64 + 1) {
                    let g = coherence_factor(m, &params)?;
                    let expected = if m <= k as i64 - 1 { 1.0 } else { 0.0 };
                    rows.push(vec![
                        k.to_string(),
                        m.to_string(),
                        csv_float(g.re),
                        csv_float(g.im),
                        csv_float(g.norm()),
                        csv_float(expected),
                    ]);
                }
            }
            to_csv(&["k", "m", "re", "im", "abs", "expected"], rows)
        }
        TableKind::Limits => {
            let mut rows = Vec::new();
            for &k in &cfg.k_list {
                let params = DeformationParams::with_tol(k, cfg.effective_tol())?;
                for r in 1..=3 {
                    for &eps in &cfg.eps_schedule {
                        let p = limit_ratio(LimitRatio::Block, r, 0, eps, &params);
                        rows.push(limit_row(k, r, None, &p));
                    }
                    for s in 1..k {
                        for &eps in &cfg.eps_schedule {
                            let p = limit_ratio(LimitRatio::Offset, r, s, eps, &params);
                            rows.push(limit_row(k, r, Some(s), &p));
                        }
                    }
                }
            }
            to_csv(
                &["k", "r", "s", "ratio", "eps", "ratio_re", "ratio_im", "expected", "abs_err"],
                rows,
            )
        }
        TableKind::Residuals => {
            let mut report = run_suites(cfg)?;
            report.sort();
            let rows = report
                .entries()
                .iter()
                .map(|e| {
                    vec![
                        e.k.to_string(),
                        e.equation_tag.as_str().to_string(),
                        e.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
                        csv_float(e.residual),
                        csv_float(e.tol),
                        e.passed.to_string(),
                    ]
                })
                .collect();
            to_csv(&["k", "equation_tag", "params", "residual", "tol", "passed"], rows)
        }
    }
}

fn limit_row(k: usize, r: usize, s: Option<usize>, p: &crate::coherent::LimitPoint) -> Vec<String> {
    vec![
        k.to_string(),
        r.to_string(),
        s.map(|s| s.to_string()).unwrap_or_default(),
        p.ratio.name().to_string(),
        csv_float(p.eps),
        csv_float(p.value.re),
        csv_float(p.value.im),
        csv_float(p.expected),
        csv_float(p.abs_err),
    ]
}

/// Writes the table to `cfg.output_path`, or to `<kind>.csv` in the default
/// output directory, and returns the path written.
pub fn emit_table(kind: TableKind, cfg: &RunConfig) -> Result<PathBuf> {
    let text = render_table(kind, cfg)?;
    let path = cfg
        .output_path
        .clone()
        .unwrap_or_else(|| default_output_path(&format!("{}.csv", kind.name())));
    write_output(&text, &path)?;
    Ok(path)
}
