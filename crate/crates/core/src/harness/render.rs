use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::report::{ReportEntry, Summary, VerificationReport};

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a RunConfig,
    entries: &'a [ReportEntry],
    summary: Summary,
}

/// Floats in CSV output: 17 significant digits.
pub(crate) fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn params_field(entry: &ReportEntry) -> String {
    entry
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Renders `report` in `cfg.output_format`.
pub fn render_report(report: &VerificationReport, cfg: &RunConfig) -> Result<String> {
    match cfg.output_format {
        OutputFormat::Json => {
            let doc = JsonReport { config: cfg, entries: report.entries(), summary: report.summary() };
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io { path: "<csv buffer>".into(), message: e.to_string() };
            writer
                .write_record(["equation_tag", "k", "params", "residual", "tol", "passed", "detail"])
                .map_err(io)?;
            for e in report.entries() {
                writer
                    .write_record([
                        e.equation_tag.as_str().to_string(),
                        e.k.to_string(),
                        params_field(e),
                        csv_float(e.residual),
                        csv_float(e.tol),
                        e.passed.to_string(),
                        e.detail.clone().unwrap_or_default(),
                    ])
                    .map_err(io)?;
            }
            let bytes = writer.into_inner().map_err(|e| Error::Io { path: "<csv buffer>".into(), message: e.to_string() })?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        OutputFormat::Text => Ok(report.to_string()),
    }
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_output(text: &str, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Tag;

    fn sample() -> VerificationReport {
        let mut r = VerificationReport::new();
        r.record(Tag::Eq1, 3, [("suite", "fockrep".to_string())], 1.5e-16, 1e-9, None);
        r.record(Tag::Eq86, 3, [("a", "x,y".to_string())], 2.0, 1e-9, Some("bad, \"quoted\"".into()));
        r
    }

    #[test]
    fn csv_layout() {
        let cfg = RunConfig { output_format: OutputFormat::Csv, ..RunConfig::default() };
        let text = render_report(&sample(), &cfg).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "equation_tag,k,params,residual,tol,passed,detail");
        assert_eq!(lines.next().unwrap(), "Eq.1,3,suite=fockrep,1.5000000000000000e-16,1.0000000000000001e-9,true,");
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(&rows[1][2], "a=x,y");
        assert_eq!(&rows[1][6], "bad, \"quoted\"");
        let residual: f64 = rows[0][3].parse().unwrap();
        assert_eq!(residual, 1.5e-16);
    }

    #[test]
    fn json_schema() {
        let cfg = RunConfig::default();
        let text = render_report(&sample(), &cfg).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["summary"]["total"], 2);
        assert_eq!(v["summary"]["failed"], 1);
        assert_eq!(v["entries"][1]["equation_tag"], "Eq.86");
        assert_eq!(v["config"]["k_list"][0], 2);
        assert!(v["config"].get("output_path").is_none());
        assert!(v["entries"][0].get("detail").is_none());
    }

    #[test]
    fn text_lines() {
        let cfg = RunConfig { output_format: OutputFormat::Text, ..RunConfig::default() };
        let text = render_report(&sample(), &cfg).unwrap();
        assert!(text.lines().next().unwrap().starts_with("PASS"));
        assert!(text.lines().nth(1).unwrap().starts_with("FAIL"));
    }
}
