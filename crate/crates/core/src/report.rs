//! Pass/fail records for identity checks.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Detail prefix used when a residual could not be evaluated in floating point.
pub const CONDITIONING: &str = "conditioning";

macro_rules! tags {
    ($($variant:ident => $label:literal),* $(,)?) => {
        /// Registry of the equations the toolkit checks. Ordering follows the
        /// equation numbering and is used for sorting report rows.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum Tag {
            $(#[serde(rename = $label)] $variant,)*
        }

        impl Tag {
            pub const ALL: &'static [Tag] = &[$(Tag::$variant,)*];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $(Tag::$variant => $label,)*
                }
            }

            pub fn parse(label: &str) -> Option<Tag> {
                match label {
                    $($label => Some(Tag::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

tags! {
    Eq1 => "Eq.1",
    Eq2a => "Eq.2a",
    Eq2b => "Eq.2b",
    Eq4a => "Eq.4a",
    Eq4b => "Eq.4b",
    Eq6a => "Eq.6a",
    Eq6b => "Eq.6b",
    Eq7a => "Eq.7a",
    Eq7b => "Eq.7b",
    Eq8a => "Eq.8a",
    Eq8b => "Eq.8b",
    Eq9a => "Eq.9a",
    Eq9b => "Eq.9b",
    Eq13 => "Eq.13",
    Eq14 => "Eq.14",
    Eq16 => "Eq.16",
    Eq17a => "Eq.17a",
    Eq17b => "Eq.17b",
    Eq19 => "Eq.19",
    Eq20 => "Eq.20",
    Eq25 => "Eq.25",
    Eq26 => "Eq.26",
    Eq31 => "Eq.31",
    Eq32 => "Eq.32",
    Eq33 => "Eq.33",
    Eq34 => "Eq.34",
    Eq35 => "Eq.35",
    Eq36 => "Eq.36",
    Eq39 => "Eq.39",
    Eq40 => "Eq.40",
    Eq44 => "Eq.44",
    Eq45 => "Eq.45",
    Eq46 => "Eq.46",
    Eq47 => "Eq.47",
    Eq49 => "Eq.49",
    Eq50 => "Eq.50",
    Eq51 => "Eq.51",
    Eq57 => "Eq.57",
    Eq58 => "Eq.58",
    Eq64a => "Eq.64a",
    Eq64b => "Eq.64b",
    Eq69 => "Eq.69",
    Eq70 => "Eq.70",
    Eq73 => "Eq.73",
    Eq74 => "Eq.74",
    Eq75 => "Eq.75",
    Eq76 => "Eq.76",
    Eq77 => "Eq.77",
    Eq81 => "Eq.81",
    Eq84 => "Eq.84",
    Eq85 => "Eq.85",
    Eq86 => "Eq.86",
    Eq87 => "Eq.87",
    Eq88 => "Eq.88",
    Eq89 => "Eq.89",
    Eq90 => "Eq.90",
    Eq93 => "Eq.93",
    Eq95 => "Eq.95",
    Eq98 => "Eq.98",
    Eq99 => "Eq.99",
    Eq100 => "Eq.100",
    A2 => "A.2",
    A3 => "A.3",
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub equation_tag: Tag,
    pub k: usize,
    pub params: BTreeMap<String, String>,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// Ordered collection of check results. `passed` is always `residual <= tol`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    entries: Vec<ReportEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record<'a, P>(
        &mut self,
        tag: Tag,
        k: usize,
        params: P,
        residual: f64,
        tol: f64,
        detail: Option<String>,
    ) where
        P: IntoIterator<Item = (&'a str, String)>,
    {
        let params = params
            .into_iter()
            .map(|(key, value)| (key.to_string(), value))
            .collect();
        let (residual, detail) = if residual.is_finite() {
            (residual, detail)
        } else {
            let note = match detail {
                Some(d) => format!("{CONDITIONING}: non-finite residual; {d}"),
                None => format!("{CONDITIONING}: non-finite residual"),
            };
            (f64::MAX, Some(note))
        };
        self.entries.push(ReportEntry {
            equation_tag: tag,
            k,
            params,
            residual,
            tol,
            passed: residual <= tol,
            detail,
        });
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    /// Adds `params` to every entry, keeping existing keys.
    pub fn tagged_with<'a>(mut self, params: impl IntoIterator<Item = (&'a str, String)>) -> Self {
        let params: Vec<(&str, String)> = params.into_iter().collect();
        for entry in &mut self.entries {
            for (key, value) in &params {
                entry.params.entry(key.to_string()).or_insert_with(|| value.clone());
            }
        }
        self
    }

    pub fn entries(&self) -> &[ReportEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ReportEntry> {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn with_tag(&self, tag: Tag) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(move |e| e.equation_tag == tag)
    }

    /// Largest residual among entries carrying `tag`, if any.
    pub fn max_residual(&self, tag: Tag) -> Option<f64> {
        self.with_tag(tag).map(|e| e.residual).reduce(f64::max)
    }

    pub fn summary(&self) -> Summary {
        let passed = self.entries.iter().filter(|e| e.passed).count();
        Summary {
            total: self.entries.len(),
            passed,
            failed: self.entries.len() - passed,
        }
    }

    /// Stable sort by `(k, equation_tag)`; checks of the same equation keep
    /// their generation order.
    pub fn sort(&mut self) {
        self.entries.sort_by_key(|e| (e.k, e.equation_tag));
    }
}

impl fmt::Display for ReportEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:<7} k={:<2} residual={:.3e} tol={:.1e}",
            self.equation_tag.as_str(),
            self.k,
            self.residual,
            self.tol
        )?;
        for (key, value) in &self.params {
            write!(f, " {key}={value}")?;
        }
        if let Some(detail) = &self.detail {
            write!(f, " [{detail}]")?;
        }
        Ok(())
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for entry in &self.entries {
            writeln!(f, "{entry}")?;
        }
        let s = self.summary();
        write!(f, "total={} passed={} failed={}", s.total, s.passed, s.failed)
    }
}

/// `‖lhs - rhs‖_F / max(1, ‖rhs‖_F)`.
pub fn relative_residual(lhs: &DMatrix<C64>, rhs: &DMatrix<C64>) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// `|lhs - rhs| / max(1, |rhs|)`.
pub fn relative_residual_scalar(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}
