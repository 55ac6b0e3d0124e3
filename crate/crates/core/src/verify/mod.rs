//! Verification harness: report types plus the theorem, condition and
//! identity checks.

mod difference;
mod identities;
mod theorems;

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use difference::{difference_identity_check, DifferenceIdentity};
pub use identities::{
    s_decomposition_identity, s_difference_identity, s_multiplicative_identity, IdentityError,
};
pub use theorems::{
    check_axer, check_wintner, cond1_ratio, cond2_ratio, multiplicative_rows, theorem1_report,
    theorem1_residual, theorem1_spec_report, theorem2_conditions, theorem3_check, theorem3_report,
    AxerCheck, MultiplicativeTable, Theorem2Config, Theorem3Check, WintnerCheck, THEOREM1_COEFF,
    THEOREM3_ENVELOPE,
};

/// Threshold names understood by [`VerificationReport::recheck`].
pub mod keys {
    /// Row passes when `theorem1_residual <= c / log n`.
    pub const T1_COEFF: &str = "t1_coeff";
    /// Rows must have nonincreasing `theorem1_residual` (value ignored).
    pub const T1_MONOTONE: &str = "t1_monotone";
    /// Row passes when the Euler-product ratio is finite and at most this.
    pub const T3_RATIO_MAX: &str = "t3_ratio_max";
    pub const T3_RESIDUAL_MAX: &str = "t3_residual_max";
    /// Bound on the last `s_ratio`; combined with [`BURN_IN`].
    pub const S_RATIO_MAX: &str = "s_ratio_max";
    /// Fraction of leading rows exempt from the monotone trend check.
    pub const BURN_IN: &str = "burn_in";
    pub const AXER_MAX: &str = "axer_max";
    pub const WINTNER_MAX: &str = "wintner_max";
}

/// Relative slack allowed when comparing successive values for monotonicity.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// A ratio that may be infinite; serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    /// `residual / denom`, with the zero-denominator convention: 0 when the
    /// residual is at most `1e-12`, otherwise infinite.
    pub fn of(residual: f64, denom: f64) -> Self {
        if denom > 0.0 {
            Ratio::Finite(residual / denom)
        } else if residual <= 1e-12 {
            Ratio::Finite(0.0)
        } else {
            Ratio::Infinite
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ratio::Finite(v) => Some(v),
            Ratio::Infinite => None,
        }
    }

    pub fn max(self, other: Ratio) -> Ratio {
        match (self, other) {
            (Ratio::Finite(a), Ratio::Finite(b)) => Ratio::Finite(a.max(b)),
            _ => Ratio::Infinite,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RatioRepr {
    Finite(f64),
    Marker(String),
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Ratio::Finite(v) => RatioRepr::Finite(v),
            Ratio::Infinite => RatioRepr::Marker("inf".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RatioRepr::deserialize(d)? {
            RatioRepr::Finite(v) => Ok(Ratio::Finite(v)),
            RatioRepr::Marker(m) if m == "inf" => Ok(Ratio::Infinite),
            RatioRepr::Marker(m) => Err(serde::de::Error::custom(format!(
                "unknown ratio marker {m:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: u64,
    /// `A(n)/n`.
    pub mean: Complex64,
    /// `|S(n)| / (n log n)`; absent at `n = 1`.
    pub s_ratio: Option<f64>,
    /// `g(1 + 1/log n)`.
    pub g: Option<Complex64>,
    pub euler_product_at_1: Option<Complex64>,
    pub theorem1_residual: Option<f64>,
    pub theorem3_residual: Option<f64>,
    pub mu_alpha: Option<f64>,
    pub ratio: Option<Ratio>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
    pub pass: bool,
}

impl ReportRow {
    pub fn new(n: u64, mean: Complex64) -> Self {
        Self {
            n,
            mean,
            s_ratio: None,
            g: None,
            euler_product_at_1: None,
            theorem1_residual: None,
            theorem3_residual: None,
            mu_alpha: None,
            ratio: None,
            extras: BTreeMap::new(),
            pass: true,
        }
    }
}

/// `g(σ)` along a descending σ-grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub sigma: f64,
    pub g: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max_residual: Option<f64>,
    pub ratio_estimate: Option<Ratio>,
    pub thresholds: BTreeMap<String, f64>,
    /// Report-level checks that are not tied to a single row.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, bool>,
    pub pass: bool,
    /// Kept in memory only, so serialized reports are reproducible.
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment_id: String,
    /// The limit value the rows are expected to approach, when known.
    pub target: Option<Complex64>,
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigma_rows: Vec<SigmaRow>,
    pub summary: Summary,
}

fn le_with_slack(next: f64, prev: f64) -> bool {
    next <= prev * (1.0 + MONOTONE_SLACK) + 1e-15
}

impl VerificationReport {
    /// Builds a report, deriving every row's pass flag and the summary from
    /// `thresholds` and `checks`.
    pub fn assemble(
        experiment_id: impl Into<String>,
        target: Option<Complex64>,
        mut rows: Vec<ReportRow>,
        sigma_rows: Vec<SigmaRow>,
        thresholds: BTreeMap<String, f64>,
        checks: BTreeMap<String, bool>,
    ) -> Self {
        rows.sort_by_key(|r| r.n);
        let flags = row_flags(&rows, &thresholds);
        for (row, ok) in rows.iter_mut().zip(flags) {
            row.pass = ok;
        }
        let max_residual = rows
            .iter()
            .filter_map(|r| match (r.theorem1_residual, r.theorem3_residual) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            })
            .reduce(f64::max);
        let ratio_estimate = rows.iter().filter_map(|r| r.ratio).reduce(Ratio::max);
        let pass = rows.iter().all(|r| r.pass) && checks.values().all(|&c| c);
        VerificationReport {
            experiment_id: experiment_id.into(),
            target,
            rows,
            sigma_rows,
            summary: Summary {
                max_residual,
                ratio_estimate,
                thresholds,
                checks,
                pass,
                wall_time: None,
            },
        }
    }

    /// Recomputes every pass flag from stored values and thresholds and
    /// reports whether they agree with the stored flags.
    pub fn recheck(&self) -> bool {
        let flags = row_flags(&self.rows, &self.summary.thresholds);
        let rows_ok = self.rows.iter().zip(&flags).all(|(r, &f)| r.pass == f);
        let pass = flags.iter().all(|&f| f) && self.summary.checks.values().all(|&c| c);
        rows_ok && pass == self.summary.pass
    }

    pub fn with_wall_time(mut self, elapsed: Duration) -> Self {
        self.summary.wall_time = Some(elapsed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("report JSON: {e}")))
    }

    /// Writes the fixed-column CSV form; inapplicable cells are `NA`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        // extra diagnostics become trailing columns, NA where a row lacks one
        let extra: std::collections::BTreeSet<&str> = self
            .rows
            .iter()
            .flat_map(|r| r.extras.keys().map(String::as_str))
            .collect();
        w.write_record(CSV_HEADER.iter().copied().chain(extra.iter().copied()))
            .map_err(io)?;
        for r in &self.rows {
            let (re_g, im_g) = r.g.map_or((na(), na()), |g| (num(g.re), num(g.im)));
            w.write_record(
                [
                    r.n.to_string(),
                    num(r.mean.re),
                    num(r.mean.im),
                    re_g,
                    im_g,
                    opt(r.theorem1_residual),
                    opt(r.theorem3_residual),
                    opt(r.mu_alpha),
                    opt(r.s_ratio),
                    r.pass.to_string(),
                ]
                .into_iter()
                .chain(extra.iter().map(|k| opt(r.extras.get(*k).copied()))),
            )
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "n",
    "re_mean",
    "im_mean",
    "re_g",
    "im_g",
    "residual_t1",
    "residual_t3",
    "mu_alpha",
    "s_ratio",
    "pass",
];

fn na() -> String {
    "NA".to_string()
}

/// Shortest round-trip decimal form of `x`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(na, num)
}

fn row_flags(rows: &[ReportRow], th: &BTreeMap<String, f64>) -> Vec<bool> {
    let burn = th.get(keys::BURN_IN).copied().unwrap_or(0.5);
    let trend_start = ((rows.len() as f64) * burn).floor() as usize;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let prev = i.checked_sub(1).map(|j| &rows[j]);
            let mut ok = true;
            if let Some(&c) = th.get(keys::T1_COEFF) {
                ok &= r.theorem1_residual.is_some_and(|v| r.n >= 2 && v <= c / (r.n as f64).ln());
            }
            if th.contains_key(keys::T1_MONOTONE) {
                if let Some(p) = prev {
                    ok &= matches!((r.theorem1_residual, p.theorem1_residual), (Some(a), Some(b)) if le_with_slack(a, b));
                }
            }
            if let Some(&m) = th.get(keys::T3_RATIO_MAX) {
                ok &= r.ratio.and_then(Ratio::finite).is_some_and(|v| v <= m);
            }
            if let Some(&m) = th.get(keys::T3_RESIDUAL_MAX) {
                ok &= r.theorem3_residual.is_some_and(|v| v <= m);
            }
            if let Some(&m) = th.get(keys::AXER_MAX) {
                ok &= r.extras.get("axer_ratio").is_some_and(|&v| v <= m);
            }
            if let Some(&m) = th.get(keys::WINTNER_MAX) {
                ok &= r.extras.get("wintner_residual").is_some_and(|&v| v <= m);
            }
            if let Some(&m) = th.get(keys::S_RATIO_MAX) {
                if i > trend_start {
                    let p = prev.expect("i > 0");
                    ok &= matches!((r.s_ratio, p.s_ratio), (Some(a), Some(b)) if le_with_slack(a, b));
                }
                if i + 1 == rows.len() {
                    ok &= r.s_ratio.is_some_and(|v| v <= m);
                }
            }
            ok
        })
        .collect()
}
