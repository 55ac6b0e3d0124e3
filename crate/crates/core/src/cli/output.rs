//! Plot-ready tables for the commands that do not emit a verification
//! report.

use num_complex::Complex64;
use serde::Serialize;

use super::CliError;
use crate::lemma::LemmaCell;
use crate::verify::{num, DifferenceIdentity, IdentityError};

/// One table row: fixed headers and the matching CSV cells.
pub trait TableRow: Serialize {
    fn headers() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

const NA: &str = "NA";

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), num)
}

fn opt_c(z: Option<Complex64>) -> [String; 2] {
    z.map_or_else(
        || [NA.to_string(), NA.to_string()],
        |z| [num(z.re), num(z.im)],
    )
}

#[derive(Serialize)]
struct Document<'a, R> {
    command: &'a str,
    rows: &'a [R],
}

pub fn render_json<R: TableRow>(command: &str, rows: &[R]) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&Document { command, rows })
        .expect("rows contain only finite numbers");
    out.push(b'\n');
    out
}

pub fn render_csv<R: TableRow>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(R::headers())?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    w.into_inner()
        .map_err(|e| CliError::Parse(format!("csv: {e}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveRow {
    pub n: u64,
    pub prime_count: usize,
    pub psi: f64,
    pub delta: f64,
    pub mertens: i64,
    pub mu_over_d: f64,
}

impl TableRow for SieveRow {
    fn headers() -> &'static [&'static str] {
        &["n", "prime_count", "psi", "delta", "mertens", "mu_over_d"]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.prime_count.to_string(),
            num(self.psi),
            num(self.delta),
            self.mertens.to_string(),
            num(self.mu_over_d),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanRow {
    pub n: u64,
    pub mean: Complex64,
    pub euler_product_at_1: Option<Complex64>,
    pub g: Option<Complex64>,
    pub mu_alpha: Option<f64>,
    pub residual_t1: Option<f64>,
    pub residual_t3: Option<f64>,
}

impl TableRow for MeanRow {
    fn headers() -> &'static [&'static str] {
        &[
            "n",
            "re_mean",
            "im_mean",
            "re_euler",
            "im_euler",
            "re_g",
            "im_g",
            "mu_alpha",
            "residual_t1",
            "residual_t3",
        ]
    }
    fn cells(&self) -> Vec<String> {
        let [re_e, im_e] = opt_c(self.euler_product_at_1);
        let [re_g, im_g] = opt_c(self.g);
        vec![
            self.n.to_string(),
            num(self.mean.re),
            num(self.mean.im),
            re_e,
            im_e,
            re_g,
            im_g,
            opt(self.mu_alpha),
            opt(self.residual_t1),
            opt(self.residual_t3),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InghamRow {
    pub n: u64,
    pub a: Complex64,
    pub s: Complex64,
    pub mean: Complex64,
    pub normalized_s: Option<Complex64>,
}

impl TableRow for InghamRow {
    fn headers() -> &'static [&'static str] {
        &[
            "n",
            "re_A",
            "im_A",
            "re_S",
            "im_S",
            "re_mean",
            "im_mean",
            "re_s_norm",
            "im_s_norm",
        ]
    }
    fn cells(&self) -> Vec<String> {
        let [re_ns, im_ns] = opt_c(self.normalized_s);
        vec![
            self.n.to_string(),
            num(self.a.re),
            num(self.a.im),
            num(self.s.re),
            num(self.s.im),
            num(self.mean.re),
            num(self.mean.im),
            re_ns,
            im_ns,
        ]
    }
}

impl TableRow for LemmaCell {
    fn headers() -> &'static [&'static str] {
        &["family", "t", "x", "k", "value", "envelope_shape", "ratio"]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.family.label().to_string(),
            opt(self.t),
            self.x.to_string(),
            self.k.map_or_else(|| NA.to_string(), |k| k.to_string()),
            num(self.value),
            num(self.envelope_shape),
            num(self.ratio),
        ]
    }
}

impl TableRow for DifferenceIdentity {
    fn headers() -> &'static [&'static str] {
        &[
            "n",
            "sigma",
            "re_lhs",
            "im_lhs",
            "re_rhs",
            "im_rhs",
            "error",
            "tail_at_sigma",
            "tail_slack",
            "quad_error",
        ]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            num(self.sigma),
            num(self.lhs.re),
            num(self.lhs.im),
            num(self.rhs.re),
            num(self.rhs.im),
            num(self.error),
            num(self.tail_at_sigma),
            num(self.tail_slack),
            num(self.quad_error),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactIdentityRow {
    pub n: u64,
    #[serde(flatten)]
    pub error: IdentityError,
    pub relative: f64,
}

impl TableRow for ExactIdentityRow {
    fn headers() -> &'static [&'static str] {
        &["n", "abs_error", "scale", "relative"]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            num(self.error.abs_error),
            num(self.error.scale),
            num(self.relative),
        ]
    }
}
