//! Parsing of grids, numeric lists, coefficient files and function specs.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use super::CliError;
use crate::arith::SieveTable;
use crate::sequences::{CoefficientSequence, MultiplicativeSpec};

/// Built-in coefficient sequence names.
pub const BUILTINS: [&str; 5] = ["mu", "unit", "one", "liouville", "inverse-squares"];

/// What an input file or name resolved to.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Spec(MultiplicativeSpec),
    Coefficients(CoefficientSequence),
}

fn parse_count(s: &str) -> Result<u64, CliError> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    // scientific notation such as 1e6
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::Parse(format!("not a natural number: {s:?}")))?;
    if v.fract() != 0.0 || !(1.0..=9.007e15).contains(&v) {
        return Err(CliError::Parse(format!("not a natural number: {s:?}")));
    }
    Ok(v as u64)
}

/// Parses `10,100,1000`, a single value, or the geometric form `a:b:xF`.
///
/// The result must be nonempty, strictly ascending and at least 1.
pub fn parse_grid(text: &str) -> Result<Vec<u64>, CliError> {
    let text = text.trim();
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, end, factor] = parts[..] else {
            return Err(CliError::Parse(format!(
                "geometric grid must look like a:b:xF, got {text:?}"
            )));
        };
        let start = parse_count(start)?;
        let end = parse_count(end)?;
        let factor: f64 = factor
            .trim()
            .strip_prefix('x')
            .ok_or_else(|| {
                CliError::Parse(format!("grid factor must start with 'x', got {factor:?}"))
            })?
            .parse()
            .map_err(|_| CliError::Parse(format!("bad grid factor in {text:?}")))?;
        if !(factor > 1.0) || !factor.is_finite() {
            return Err(CliError::Parse(format!(
                "grid factor must exceed 1, got {factor}"
            )));
        }
        if start == 0 || start > end {
            return Err(CliError::Parse(format!(
                "grid needs 1 <= a <= b, got {start}:{end}"
            )));
        }
        let mut out = vec![start];
        let mut x = start as f64;
        loop {
            x *= factor;
            let next = x.round() as u64;
            if next > end {
                break;
            }
            if next > *out.last().expect("nonempty") {
                out.push(next);
            }
        }
        out
    } else {
        text.split(',')
            .map(parse_count)
            .collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() || grid[0] == 0 {
        return Err(CliError::Parse("grid values must be at least 1".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Parse(format!(
            "grid must be strictly ascending: {text:?}"
        )));
    }
    Ok(grid)
}

/// Comma-separated reals.
pub fn parse_reals(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Parse(format!("not a real number: {s:?}")))
        })
        .collect()
}

/// A built-in coefficient sequence of length `n`.
pub fn builtin(name: &str, n: usize) -> Result<CoefficientSequence, CliError> {
    let c = |x: f64| Complex64::new(x, 0.0);
    Ok(match name {
        "mu" => {
            let table = SieveTable::new(n.max(2))?;
            let mu = table.mobius_table(n)?;
            CoefficientSequence::from_real(mu[1..].iter().map(|&v| f64::from(v)))
        }
        "unit" => CoefficientSequence::from_fn(n, |k| c(if k == 1 { 1.0 } else { 0.0 })),
        "one" => CoefficientSequence::from_fn(n, |_| c(1.0)),
        "liouville" => {
            let table = SieveTable::new(n.max(2))?;
            let mut v = vec![c(1.0); n];
            for m in 2..=n {
                let p = table.spf(m)?;
                v[m - 1] = -v[m / p - 1];
            }
            CoefficientSequence::new(v)
        }
        "inverse-squares" => CoefficientSequence::from_fn(n, |k| c(1.0 / (k as f64 * k as f64))),
        other => {
            return Err(CliError::Parse(format!(
                "unknown built-in sequence {other:?}; expected one of {BUILTINS:?}"
            )))
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientFile {
    #[serde(rename = "type")]
    kind: String,
    values: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct Tagged {
    #[serde(rename = "type")]
    kind: String,
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse(format!(
        "{}: line {} column {}: {e}",
        path.display(),
        e.line(),
        e.column()
    ))
}

/// Parses JSON text holding either a function spec or a coefficient list.
pub fn parse_input_text(text: &str, path: &Path) -> Result<Input, CliError> {
    let tag: Tagged = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    match tag.kind.as_str() {
        "completely_multiplicative" => MultiplicativeSpec::from_json(text)
            .map(Input::Spec)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display()))),
        "coefficients" => {
            let file: CoefficientFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
            debug_assert_eq!(file.kind, "coefficients");
            if let Some(i) = file.values.iter().position(|v| !v[0].is_finite() || !v[1].is_finite()) {
                return Err(CliError::Parse(format!("{}: values[{i}] is not finite", path.display())));
            }
            if file.values.is_empty() {
                return Err(CliError::Parse(format!("{}: values is empty", path.display())));
            }
            Ok(Input::Coefficients(CoefficientSequence::new(
                file.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
            )))
        }
        other => Err(CliError::Parse(format!(
            "{}: field \"type\": expected \"completely_multiplicative\" or \"coefficients\", got {other:?}",
            path.display()
        ))),
    }
}

/// Reads a spec or coefficient file.
pub fn parse_spec(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_input_text(&text, path)
}

/// Resolves `--coeffs`: a built-in name, else a JSON file.
pub fn resolve_coeffs(name_or_path: &str, n: usize) -> Result<Input, CliError> {
    if BUILTINS.contains(&name_or_path) {
        return builtin(name_or_path, n).map(Input::Coefficients);
    }
    let path = Path::new(name_or_path);
    if !path.exists() && !name_or_path.contains(['.', '/']) {
        return builtin(name_or_path, n).map(Input::Coefficients);
    }
    parse_spec(path)
}
