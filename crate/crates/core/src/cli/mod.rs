//! The `ingham` command-line front end.
//!
//! Every command renders its artifact to bytes first, so identical
//! configurations produce identical files.

pub mod input;
pub mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{PsiTable, SieveTable};
use crate::dirichlet::{g_eval, EvalParams};
use crate::error::Error;
use crate::lemma::{self, DEFAULT_ENVELOPE};
use crate::sequences::{CoefficientSequence, MultiplicativeSpec};
use crate::summation::batch_sums;
use crate::verify::{self, keys, MultiplicativeTable, ReportRow, VerificationReport};
use input::{parse_grid, parse_reals, parse_spec, resolve_coeffs, Input};
use output::{render_csv, render_json, ExactIdentityRow, InghamRow, MeanRow, SieveRow, TableRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad input, 3 for capacity, 4 for non-convergence, 5 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Lib(Error::Capacity { .. }) => 3,
            CliError::Lib(Error::NonConvergence(_)) => 4,
            CliError::Lib(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A complete run configuration as parsed from the command line.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "ingham",
    version,
    about = "Ingham sums, Dirichlet series and Tauberian checks"
)]
pub struct ExperimentConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output file (default: standard output).
    #[arg(long, global = true, env = "INGHAM_OUT")]
    pub out: Option<PathBuf>,
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "csv",
        env = "INGHAM_FORMAT"
    )]
    pub format: Format,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true, env = "INGHAM_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Completely multiplicative function spec (JSON).
    #[arg(long, env = "INGHAM_SPEC", conflicts_with = "coeffs")]
    pub spec: Option<PathBuf>,
    /// Built-in sequence (mu, unit, one, liouville, inverse-squares) or a JSON coefficient file.
    #[arg(long, env = "INGHAM_COEFFS")]
    pub coeffs: Option<String>,
    /// Length of a built-in sequence (default: largest n needed).
    #[arg(long, env = "INGHAM_LENGTH")]
    pub length: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// n values: `10,100,1000` or geometric `1e3:1e6:x10`.
    #[arg(long = "n", visible_alias = "grid", env = "INGHAM_N")]
    pub n: String,
}

#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Descending σ list for condition 2 (default: 1 + 1/log n over the grid).
    #[arg(long, env = "INGHAM_SIGMA")]
    pub sigma: Option<String>,
    #[arg(long, default_value_t = 2.0, env = "INGHAM_ALPHA")]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-8, env = "INGHAM_QUAD_TOL")]
    pub quad_tol: f64,
    #[arg(long, default_value_t = 1e-12, env = "INGHAM_TAIL_TOL")]
    pub tail_tol: f64,
    /// Dirichlet series truncation K.
    #[arg(long, default_value_t = 1_000_000, env = "INGHAM_TRUNCATION")]
    pub truncation: usize,
    /// Override of the frozen envelope constant for the chosen check.
    #[arg(long, env = "INGHAM_ENVELOPE")]
    pub envelope: Option<f64>,
}

impl NumericArgs {
    fn params(&self) -> Result<EvalParams, CliError> {
        let p = EvalParams {
            sigma: 2.0,
            truncation: self.truncation,
            quad_tol: self.quad_tol,
            tail_tol: self.tail_tol,
            alpha: self.alpha,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Prime counts, Ψ, Mertens and Σμ(d)/d at each n.
    Sieve {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Mean values, Euler products and μ_n(α).
    Mean {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Ingham sums A(n) and S(n).
    Ingham {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Theorem and condition checks producing a verification report.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Ratio suite for the f_t / F_t estimates.
    Lemma {
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Identity checks at small n.
    Identity {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value = "difference", env = "INGHAM_KIND")]
        kind: IdentityKind,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Re-emits a JSON verification report in the requested format.
    Report {
        /// Path of a JSON report.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityKind {
    Difference,
    SDifference,
    SDecomposition,
    SMultiplicative,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    /// Require the residuals to be nonincreasing along the grid.
    #[arg(long)]
    pub monotone: bool,
    #[arg(long, default_value_t = 0.5)]
    pub burn_in: f64,
    #[arg(long, default_value_t = 0.25)]
    pub s_ratio_max: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum VerifyCommand {
    Theorem1(VerifyArgs),
    Theorem2(VerifyArgs),
    Theorem3(VerifyArgs),
    Wintner(VerifyArgs),
    Axer(VerifyArgs),
    Cond(VerifyArgs),
}

/// Renders and writes the artifact for `config`.
pub fn run(config: &ExperimentConfig) -> Result<(), CliError> {
    let bytes = render(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// The artifact bytes for `config`.
pub fn render(config: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    match config.workers {
        Some(0) => Err(CliError::Parse("--workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Parse(format!("worker pool: {e}")))?;
            pool.install(|| dispatch(config))
        }
        None => dispatch(config),
    }
}

fn dispatch(config: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let fmt = config.format;
    match &config.command {
        Command::Sieve { grid } => table(fmt, "sieve", &sieve_rows(&parse_grid(&grid.n)?)?),
        Command::Mean {
            input,
            grid,
            numeric,
        } => {
            let grid = parse_grid(&grid.n)?;
            table(fmt, "mean", &mean_rows(input, &grid, numeric)?)
        }
        Command::Ingham { input, grid } => {
            let grid = parse_grid(&grid.n)?;
            let max = *grid.last().expect("nonempty") as usize;
            let a = coefficients(input, max)?;
            let n: Vec<usize> = grid.iter().map(|&n| n as usize).collect();
            let rows: Vec<InghamRow> = batch_sums(&a, &n)?
                .into_iter()
                .map(|v| InghamRow {
                    n: v.n as u64,
                    a: v.a,
                    s: v.s,
                    mean: v.normalized_a,
                    normalized_s: v.normalized_s,
                })
                .collect();
            table(fmt, "ingham", &rows)
        }
        Command::Verify { check } => report(fmt, &verify_report(check)?),
        Command::Lemma { numeric } => {
            let params = numeric.params()?;
            let sieve = SieveTable::new(*lemma::X_GRID.last().expect("nonempty") as usize)?;
            let envelope = numeric.envelope.unwrap_or(DEFAULT_ENVELOPE);
            let rep = lemma::default_suite(&sieve, params.quad_tol, params.tail_tol, envelope)?;
            match fmt {
                Format::Csv => render_csv(&rep.cells),
                Format::Json => {
                    let mut out = serde_json::to_vec_pretty(&rep).expect("finite values");
                    out.push(b'\n');
                    Ok(out)
                }
            }
        }
        Command::Identity {
            input,
            grid,
            kind,
            numeric,
        } => identity(fmt, input, &parse_grid(&grid.n)?, *kind, numeric),
        Command::Report { input } => {
            let text = std::fs::read_to_string(input).map_err(|source| CliError::Io {
                path: input.display().to_string(),
                source,
            })?;
            let rep = VerificationReport::from_json(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", input.display())))?;
            report(fmt, &rep)
        }
    }
}

fn table<R: TableRow>(fmt: Format, command: &str, rows: &[R]) -> Result<Vec<u8>, CliError> {
    match fmt {
        Format::Csv => render_csv(rows),
        Format::Json => Ok(render_json(command, rows)),
    }
}

fn report(fmt: Format, rep: &VerificationReport) -> Result<Vec<u8>, CliError> {
    match fmt {
        Format::Csv => {
            let mut buf = Vec::new();
            rep.write_csv(&mut buf)?;
            Ok(buf)
        }
        Format::Json => {
            let mut out = rep.to_json().into_bytes();
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn load(input: &InputArgs, n: usize) -> Result<Input, CliError> {
    match (&input.spec, &input.coeffs) {
        (Some(path), _) => parse_spec(path),
        (None, Some(name)) => resolve_coeffs(name, input.length.unwrap_or(n)),
        (None, None) => Err(CliError::Parse(
            "one of --spec or --coeffs is required".into(),
        )),
    }
}

/// Sieve size needed to evaluate `spec` exactly up to `max_n`.
fn spec_sieve_limit(spec: &MultiplicativeSpec, max_n: usize) -> usize {
    let one = Complex64::new(1.0, 0.0);
    let mut limit = max_n;
    if spec.default_value() != one {
        limit = limit.max(spec.cutoff().min(u64::MAX >> 1) as usize);
    }
    for (&p, &v) in spec.prime_values() {
        if v != one {
            limit = limit.max(p as usize);
        }
    }
    limit.max(2)
}

fn coefficients(input: &InputArgs, n: usize) -> Result<CoefficientSequence, CliError> {
    match load(input, n)? {
        Input::Coefficients(a) => Ok(a),
        Input::Spec(spec) => {
            let table = SieveTable::new(spec_sieve_limit(&spec, n))?;
            Ok(MultiplicativeTable::new(&spec, &table, n)?
                .coefficients()
                .clone())
        }
    }
}

fn sieve_rows(grid: &[u64]) -> Result<Vec<SieveRow>, CliError> {
    let max = *grid.last().expect("nonempty") as usize;
    let table = SieveTable::new(max.max(2))?;
    let psi = PsiTable::new(&table, max)?;
    let mu = table.mobius_table(max)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut mertens = 0i64;
    let mut m = 0usize;
    for &n in grid {
        while m < n as usize {
            m += 1;
            mertens += i64::from(mu[m]);
        }
        let p = psi.psi_int(n as usize);
        rows.push(SieveRow {
            n,
            prime_count: table.primes_up_to(n as usize).len(),
            psi: p,
            delta: p - n as f64,
            mertens,
            mu_over_d: table.mu_over_d_partial(n as usize)?,
        });
    }
    Ok(rows)
}

fn mean_rows(
    input: &InputArgs,
    grid: &[u64],
    numeric: &NumericArgs,
) -> Result<Vec<MeanRow>, CliError> {
    let max = *grid.last().expect("nonempty") as usize;
    let params = numeric.params()?;
    match load(input, max)? {
        Input::Spec(spec) => {
            if grid[0] < 3 {
                return Err(CliError::Parse("mean with --spec needs n >= 3".into()));
            }
            let table = SieveTable::new(spec_sieve_limit(&spec, max))?;
            let mt = MultiplicativeTable::new(&spec, &table, max)?;
            Ok(verify::multiplicative_rows(&mt, grid, params.alpha)?
                .into_iter()
                .map(|r| MeanRow {
                    n: r.n,
                    mean: r.mean,
                    euler_product_at_1: r.euler_product_at_1,
                    g: r.g,
                    mu_alpha: r.mu_alpha,
                    residual_t1: r.theorem1_residual,
                    residual_t3: r.theorem3_residual,
                })
                .collect())
        }
        Input::Coefficients(a) => {
            let params = params.with_truncation(params.truncation.min(a.len()));
            let ns: Vec<usize> = grid.iter().map(|&n| n as usize).collect();
            batch_sums(&a, &ns)?
                .into_iter()
                .map(|v| {
                    let g = (v.n >= 2)
                        .then(|| g_eval(&a, &params.with_sigma(1.0 + 1.0 / (v.n as f64).ln())))
                        .transpose()?
                        .map(|g| g.value);
                    Ok(MeanRow {
                        n: v.n as u64,
                        mean: v.normalized_a,
                        euler_product_at_1: None,
                        g,
                        mu_alpha: None,
                        residual_t1: g.map(|g| (v.normalized_a - g).norm()),
                        residual_t3: None,
                    })
                })
                .collect()
        }
    }
}

fn require_spec(input: Input, what: &str) -> Result<MultiplicativeSpec, CliError> {
    match input {
        Input::Spec(s) => Ok(s),
        Input::Coefficients(_) => Err(CliError::Parse(format!("{what} needs --spec"))),
    }
}

fn verify_report(check: &VerifyCommand) -> Result<VerificationReport, CliError> {
    let start = std::time::Instant::now();
    let (args, kind) = match check {
        VerifyCommand::Theorem1(a) => (a, "theorem1"),
        VerifyCommand::Theorem2(a) => (a, "theorem2"),
        VerifyCommand::Theorem3(a) => (a, "theorem3"),
        VerifyCommand::Wintner(a) => (a, "wintner"),
        VerifyCommand::Axer(a) => (a, "axer"),
        VerifyCommand::Cond(a) => (a, "cond"),
    };
    let grid = parse_grid(&args.grid.n)?;
    let max = *grid.last().expect("nonempty") as usize;
    let params = args.numeric.params()?;
    let envelope = args.numeric.envelope;
    let input = load(&args.input, max)?;
    let rep = match kind {
        "theorem1" => match input {
            Input::Spec(spec) => {
                let table = SieveTable::new(spec_sieve_limit(&spec, max))?;
                let mt = MultiplicativeTable::new(&spec, &table, max)?;
                let coeff = envelope.unwrap_or(verify::THEOREM1_COEFF);
                verify::theorem1_spec_report(&mt, &grid, params.alpha, Some(coeff), args.monotone)?
            }
            Input::Coefficients(a) => verify::theorem1_report(
                &a,
                &grid,
                &params,
                Some(envelope.unwrap_or(verify::THEOREM1_COEFF)),
            )?,
        },
        "theorem2" => {
            let a = match input {
                Input::Coefficients(a) => a,
                Input::Spec(spec) => {
                    let table = SieveTable::new(spec_sieve_limit(&spec, max))?;
                    MultiplicativeTable::new(&spec, &table, max)?
                        .coefficients()
                        .clone()
                }
            };
            let sigma = match &args.numeric.sigma {
                Some(s) => parse_reals(s)?,
                None => grid
                    .iter()
                    .filter(|&&n| n >= 2)
                    .map(|&n| 1.0 + 1.0 / (n as f64).ln())
                    .collect(),
            };
            let config = verify::Theorem2Config {
                burn_in: args.burn_in,
                s_ratio_max: args.s_ratio_max,
            };
            verify::theorem2_conditions(&a, &grid, &sigma, &params, &config)?
        }
        "theorem3" => {
            let spec = require_spec(input, "theorem3")?;
            let table = SieveTable::new(spec_sieve_limit(&spec, max))?;
            let mt = MultiplicativeTable::new(&spec, &table, max)?;
            verify::theorem3_report(
                &mt,
                &grid,
                params.alpha,
                envelope.unwrap_or(verify::THEOREM3_ENVELOPE),
            )?
        }
        "wintner" => {
            let Input::Coefficients(a) = input else {
                return Err(CliError::Parse("wintner needs --coeffs".into()));
            };
            let mut rows = Vec::with_capacity(grid.len());
            for &n in &grid {
                let w = verify::check_wintner(&a, n as usize)?;
                let mut row = ReportRow::new(n, w.mean);
                row.extras = BTreeMap::from([
                    ("abs_sum_over_k".to_string(), w.abs_sum_over_k),
                    ("re_target".to_string(), w.target.re),
                    ("im_target".to_string(), w.target.im),
                    ("wintner_residual".to_string(), w.residual),
                ]);
                rows.push(row);
            }
            let thresholds = envelope
                .map(|e| (keys::WINTNER_MAX.to_string(), e))
                .into_iter()
                .collect();
            let target = rows
                .last()
                .map(|r| Complex64::new(r.extras["re_target"], r.extras["im_target"]));
            VerificationReport::assemble(
                "wintner",
                target,
                rows,
                vec![],
                thresholds,
                BTreeMap::new(),
            )
        }
        "axer" => {
            let Input::Coefficients(a) = input else {
                return Err(CliError::Parse("axer needs --coeffs".into()));
            };
            let bound = envelope.unwrap_or(1.0);
            let ax = verify::check_axer(&a, &grid, bound)?;
            let ns: Vec<usize> = grid.iter().map(|&n| n as usize).collect();
            let sums = batch_sums(&a, &ns)?;
            let rows = ax
                .ratios
                .iter()
                .zip(sums)
                .map(|(&(n, r), v)| {
                    let mut row = ReportRow::new(n, v.normalized_a);
                    row.extras.insert("axer_ratio".into(), r);
                    row
                })
                .collect();
            let thresholds = BTreeMap::from([(keys::AXER_MAX.to_string(), bound)]);
            VerificationReport::assemble("axer", None, rows, vec![], thresholds, BTreeMap::new())
        }
        _ => {
            let spec = require_spec(input, "cond")?;
            if grid[0] < 2 {
                return Err(CliError::Parse("cond needs n >= 2".into()));
            }
            let table = SieveTable::new(spec_sieve_limit(&spec, max))?;
            let mt = MultiplicativeTable::new(&spec, &table, max)?;
            let mut rows = Vec::with_capacity(grid.len());
            for &n in &grid {
                let nu = n as usize;
                let mut row = ReportRow::new(n, mt.mean(nu));
                row.mu_alpha = Some(crate::dirichlet::mu_n_alpha(
                    &spec,
                    &table,
                    nu,
                    params.alpha,
                )?);
                row.extras = BTreeMap::from([
                    ("cond1".to_string(), verify::cond1_ratio(&spec, &table, nu)?),
                    ("cond2".to_string(), verify::cond2_ratio(&spec, &table, nu)?),
                ]);
                rows.push(row);
            }
            VerificationReport::assemble(
                "cond",
                None,
                rows,
                vec![],
                BTreeMap::new(),
                BTreeMap::new(),
            )
        }
    };
    Ok(rep.with_wall_time(start.elapsed()))
}

fn identity(
    fmt: Format,
    input: &InputArgs,
    grid: &[u64],
    kind: IdentityKind,
    numeric: &NumericArgs,
) -> Result<Vec<u8>, CliError> {
    let params = numeric.params()?;
    let max = *grid.last().expect("nonempty") as usize;
    let loaded = load(input, max)?;
    if kind == IdentityKind::SMultiplicative {
        let spec = require_spec(loaded, "s-multiplicative")?;
        let sieve = SieveTable::new(max.max(2))?;
        let rows = grid
            .iter()
            .map(|&n| {
                Ok(exact_row(
                    n,
                    verify::s_multiplicative_identity(&spec, &sieve, n as usize)?,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        return table(fmt, "identity", &rows);
    }
    let a = match loaded {
        Input::Coefficients(a) => a,
        Input::Spec(spec) => {
            let sieve = SieveTable::new(spec_sieve_limit(&spec, max))?;
            MultiplicativeTable::new(&spec, &sieve, max)?
                .coefficients()
                .clone()
        }
    };
    let sieve = SieveTable::new(max.max(2))?;
    match kind {
        IdentityKind::Difference => {
            let rows = grid
                .iter()
                .map(|&n| verify::difference_identity_check(&a, &sieve, n as usize, &params))
                .collect::<crate::Result<Vec<_>>>()?;
            table(fmt, "identity", &rows)
        }
        IdentityKind::SDifference => {
            let rows = grid
                .iter()
                .map(|&n| {
                    Ok(exact_row(
                        n,
                        verify::s_difference_identity(&a, &sieve, n as usize)?,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            table(fmt, "identity", &rows)
        }
        _ => {
            let rows = grid
                .iter()
                .map(|&n| {
                    Ok(exact_row(
                        n,
                        verify::s_decomposition_identity(&a, &sieve, n as usize)?,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            table(fmt, "identity", &rows)
        }
    }
}

fn exact_row(n: u64, error: verify::IdentityError) -> ExactIdentityRow {
    ExactIdentityRow {
        n,
        relative: error.relative(),
        error,
    }
}
