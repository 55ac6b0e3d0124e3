use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{keys, Ratio, ReportRow, SigmaRow, VerificationReport};
use crate::arith::SieveTable;
use crate::dirichlet::{euler_product, g_eval, mu_n_alpha, prime_deviation_mean, EvalParams};
use crate::error::{out_of_range, Error, Result};
use crate::numeric::{CompensatedSum, ComplexSum};
use crate::sequences::{
    a_from_f, extend_completely_multiplicative, CoefficientSequence, MultiplicativeSpec,
};
use crate::summation::{ingham_a, ingham_s};

/// Default `c` in the per-row bound `residual <= c / log n`.
pub const THEOREM1_COEFF: f64 = 0.6;

/// Frozen envelope for `residual / μ_n(α)`.
pub const THEOREM3_ENVELOPE: f64 = 1e-3;

fn sigma_n(n: u64) -> f64 {
    1.0 + 1.0 / (n as f64).ln()
}

fn check_grid(grid: &[u64], max: usize, min: u64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty n-grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "n-grid must be strictly ascending".into(),
        ));
    }
    if grid[0] < min {
        return Err(out_of_range("n", grid[0] as f64, min as f64));
    }
    let last = *grid.last().expect("nonempty");
    if last as usize > max {
        return Err(out_of_range("n", last as f64, max as f64));
    }
    Ok(())
}

fn s_ratio(s: Complex64, n: u64) -> Option<f64> {
    let nf = n as f64;
    (n > 1).then(|| s.norm() / (nf * nf.ln()))
}

/// `|A(n)/n − g(1 + 1/log n)|` with `g` truncated at `params.truncation`.
pub fn theorem1_residual(a: &CoefficientSequence, n: usize, params: &EvalParams) -> Result<f64> {
    if n < 2 {
        return Err(out_of_range("n", n as f64, 2.0));
    }
    let mean = ingham_a(a, n)? / n as f64;
    let g = g_eval(a, &params.with_sigma(sigma_n(n as u64)))?;
    Ok((mean - g.value).norm())
}

/// Rows of `|A(n)/n − g(1 + 1/log n)|` for an arbitrary coefficient sequence.
///
/// `g` is truncated at `min(params.truncation, a.len())`; with `coeff` set,
/// each row must satisfy `residual <= coeff / log n`.
pub fn theorem1_report(
    a: &CoefficientSequence,
    grid: &[u64],
    params: &EvalParams,
    coeff: Option<f64>,
) -> Result<VerificationReport> {
    check_grid(grid, a.len(), 2)?;
    let params = params.with_truncation(params.truncation.min(a.len()));
    let rows = grid
        .par_iter()
        .map(|&n| {
            let nu = n as usize;
            let mean = ingham_a(a, nu)? / n as f64;
            let g = g_eval(a, &params.with_sigma(sigma_n(n)))?.value;
            let mut row = ReportRow::new(n, mean);
            row.s_ratio = s_ratio(ingham_s(a, nu)?, n);
            row.g = Some(g);
            row.theorem1_residual = Some((mean - g).norm());
            row.extras
                .insert("truncation".into(), params.truncation as f64);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let thresholds = coeff
        .map(|c| (keys::T1_COEFF.to_string(), c))
        .into_iter()
        .collect();
    Ok(VerificationReport::assemble(
        "theorem1",
        None,
        rows,
        vec![],
        thresholds,
        BTreeMap::new(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Config {
    /// Leading fraction of each grid excluded from trend checks.
    pub burn_in: f64,
    /// Bound on the last `|S(n)|/(n log n)`.
    pub s_ratio_max: f64,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Self {
            burn_in: 0.5,
            s_ratio_max: 0.25,
        }
    }
}

/// Condition 1 (`|S(n)|/(n log n)` shrinking along the n-grid) and
/// condition 2 (`g(σ)` settling along a descending σ-grid).
///
/// The settling check requires the increments `|g(σ_{i+1}) − g(σ_i)|` to be
/// nonincreasing past the burn-in; the report target is the last `g`.
pub fn theorem2_conditions(
    a: &CoefficientSequence,
    grid: &[u64],
    sigma_grid: &[f64],
    params: &EvalParams,
    config: &Theorem2Config,
) -> Result<VerificationReport> {
    check_grid(grid, a.len(), 1)?;
    if sigma_grid.is_empty() {
        return Err(Error::InvalidArgument("empty sigma grid".into()));
    }
    if sigma_grid.windows(2).any(|w| w[0] <= w[1]) || sigma_grid.iter().any(|&s| !(s > 1.0)) {
        return Err(Error::InvalidArgument(
            "sigma grid must be strictly descending and above 1".into(),
        ));
    }
    if !(0.0..1.0).contains(&config.burn_in) {
        return Err(Error::InvalidArgument(format!(
            "burn-in fraction must lie in [0, 1), got {}",
            config.burn_in
        )));
    }
    let rows = grid
        .par_iter()
        .map(|&n| {
            let nu = n as usize;
            let mut row = ReportRow::new(n, ingham_a(a, nu)? / n as f64);
            row.s_ratio = s_ratio(ingham_s(a, nu)?, n);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let params = params.with_truncation(params.truncation.min(a.len()));
    let sigma_rows = sigma_grid
        .iter()
        .map(|&sigma| {
            Ok(SigmaRow {
                sigma,
                g: g_eval(a, &params.with_sigma(sigma))?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let increments: Vec<f64> = sigma_rows
        .windows(2)
        .map(|w| (w[1].g - w[0].g).norm())
        .collect();
    let start = (increments.len() as f64 * config.burn_in).floor() as usize;
    let settling = increments
        .get(start..)
        .unwrap_or(&[])
        .windows(2)
        .all(|w| super::le_with_slack(w[1], w[0]));
    let target = sigma_rows.last().map(|r| r.g);
    let thresholds = BTreeMap::from([
        (keys::S_RATIO_MAX.to_string(), config.s_ratio_max),
        (keys::BURN_IN.to_string(), config.burn_in),
    ]);
    let checks = BTreeMap::from([("g_settling".to_string(), settling)]);
    Ok(VerificationReport::assemble(
        "theorem2", target, rows, sigma_rows, thresholds, checks,
    ))
}

/// The completely multiplicative extension of a spec up to `N`, with its
/// running sums and the induced coefficient sequence `a = μ * f`.
#[derive(Debug, Clone)]
pub struct MultiplicativeTable<'t> {
    spec: MultiplicativeSpec,
    table: &'t SieveTable,
    // prefix[m] = Σ_{j≤m} f(j)
    prefix: Vec<Complex64>,
    a: CoefficientSequence,
}

impl<'t> MultiplicativeTable<'t> {
    pub fn new(spec: &MultiplicativeSpec, table: &'t SieveTable, n: usize) -> Result<Self> {
        let f = extend_completely_multiplicative(spec, table, n)?;
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(Complex64::new(0.0, 0.0));
        let mut acc = ComplexSum::new();
        for &v in &f {
            acc.add(v);
            prefix.push(acc.value());
        }
        let a = a_from_f(table, &f)?;
        Ok(Self {
            spec: spec.clone(),
            table,
            prefix,
            a,
        })
    }

    pub fn spec(&self) -> &MultiplicativeSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(1/n) Σ_{m≤n} f(m)`.
    pub fn mean(&self, n: usize) -> Complex64 {
        self.prefix[n] / n as f64
    }

    pub fn coefficients(&self) -> &CoefficientSequence {
        &self.a
    }

    /// `g(σ)` as the exact Euler product over every prime with `f(p) ≠ 1`.
    pub fn g(&self, sigma: f64) -> Result<Complex64> {
        let limit = self.exact_product_limit()?;
        Ok(euler_product(&self.spec, self.table, sigma, limit)?.value)
    }

    fn exact_product_limit(&self) -> Result<usize> {
        let cutoff = self.spec.cutoff();
        let one = Complex64::new(1.0, 0.0);
        let table_limit = self.table.limit() as u64;
        let beyond = self.spec.default_value() != one && cutoff > table_limit
            || self
                .spec
                .prime_values()
                .iter()
                .any(|(&p, &v)| p > table_limit && v != one);
        if beyond {
            return Err(Error::Capacity {
                requested: cutoff,
                max: table_limit,
            });
        }
        Ok(cutoff.min(table_limit) as usize)
    }

    pub fn theorem3(&self, n: usize, alpha: f64) -> Result<Theorem3Check> {
        if n < 3 {
            return Err(out_of_range("n", n as f64, 3.0));
        }
        if n > self.len() {
            return Err(out_of_range("n", n as f64, self.len() as f64));
        }
        self.spec.require_bounded()?;
        let product = euler_product(&self.spec, self.table, 1.0, n)?.value;
        let residual = (self.mean(n) - product).norm();
        let mu = mu_n_alpha(&self.spec, self.table, n, alpha)?;
        Ok(Theorem3Check {
            residual,
            mu,
            ratio: Ratio::of(residual, mu),
            product,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Check {
    pub residual: f64,
    pub mu: f64,
    pub ratio: Ratio,
    /// `Π_{p≤n} (1 − 1/p)/(1 − f(p)/p)`.
    pub product: Complex64,
}

/// `|(1/n)Σ_{m≤n} f(m) − Π_{p≤n}(1−1/p)/(1−f(p)/p)|` against `μ_n(α)`.
pub fn theorem3_check(
    spec: &MultiplicativeSpec,
    table: &SieveTable,
    n: usize,
    alpha: f64,
) -> Result<Theorem3Check> {
    spec.require_bounded()?;
    if n < 3 {
        return Err(out_of_range("n", n as f64, 3.0));
    }
    MultiplicativeTable::new(spec, table, n)?.theorem3(n, alpha)
}

/// All spec-derived quantities per grid point; pass flags are left to the
/// report that uses them.
pub fn multiplicative_rows(
    mt: &MultiplicativeTable<'_>,
    grid: &[u64],
    alpha: f64,
) -> Result<Vec<ReportRow>> {
    check_grid(grid, mt.len(), 3)?;
    let bounded = mt.spec.is_bounded();
    grid.par_iter()
        .map(|&n| {
            let nu = n as usize;
            let mean = mt.mean(nu);
            let g = mt.g(sigma_n(n))?;
            let mut row = ReportRow::new(n, mean);
            row.s_ratio = s_ratio(ingham_s(&mt.a, nu)?, n);
            row.g = Some(g);
            row.theorem1_residual = Some((mean - g).norm());
            row.euler_product_at_1 = Some(euler_product(&mt.spec, mt.table, 1.0, nu)?.value);
            row.mu_alpha = Some(mu_n_alpha(&mt.spec, mt.table, nu, alpha)?);
            if bounded {
                let t3 = mt.theorem3(nu, alpha)?;
                row.theorem3_residual = Some(t3.residual);
                row.ratio = Some(t3.ratio);
            }
            Ok(row)
        })
        .collect()
}

/// The same residual rows for a spec, using the exact Euler product for `g`.
pub fn theorem1_spec_report(
    mt: &MultiplicativeTable<'_>,
    grid: &[u64],
    alpha: f64,
    coeff: Option<f64>,
    monotone: bool,
) -> Result<VerificationReport> {
    let rows = multiplicative_rows(mt, grid, alpha)?;
    let mut thresholds = BTreeMap::new();
    if let Some(c) = coeff {
        thresholds.insert(keys::T1_COEFF.to_string(), c);
    }
    if monotone {
        thresholds.insert(keys::T1_MONOTONE.to_string(), 1.0);
    }
    let target = mt.g(1.0).ok();
    Ok(VerificationReport::assemble(
        "theorem1",
        target,
        rows,
        vec![],
        thresholds,
        BTreeMap::new(),
    ))
}

/// Mean against the partial Euler product over a grid; rows pass when the
/// ratio to `μ_n(α)` stays within `envelope`.
pub fn theorem3_report(
    mt: &MultiplicativeTable<'_>,
    grid: &[u64],
    alpha: f64,
    envelope: f64,
) -> Result<VerificationReport> {
    mt.spec.require_bounded()?;
    let rows = multiplicative_rows(mt, grid, alpha)?;
    let thresholds = BTreeMap::from([
        (keys::T3_RATIO_MAX.to_string(), envelope),
        ("alpha".to_string(), alpha),
    ]);
    Ok(VerificationReport::assemble(
        "theorem3",
        None,
        rows,
        vec![],
        thresholds,
        BTreeMap::new(),
    ))
}

/// `(1/log n) Σ_{p≤n} |f(p) − 1| log p / p`.
pub fn cond1_ratio(spec: &MultiplicativeSpec, table: &SieveTable, n: usize) -> Result<f64> {
    prime_deviation_mean(spec, table, n, 1.0)
}

/// `(1/(n log n)) Σ_{m≤n} |Σ_{p≤n/m} f(p) log p − n/m|`.
pub fn cond2_ratio(spec: &MultiplicativeSpec, table: &SieveTable, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(out_of_range("n", n as f64, 2.0));
    }
    if n > table.limit() {
        return Err(out_of_range("n", n as f64, table.limit() as f64));
    }
    // theta[y] = Σ_{p≤y} f(p) log p
    let mut theta = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut acc = ComplexSum::new();
    let mut primes = table.primes_up_to(n).iter().peekable();
    for (y, slot) in theta.iter_mut().enumerate() {
        if primes.next_if(|&&p| p as usize == y).is_some() {
            acc.add(spec.value_at_prime(y as u64) * (y as f64).ln());
        }
        *slot = acc.value();
    }
    let nf = n as f64;
    let mut total = CompensatedSum::new();
    for m in 1..=n {
        total.add((theta[n / m] - nf / m as f64).norm());
    }
    Ok(total.value() / (nf * nf.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WintnerCheck {
    /// `Σ_{k≤n} |a_k|/k`.
    pub abs_sum_over_k: f64,
    /// `Σ_{k≤n} a_k/k`.
    pub target: Complex64,
    /// `A(n)/n`.
    pub mean: Complex64,
    pub residual: f64,
}

pub fn check_wintner(a: &CoefficientSequence, n: usize) -> Result<WintnerCheck> {
    if n == 0 || n > a.len() {
        return Err(out_of_range("n", n as f64, a.len() as f64));
    }
    let abs_sum_over_k = (1..=n)
        .map(|k| a.get(k).norm() / k as f64)
        .collect::<CompensatedSum>()
        .value();
    let target = (1..=n)
        .map(|k| a.get(k) / k as f64)
        .collect::<ComplexSum>()
        .value();
    let mean = ingham_a(a, n)? / n as f64;
    Ok(WintnerCheck {
        abs_sum_over_k,
        target,
        mean,
        residual: (mean - target).norm(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxerCheck {
    /// `(n, Σ_{k≤n} |a_k| / n)` per grid point.
    pub ratios: Vec<(u64, f64)>,
    pub bound: f64,
    pub pass: bool,
}

pub fn check_axer(a: &CoefficientSequence, grid: &[u64], bound: f64) -> Result<AxerCheck> {
    check_grid(grid, a.len(), 1)?;
    let mut acc = CompensatedSum::new();
    let mut ratios = Vec::with_capacity(grid.len());
    let mut k = 0usize;
    for &n in grid {
        while k < n as usize {
            k += 1;
            acc.add(a.get(k).norm());
        }
        ratios.push((n, acc.value() / n as f64));
    }
    let pass = ratios.iter().all(|&(_, r)| r <= bound);
    Ok(AxerCheck {
        ratios,
        bound,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn f2zero(cutoff: u64) -> MultiplicativeSpec {
        MultiplicativeSpec::trivial(cutoff)
            .with_prime(2, c(0.0))
            .unwrap()
    }

    #[test]
    fn theorem1_unit_is_exact() {
        let a = CoefficientSequence::from_fn(1000, |k| c(if k == 1 { 1.0 } else { 0.0 }));
        let p = EvalParams::default().with_truncation(1000);
        for n in [2, 10, 1000] {
            assert_eq!(theorem1_residual(&a, n, &p).unwrap(), 0.0);
        }
        assert!(theorem1_residual(&a, 1, &p).is_err());
    }

    #[test]
    fn theorem1_f2zero_matches_closed_form() {
        let table = SieveTable::new(100_000).unwrap();
        let mt = MultiplicativeTable::new(&f2zero(100_000), &table, 100_000).unwrap();
        let rep = theorem1_spec_report(
            &mt,
            &[1000, 10_000, 100_000],
            2.0,
            Some(THEOREM1_COEFF),
            true,
        )
        .unwrap();
        for r in &rep.rows {
            let sigma = sigma_n(r.n);
            let expect = (0.5 - (1.0 - 2f64.powf(-sigma))).abs();
            assert!((r.theorem1_residual.unwrap() - expect).abs() < 1e-14);
        }
        assert!(rep.summary.pass);
        assert!(rep.recheck());
    }

    #[test]
    fn theorem3_examples() {
        let table = SieveTable::new(1000).unwrap();
        let triv = theorem3_check(&MultiplicativeSpec::trivial(1000), &table, 1000, 2.0).unwrap();
        assert_eq!(
            (triv.residual, triv.mu, triv.ratio),
            (0.0, 0.0, Ratio::Finite(0.0))
        );
        let unbounded = MultiplicativeSpec::new(1000, c(1.0), false)
            .unwrap()
            .with_prime(3, c(1.5))
            .unwrap();
        assert!(matches!(
            theorem3_check(&unbounded, &table, 1000, 2.0),
            Err(Error::BoundViolation(_))
        ));
        assert!(theorem3_check(&f2zero(1000), &table, 2, 2.0).is_err());
    }

    #[test]
    fn cond_examples() {
        let table = SieveTable::new(1000).unwrap();
        assert_eq!(
            cond1_ratio(&MultiplicativeSpec::trivial(1000), &table, 1000).unwrap(),
            0.0
        );
        let zero = MultiplicativeSpec::new(1000, c(0.0), true).unwrap();
        let h100: f64 = (1..=100).map(|m| 1.0 / m as f64).sum();
        let v = cond2_ratio(&zero, &table, 100).unwrap();
        assert!((v - h100 / 100f64.ln()).abs() < 1e-12);
        assert!((v - 1.126).abs() < 1e-3);
        let two = cond2_ratio(&MultiplicativeSpec::liouville(1000), &table, 2).unwrap();
        // m = 1 gives |−log 2 − 2|, m = 2 gives |0 − 1|
        assert!((two - ((2f64.ln() + 2.0) + 1.0) / (2.0 * 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn axer_and_wintner_small() {
        let a = CoefficientSequence::from_fn(100, |k| c(if k == 1 { 1.0 } else { 0.0 }));
        let ax = check_axer(&a, &[1, 10, 100], 1.0).unwrap();
        assert_eq!(ax.ratios, vec![(1, 1.0), (10, 0.1), (100, 0.01)]);
        assert!(ax.pass);
        let w = check_wintner(&a, 100).unwrap();
        assert_eq!((w.target, w.mean, w.residual), (c(1.0), c(1.0), 0.0));
    }

    #[test]
    fn theorem2_unit() {
        let a = CoefficientSequence::from_fn(1000, |k| c(if k == 1 { 1.0 } else { 0.0 }));
        let rep = theorem2_conditions(
            &a,
            &[10, 100, 1000],
            &[2.0, 1.5, 1.1],
            &EvalParams::default(),
            &Theorem2Config::default(),
        )
        .unwrap();
        assert_eq!(rep.target, Some(c(1.0)));
        assert!(rep.rows.iter().all(|r| r.s_ratio == Some(0.0)));
        assert!(rep.summary.pass);
        assert!(theorem2_conditions(
            &a,
            &[10],
            &[1.1, 1.5],
            &EvalParams::default(),
            &Theorem2Config::default()
        )
        .is_err());
    }
}
