//! Finite-scale ratio checks for the five estimates on `f_t` and `F_t`.
//!
//! Each family produces a ratio `|quantity| / envelope shape`; the suite
//! records the largest ratio seen per family and compares it against a fixed
//! constant.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::SieveTable;
use crate::dirichlet::{f_t_partial_sum, f_t_table, zeta_real};
use crate::error::{out_of_range, Error, Result};
use crate::numeric::CompensatedSum;
use crate::quad::{doubling_edges, integrate_panels};

pub const DEFAULT_ENVELOPE: f64 = 5.0;
pub const T_GRID: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
pub const X_GRID: [u64; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];
pub const K_GRID: [u64; 3] = [2, 10, 100];
pub const KX_GRID: [u64; 2] = [1_000, 10_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `Σ_{m≤x} f_t(m)/m` against `1 + t log x`.
    I,
    /// `|F_t(x) − x/ζ(1+t)|` against `x^{1−t} + Σ_{d≤x} d^{−t}`.
    Ii,
    /// `|Σ_{m≤x} f_t(m)/m − Σ_{d≤x} μ(d) d^{−1−t} log(x/d)|`, unnormalized.
    Iii,
    /// `F_t(x) − F_t(x/2)` against `x (1/log x + t)`.
    Iv,
    /// The `t`-integrated difference against `x / (k log²(xk))`.
    V,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::I, Family::Ii, Family::Iii, Family::Iv, Family::V];

    pub fn label(self) -> &'static str {
        match self {
            Family::I => "i",
            Family::Ii => "ii",
            Family::Iii => "iii",
            Family::Iv => "iv",
            Family::V => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCell {
    pub family: Family,
    pub t: Option<f64>,
    pub x: u64,
    pub k: Option<u64>,
    pub value: f64,
    pub envelope_shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub cells: Vec<LemmaCell>,
    pub suprema: BTreeMap<String, f64>,
    pub envelope: f64,
    pub pass: bool,
}

/// Families (i)-(iv) at one `t` over ascending integer `xs`.
pub fn families_at_t(table: &SieveTable, t: f64, xs: &[u64]) -> Result<Vec<LemmaCell>> {
    if xs.windows(2).any(|w| w[0] >= w[1]) || xs.first().is_some_and(|&x| x < 2) {
        return Err(Error::InvalidArgument(
            "x grid must be ascending and start at 2 or more".into(),
        ));
    }
    let xmax = *xs
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty x grid".into()))? as usize;
    if xmax > table.limit() {
        return Err(out_of_range("x", xmax as f64, table.limit() as f64));
    }
    let ft = f_t_table(table, t, xmax)?;
    let mu = table.mobius_table(xmax)?;
    let inv_zeta = 1.0 / zeta_real(1.0 + t)?;

    let mut harmonic_ft = CompensatedSum::new(); // Σ f_t(m)/m
    let mut power_sum = CompensatedSum::new(); // Σ d^{-t}
    let mut mu_sum = CompensatedSum::new(); // Σ μ(d) d^{-1-t}
    let mut mu_log_sum = CompensatedSum::new(); // Σ μ(d) d^{-1-t} log d
    let mut cells = Vec::with_capacity(4 * xs.len());
    let mut next = 0;
    for m in 1..=xmax {
        let mf = m as f64;
        let lm = mf.ln();
        harmonic_ft.add(ft.value(m) / mf);
        power_sum.add((-t * lm).exp());
        if mu[m] != 0 {
            let w = f64::from(mu[m]) * (-(1.0 + t) * lm).exp();
            mu_sum.add(w);
            mu_log_sum.add(w * lm);
        }
        if m as u64 != xs[next] {
            continue;
        }
        let x = mf;
        let lx = x.ln();
        let h = harmonic_ft.value();

        let shape_i = 1.0 + t * lx;
        let big_f = ft.partial_sum(x);
        let dev_ii = (big_f - x * inv_zeta).abs();
        let shape_ii = x.powf(1.0 - t) + power_sum.value();
        let dev_iii = (h - (lx * mu_sum.value() - mu_log_sum.value())).abs();
        let diff_iv = big_f - ft.partial_sum(x / 2.0);
        let shape_iv = x * (1.0 / lx + t);
        for (family, value, shape) in [
            (Family::I, h, shape_i),
            (Family::Ii, dev_ii, shape_ii),
            (Family::Iii, dev_iii, 1.0),
            (Family::Iv, diff_iv, shape_iv),
        ] {
            cells.push(LemmaCell {
                family,
                t: Some(t),
                x: m as u64,
                k: None,
                value,
                envelope_shape: shape,
                ratio: value.abs() / shape,
            });
        }
        next += 1;
        if next == xs.len() {
            break;
        }
    }
    Ok(cells)
}

// Smallest T with c·k^{-T}/ln k <= tol.
fn t_cutoff(c: f64, k: f64, tol: f64) -> f64 {
    let lk = k.ln();
    ((c / (tol * lk)).ln() / lk).max(1.0)
}

/// `∫₀^∞ F_t(x) (k^{−t} − (k+1)^{−t}) dt` by quadrature on `F_t(x)`.
pub fn integral_ft(
    table: &SieveTable,
    x: u64,
    k: u64,
    quad_tol: f64,
    tail_tol: f64,
) -> Result<f64> {
    if k < 2 {
        return Err(out_of_range("k", k as f64, 2.0));
    }
    let (kf, k1) = (k as f64, (k + 1) as f64);
    let xf = x as f64;
    let end = t_cutoff(xf, kf, tail_tol);
    if x as usize > table.limit() {
        return Err(out_of_range("x", xf, table.limit() as f64));
    }
    let integrand = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let weight = (-t * kf.ln()).exp() - (-t * k1.ln()).exp();
        f_t_partial_sum(table, t, xf).map_or(f64::NAN, |v| v * weight)
    };
    Ok(integrate_panels(&integrand, &doubling_edges(end), quad_tol * xf)?.value)
}

/// `∫₀^∞ (k^{−t} − (k+1)^{−t}) / ζ(1+t) dt`.
pub fn integral_inverse_zeta(k: u64, quad_tol: f64, tail_tol: f64) -> Result<f64> {
    if k < 2 {
        return Err(out_of_range("k", k as f64, 2.0));
    }
    let (kf, k1) = (k as f64, (k + 1) as f64);
    let end = t_cutoff(1.0, kf, tail_tol);
    let integrand = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let weight = (-t * kf.ln()).exp() - (-t * k1.ln()).exp();
        zeta_real(1.0 + t).map_or(f64::NAN, |z| weight / z)
    };
    Ok(integrate_panels(&integrand, &doubling_edges(end), quad_tol)?.value)
}

/// Family (v) at a single `(k, x)`.
pub fn family_v(
    table: &SieveTable,
    x: u64,
    k: u64,
    quad_tol: f64,
    tail_tol: f64,
) -> Result<LemmaCell> {
    let i1 = integral_ft(table, x, k, quad_tol, tail_tol)?;
    let i2 = integral_inverse_zeta(k, quad_tol, tail_tol)?;
    let xf = x as f64;
    let value = (i1 - xf * i2).abs();
    let shape = xf / (k as f64 * (xf * k as f64).ln().powi(2));
    Ok(LemmaCell {
        family: Family::V,
        t: None,
        x,
        k: Some(k),
        value,
        envelope_shape: shape,
        ratio: value / shape,
    })
}

/// Runs all five families over the given grids.
#[allow(clippy::too_many_arguments)]
pub fn lemma_suite(
    table: &SieveTable,
    ts: &[f64],
    xs: &[u64],
    ks: &[u64],
    kxs: &[u64],
    quad_tol: f64,
    tail_tol: f64,
    envelope: f64,
) -> Result<LemmaReport> {
    let per_t: Vec<Vec<LemmaCell>> = ts
        .par_iter()
        .map(|&t| families_at_t(table, t, xs))
        .collect::<Result<_>>()?;
    let pairs: Vec<(u64, u64)> = ks
        .iter()
        .flat_map(|&k| kxs.iter().map(move |&x| (k, x)))
        .collect();
    let fam_v: Vec<LemmaCell> = pairs
        .par_iter()
        .map(|&(k, x)| family_v(table, x, k, quad_tol, tail_tol))
        .collect::<Result<_>>()?;

    let mut cells: Vec<LemmaCell> = per_t.into_iter().flatten().chain(fam_v).collect();
    cells.sort_by(|a, b| {
        (a.family, a.k, a.x)
            .cmp(&(b.family, b.k, b.x))
            .then(a.t.partial_cmp(&b.t).expect("finite t"))
    });
    let mut suprema = BTreeMap::new();
    for c in &cells {
        let e = suprema
            .entry(c.family.label().to_string())
            .or_insert(0.0f64);
        *e = e.max(c.ratio);
    }
    let pass = cells
        .iter()
        .all(|c| c.ratio.is_finite() && c.ratio <= envelope);
    Ok(LemmaReport {
        cells,
        suprema,
        envelope,
        pass,
    })
}

/// The full default grid.
pub fn default_suite(
    table: &SieveTable,
    quad_tol: f64,
    tail_tol: f64,
    envelope: f64,
) -> Result<LemmaReport> {
    lemma_suite(
        table, &T_GRID, &X_GRID, &K_GRID, &KX_GRID, quad_tol, tail_tol, envelope,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_values() {
        let table = SieveTable::new(1000).unwrap();
        let cells = families_at_t(&table, 1.0, &[10, 100]).unwrap();
        assert_eq!(cells.len(), 8);
        let c = &cells[0];
        assert_eq!((c.family, c.x), (Family::I, 10));
        // f_1(m)/m = φ(m)/m²
        let phi = [1.0, 1.0, 2.0, 2.0, 4.0, 2.0, 6.0, 4.0, 6.0, 4.0];
        let direct: f64 = phi
            .iter()
            .enumerate()
            .map(|(i, p)| p / ((i + 1) * (i + 1)) as f64)
            .sum();
        assert!((c.value - direct).abs() < 1e-12);
        assert!((c.ratio - direct / (1.0 + 10f64.ln())).abs() < 1e-12);
        // F_1(10) - F_1(5)
        let iv = cells
            .iter()
            .find(|c| c.family == Family::Iv && c.x == 10)
            .unwrap();
        let f = |x: f64| f_t_partial_sum(&table, 1.0, x).unwrap();
        assert!((iv.value - (f(10.0) - f(5.0))).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        let table = SieveTable::new(100).unwrap();
        assert!(families_at_t(&table, 1.0, &[10, 10]).is_err());
        assert!(families_at_t(&table, 1.0, &[1000]).is_err());
        assert!(integral_inverse_zeta(1, 1e-8, 1e-12).is_err());
    }
}
