use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::SieveTable;
use crate::error::{out_of_range, Result};
use crate::numeric::{CompensatedSum, ComplexSum};
use crate::sequences::{
    a_from_f, extend_completely_multiplicative, CoefficientSequence, MultiplicativeSpec,
};
use crate::summation::{batch_sums, ingham_s};

/// Absolute discrepancy between two evaluation paths of an exact identity,
/// and the magnitude it should be judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityError {
    pub abs_error: f64,
    /// `max(1, Σ |terms|)` of the left-hand side.
    pub scale: f64,
}

impl IdentityError {
    pub fn relative(&self) -> f64 {
        self.abs_error / self.scale
    }
}

// Σ_k |a_k| ⌊n/k⌋ log k
fn s_scale(a: &CoefficientSequence, n: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for k in 2..=n.min(a.len()) {
        acc.add(a.get(k).norm() * (n / k) as f64 * (k as f64).ln());
    }
    acc.value().max(1.0)
}

/// `max_{2≤m≤M} |S(m) − S(m−1) − Σ_{k|m} a_k log k|`.
pub fn s_difference_identity(
    a: &CoefficientSequence,
    table: &SieveTable,
    m_max: usize,
) -> Result<IdentityError> {
    let bound = a.len().min(table.limit());
    if m_max < 2 || m_max > bound {
        return Err(out_of_range("M", m_max as f64, bound as f64));
    }
    let mut prev = ingham_s(a, 1)?;
    let mut worst = 0.0f64;
    for m in 2..=m_max {
        let cur = ingham_s(a, m)?;
        let direct = table
            .divisors(m)?
            .into_iter()
            .map(|k| a.get(k) * (k as f64).ln())
            .collect::<ComplexSum>()
            .value();
        worst = worst.max((cur - prev - direct).norm());
        prev = cur;
    }
    // s_scale is nondecreasing in m
    Ok(IdentityError {
        abs_error: worst,
        scale: s_scale(a, m_max),
    })
}

/// `S(n)` against `A(n) log n − Σ_{k<n} A(k) log(1+1/k) − Σ_{k≤n} Λ(k) A(⌊n/k⌋)`.
pub fn s_decomposition_identity(
    a: &CoefficientSequence,
    table: &SieveTable,
    n: usize,
) -> Result<IdentityError> {
    let bound = a.len().min(table.limit());
    if n < 2 || n > bound {
        return Err(out_of_range("n", n as f64, bound as f64));
    }
    let grid: Vec<usize> = (1..=n).collect();
    let sweep = batch_sums(a, &grid)?;
    let big_a = |k: usize| sweep[k - 1].a;
    let lhs = sweep[n - 1].s;
    let mut rhs = ComplexSum::new();
    rhs.add(big_a(n) * (n as f64).ln());
    for k in 1..n {
        rhs.add(-big_a(k) * (1.0 / k as f64).ln_1p());
    }
    for k in 2..=n {
        let lam = table.mangoldt(k)?;
        if lam != 0.0 {
            rhs.add(-big_a(n / k) * lam);
        }
    }
    Ok(IdentityError {
        abs_error: (lhs - rhs.value()).norm(),
        scale: s_scale(a, n),
    })
}

/// `S(m)` of the coefficients induced by `spec` against
/// `Σ_{k≤m} (f(k) − 1) Λ(k) Σ_{ℓ≤m/k} f(ℓ)`, the latter by direct double sum.
pub fn s_multiplicative_identity(
    spec: &MultiplicativeSpec,
    table: &SieveTable,
    m: usize,
) -> Result<IdentityError> {
    if m < 2 || m > table.limit() {
        return Err(out_of_range("m", m as f64, table.limit() as f64));
    }
    let f = extend_completely_multiplicative(spec, table, m)?;
    let a = a_from_f(table, &f)?;
    let lhs = ingham_s(&a, m)?;
    let one = Complex64::new(1.0, 0.0);
    let mut rhs = ComplexSum::new();
    for k in 2..=m {
        let lam = table.mangoldt(k)?;
        if lam == 0.0 {
            continue;
        }
        let inner = f[..m / k].iter().copied().collect::<ComplexSum>().value();
        rhs.add((f[k - 1] - one) * lam * inner);
    }
    Ok(IdentityError {
        abs_error: (lhs - rhs.value()).norm(),
        scale: s_scale(&a, m),
    })
}
