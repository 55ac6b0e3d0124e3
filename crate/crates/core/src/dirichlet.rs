//! Real-argument ζ, truncated Dirichlet series, Euler products, the
//! auxiliary family `f_t(m) = Π_{p|m} (1 − p^{−t})` with its partial sums
//! `F_t(x)` and generating function `L_t(s) = ζ(s)/ζ(s+t)`, and the Hölder
//! mean `μ_n(α)` of prime deviations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::SieveTable;
use crate::error::{out_of_range, Error, Result};
use crate::numeric::{dirichlet_partial, CompensatedSum};
use crate::sequences::{CoefficientSequence, MultiplicativeSpec};

/// Evaluation parameters shared by the Dirichlet series, quadrature and
/// Hölder-mean routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub sigma: f64,
    /// Number of Dirichlet series terms `K`.
    pub truncation: usize,
    pub quad_tol: f64,
    pub tail_tol: f64,
    /// Hölder exponent.
    pub alpha: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            sigma: 2.0,
            truncation: 1_000_000,
            quad_tol: 1e-8,
            tail_tol: 1e-12,
            alpha: 2.0,
        }
    }
}

impl EvalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 1.0) {
            return Err(Error::Domain(format!(
                "sigma must exceed 1, got {}",
                self.sigma
            )));
        }
        if self.truncation < 1 {
            return Err(Error::InvalidArgument(
                "truncation must be at least 1".into(),
            ));
        }
        for (name, tol) in [("quad_tol", self.quad_tol), ("tail_tol", self.tail_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in (0, 1), got {tol}"
                )));
            }
        }
        if !(self.alpha > 1.0) {
            return Err(Error::Domain(format!(
                "alpha must exceed 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_truncation(mut self, truncation: usize) -> Self {
        self.truncation = truncation;
        self
    }
}

// B_{2j} / (2j)! for j = 1..=5
const EM_COEFFS: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
];

/// `Σ_{j ≥ m} j^{−s}` for `s > 1`, by Euler–Maclaurin at `m`.
///
/// Accurate to double precision once `m` is a few times larger than `s`.
pub fn hurwitz_tail(s: f64, m: f64) -> f64 {
    let ms = m.powf(-s);
    let mut acc = CompensatedSum::new();
    acc.add(m * ms / (s - 1.0));
    acc.add(0.5 * ms);
    // rising factorial s(s+1)...(s+2j-2) times m^{-s-2j+1}
    let mut rising = s;
    let mut power = ms / m;
    for (j, c) in EM_COEFFS.iter().enumerate() {
        if j > 0 {
            let k = (2 * j) as f64;
            rising *= (s + k - 1.0) * (s + k);
            power /= m * m;
        }
        acc.add(c * rising * power);
    }
    acc.value()
}

/// Riemann ζ at a real argument `sigma > 1`.
///
/// Direct summation below `M = max(100, ⌈10/(σ−1)⌉)` (capped at 10^6) and an
/// Euler–Maclaurin tail from `M`.
pub fn zeta_real(sigma: f64) -> Result<f64> {
    if !(sigma > 1.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!(
            "zeta_real needs sigma > 1, got {sigma}"
        )));
    }
    let cut = (10.0 / (sigma - 1.0)).ceil().clamp(100.0, 1e6) as usize;
    let mut acc = CompensatedSum::new();
    for m in 1..cut {
        acc.add((m as f64).powf(-sigma));
    }
    acc.add(hurwitz_tail(sigma, cut as f64));
    Ok(acc.value())
}

/// A truncated Dirichlet series value and the number of terms used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GValue {
    pub value: Complex64,
    pub terms: usize,
}

/// `g(σ) ≈ Σ_{m≤K} a_m m^{−σ}` with `K = params.truncation`.
///
/// No claim is made about the omitted tail.
pub fn g_eval(a: &CoefficientSequence, params: &EvalParams) -> Result<GValue> {
    if !(params.sigma > 0.0) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {}",
            params.sigma
        )));
    }
    let k = params.truncation;
    if k > a.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: k,
        });
    }
    Ok(GValue {
        value: dirichlet_partial(&a.values()[..k], params.sigma),
        terms: k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    pub value: Complex64,
    /// Number of factors different from 1.
    pub factors: usize,
    /// Bound on the relative rounding error of the product.
    pub rounding_bound: f64,
}

/// `Π_{p ≤ limit} (1 − p^{−σ}) / (1 − f(p) p^{−σ})` in ascending prime order.
///
/// Factors with `f(p) = 1` equal 1 and are skipped, so primes above the
/// spec's cutoff never enter the product.
pub fn euler_product(
    spec: &MultiplicativeSpec,
    table: &SieveTable,
    sigma: f64,
    limit: usize,
) -> Result<EulerProduct> {
    if !(sigma >= 1.0) {
        return Err(Error::Domain(format!(
            "euler_product needs sigma >= 1, got {sigma}"
        )));
    }
    if limit > table.limit() {
        return Err(out_of_range("limit", limit as f64, table.limit() as f64));
    }
    let top = limit.min(spec.cutoff().min(usize::MAX as u64) as usize);
    let one = Complex64::new(1.0, 0.0);
    let mut value = one;
    let mut factors = 0usize;
    for &p in table.primes_up_to(top) {
        let fp = spec.value_at_prime(p as u64);
        if fp == one {
            continue;
        }
        let x = (p as f64).powf(-sigma);
        let den = one - fp * x;
        if den.norm() <= f64::EPSILON {
            return Err(Error::SingularFactor { p: p as u64 });
        }
        value *= (1.0 - x) / den;
        factors += 1;
    }
    Ok(EulerProduct {
        value,
        factors,
        rounding_bound: 8.0 * (factors as f64 + 1.0) * f64::EPSILON,
    })
}

/// `f_t(1..=N)` and their running sums `F_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FtEvaluation {
    t: f64,
    // values[m - 1] = f_t(m)
    values: Vec<f64>,
    // prefix[x] = F_t(x)
    prefix: Vec<f64>,
}

impl FtEvaluation {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f_t(m)` for `1 <= m <= N`.
    pub fn value(&self, m: usize) -> f64 {
        self.values[m - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `F_t(x) = Σ_{1≤m≤x} f_t(m)`; zero for `x < 1`.
    pub fn partial_sum(&self, x: f64) -> f64 {
        if x < 1.0 {
            return 0.0;
        }
        let k = (x.floor() as usize).min(self.values.len());
        self.prefix[k]
    }
}

fn ft_values(table: &SieveTable, t: f64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    if n >= 1 {
        v[1] = 1.0;
    }
    for m in 2..=n {
        let p = table.spf(m).expect("m within table");
        let r = m / p;
        v[m] = if r.is_multiple_of(p) {
            v[r]
        } else {
            // 1 - p^{-t}, accurate for small t
            v[r] * -(-t * (p as f64).ln()).exp_m1()
        };
    }
    v.remove(0);
    v
}

/// Tabulates `f_t(m) = Π_{p|m} (1 − p^{−t})` for `m ≤ N`.
pub fn f_t_table(table: &SieveTable, t: f64, n: usize) -> Result<FtEvaluation> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    if n > table.limit() {
        return Err(out_of_range("N", n as f64, table.limit() as f64));
    }
    let values = ft_values(table, t, n);
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = CompensatedSum::new();
    for &v in &values {
        acc.add(v);
        prefix.push(acc.value());
    }
    Ok(FtEvaluation { t, values, prefix })
}

/// `F_t(x)` for a single `(t, x)` without keeping the table.
pub fn f_t_partial_sum(table: &SieveTable, t: f64, x: f64) -> Result<f64> {
    if x < 1.0 {
        return Ok(0.0);
    }
    let n = x.floor() as usize;
    if n > table.limit() {
        return Err(out_of_range("x", x, table.limit() as f64));
    }
    Ok(ft_values(table, t, n)
        .into_iter()
        .collect::<CompensatedSum>()
        .value())
}

/// `L_t(s) = ζ(s) / ζ(s + t)`.
pub fn l_t(s: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    Ok(zeta_real(s)? / zeta_real(s + t)?)
}

/// `(1/log n) Σ_{p≤n} |f(p) − 1|^α log p / p`, for `α >= 1`.
pub(crate) fn prime_deviation_mean(
    spec: &MultiplicativeSpec,
    table: &SieveTable,
    n: usize,
    alpha: f64,
) -> Result<f64> {
    if n < 2 {
        return Err(out_of_range("n", n as f64, 2.0));
    }
    if n > table.limit() {
        return Err(out_of_range("n", n as f64, table.limit() as f64));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut acc = CompensatedSum::new();
    for &p in table.primes_up_to(n) {
        let dev = (spec.value_at_prime(p as u64) - one).norm();
        if dev == 0.0 {
            continue;
        }
        let pf = p as f64;
        acc.add(dev.powf(alpha) * pf.ln() / pf);
    }
    Ok(acc.value() / (n as f64).ln())
}

/// `μ_n(α) = ((1/log n) Σ_{p≤n} |f(p) − 1|^α log p / p)^{1/α}`.
pub fn mu_n_alpha(
    spec: &MultiplicativeSpec,
    table: &SieveTable,
    n: usize,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    Ok(prime_deviation_mean(spec, table, n, alpha)?.powf(1.0 / alpha))
}
