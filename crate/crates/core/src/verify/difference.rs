use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::SieveTable;
use crate::dirichlet::{f_t_partial_sum, hurwitz_tail, zeta_real, EvalParams};
use crate::error::{Error, Result};
use crate::numeric::{dirichlet_partial, CompensatedSum, ComplexSum};
use crate::quad::{doubling_edges, integrate_panels};
use crate::sequences::CoefficientSequence;
use crate::summation::{ingham_a, ingham_s};

const MAX_N: usize = 50;
const MIN_SIGMA: f64 = 1.25;
// fixed so that reductions do not depend on the worker count
const CHUNK: usize = 1 << 14;
// below this the tail Σ_{i>J} i^{-u} is taken as ζ(u) minus a short sum
const SHORT_TAIL: usize = 32;

/// Both sides of the exact difference formula at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceIdentity {
    pub n: usize,
    pub sigma: f64,
    /// `A(n) − n g(σ) − S(n)/log n`.
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `Σ_{k=2}^{n−1} S(k) J_k`.
    pub first_sum: Complex64,
    /// `n ∫_σ^∞ Φ(u)/ζ(u) du`.
    pub second_term: Complex64,
    pub error: f64,
    /// Number of `S(k)` values summed explicitly.
    pub truncation: usize,
    /// `|Σ_{k>K} S(k)(k^{−σ} − (k+1)^{−σ})|`, the part supplied in closed form.
    pub tail_at_sigma: f64,
    /// Bound on everything cut off by the finite integration ranges.
    pub tail_slack: f64,
    /// Sum of the quadrature error estimates.
    pub quad_error: f64,
}

/// Checks
/// `A(n) − n g(σ) − S(n)/log n = Σ_{k=2}^{n−1} S(k) J_k − n ∫_σ^∞ Φ(u)/ζ(u) du`
/// with `σ = 1 + 1/log n`, `J_k = ∫₀^∞ [F_t(n/k) k^{−t} − F_t(n/(k+1)) (k+1)^{−t}] dt`
/// and `Φ(u) = Σ_{k≥2} S(k)(k^{−u} − (k+1)^{−u})`.
///
/// `a` is taken as zero beyond its length, which must not exceed
/// `params.truncation = K`. `Φ` is summed explicitly for `k ≤ K`; beyond `K`,
/// `S(k)` is a known finite divisor sum and the remainder is added in closed
/// form through Hurwitz-type tails.
pub fn difference_identity_check(
    a: &CoefficientSequence,
    table: &SieveTable,
    n: usize,
    params: &EvalParams,
) -> Result<DifferenceIdentity> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as f64,
            limit: MAX_N as f64,
        });
    }
    let sigma = 1.0 + 1.0 / (n as f64).ln();
    if sigma < MIN_SIGMA {
        return Err(Error::Domain(format!(
            "sigma = {sigma} is below {MIN_SIGMA}"
        )));
    }
    let big_k = params.truncation;
    if a.len() > big_k {
        return Err(Error::LengthMismatch {
            expected: big_k,
            found: a.len(),
        });
    }
    if n > table.limit() {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as f64,
            limit: table.limit() as f64,
        });
    }
    let a = a.zero_padded(big_k.max(n));
    let nf = n as f64;

    let g = dirichlet_partial(&a.values()[..big_k.max(n)], sigma);
    let lhs = ingham_a(&a, n)? - g * nf - ingham_s(&a, n)? / nf.ln();

    let s_cum = s_prefix(&a, big_k);
    let mut quad_error = 0.0;
    let mut tail_slack = 0.0;

    let mut first = ComplexSum::new();
    for k in 2..n {
        let sk = s_cum[k];
        let weight = nf * sk.norm().max(1.0);
        let (j, err, slack) = j_integral(
            table,
            n,
            k,
            params.quad_tol / weight,
            params.tail_tol / weight,
        )?;
        first.add(sk * j);
        quad_error += err * sk.norm();
        tail_slack += slack * sk.norm();
    }
    let first_sum = first.value();

    let phi = Phi::new(&a, &s_cum, big_k);
    let w_bound = (2..a.len() + 1)
        .map(|d| a.get(d).norm() * (d as f64).ln() / d as f64)
        .collect::<CompensatedSum>()
        .value();
    // |Φ(u)/ζ(u)| <= 2^{1-u} W, so the part beyond U is at most n·2W·2^{-U}/ln 2
    let tol_u = params.tail_tol;
    let u_end = if w_bound > 0.0 {
        ((2.0 * nf * w_bound / (tol_u * std::f64::consts::LN_2)).log2()).max(sigma + 1.0)
    } else {
        sigma + 1.0
    };
    tail_slack += nf * 2.0 * w_bound * (-u_end).exp2() / std::f64::consts::LN_2;
    let integrand = |v: f64| {
        let u = sigma + v;
        match zeta_real(u) {
            Ok(z) => phi.eval(u, z) / z,
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    let q = integrate_panels(
        &integrand,
        &doubling_edges(u_end - sigma),
        params.quad_tol / nf,
    )?;
    quad_error += nf * q.error;
    let second_term = q.value * nf;

    let rhs = first_sum - second_term;
    let z_sigma = zeta_real(sigma)?;
    Ok(DifferenceIdentity {
        n,
        sigma,
        lhs,
        rhs,
        first_sum,
        second_term,
        error: (lhs - rhs).norm(),
        truncation: big_k,
        tail_at_sigma: phi.tail(sigma, z_sigma).norm(),
        tail_slack,
        quad_error,
    })
}

/// `S(0..=K)` from the lattice `s_j = Σ_{d|j} a_d log d`.
fn s_prefix(a: &CoefficientSequence, big_k: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut s = vec![zero; big_k + 1];
    for d in 2..=a.len().min(big_k) {
        let w = a.get(d) * (d as f64).ln();
        if w == zero {
            continue;
        }
        for j in (d..=big_k).step_by(d) {
            s[j] += w;
        }
    }
    let mut acc = ComplexSum::new();
    for v in s.iter_mut() {
        acc.add(*v);
        *v = acc.value();
    }
    s
}

/// `J_k` by quadrature in `t`, with its error estimate and cutoff slack.
fn j_integral(
    table: &SieveTable,
    n: usize,
    k: usize,
    tol: f64,
    tail_tol: f64,
) -> Result<(f64, f64, f64)> {
    let nf = n as f64;
    let (kf, k1) = (k as f64, (k + 1) as f64);
    let (x0, x1) = (nf / kf, nf / k1);
    let (l0, l1) = (kf.ln(), k1.ln());
    // integrand <= 2⌊n/k⌋ k^{-t}
    let c = 2.0 * (n / k) as f64;
    let end = ((c / (tail_tol * l0)).ln() / l0).max(1.0);
    let slack = c * (-end * l0).exp() / l0;
    let big_f = |t: f64, x: f64| -> f64 {
        if t == 0.0 {
            // F_t(x) -> 1 as t -> 0 for x >= 1
            if x >= 1.0 {
                1.0
            } else {
                0.0
            }
        } else {
            f_t_partial_sum(table, t, x).unwrap_or(f64::NAN)
        }
    };
    let integrand = |t: f64| big_f(t, x0) * (-t * l0).exp() - big_f(t, x1) * (-t * l1).exp();
    let q = integrate_panels(&integrand, &doubling_edges(end), tol)?;
    Ok((q.value, q.error, slack))
}

struct Phi<'a> {
    s_cum: &'a [Complex64],
    big_k: usize,
    ln_k: Vec<f64>,
    // (d, a_d log d) for the nonzero coefficients
    weights: Vec<(usize, Complex64)>,
}

impl<'a> Phi<'a> {
    fn new(a: &CoefficientSequence, s_cum: &'a [Complex64], big_k: usize) -> Self {
        let ln_k = (0..=big_k + 1)
            .map(|k| if k == 0 { 0.0 } else { (k as f64).ln() })
            .collect();
        let weights = (2..=a.len().min(big_k))
            .filter_map(|d| {
                let w = a.get(d) * (d as f64).ln();
                (w != Complex64::new(0.0, 0.0)).then_some((d, w))
            })
            .collect();
        Self {
            s_cum,
            big_k,
            ln_k,
            weights,
        }
    }

    /// `Σ_{k=2}^{K} S(k)(k^{−u} − (k+1)^{−u})`.
    fn head(&self, u: f64) -> Complex64 {
        let chunks = (self.big_k - 1).div_ceil(CHUNK);
        let parts: Vec<Complex64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = 2 + c * CHUNK;
                let hi = (lo + CHUNK).min(self.big_k + 1);
                let mut acc = ComplexSum::new();
                let mut next = (-u * self.ln_k[lo]).exp();
                for k in lo..hi {
                    let cur = next;
                    next = (-u * self.ln_k[k + 1]).exp();
                    acc.add(self.s_cum[k] * (cur - next));
                }
                acc.value()
            })
            .collect();
        parts.into_iter().collect::<ComplexSum>().value()
    }

    /// `Σ_{k>K} S(k)(k^{−u} − (k+1)^{−u}) = S(K)(K+1)^{−u} + Σ_d a_d log d · d^{−u} Σ_{i>⌊K/d⌋} i^{−u}`.
    fn tail(&self, u: f64, zeta_u: f64) -> Complex64 {
        let short: Vec<f64> = {
            let mut acc = CompensatedSum::new();
            let mut v = vec![zeta_u];
            for i in 1..=SHORT_TAIL {
                acc.add((i as f64).powf(-u));
                v.push(zeta_u - acc.value());
            }
            v
        };
        let tail_after = |j: usize| -> f64 {
            if j <= SHORT_TAIL {
                short[j]
            } else {
                hurwitz_tail(u, (j + 1) as f64)
            }
        };
        let parts: Vec<Complex64> = self
            .weights
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = ComplexSum::new();
                let mut cached = (usize::MAX, 0.0);
                for &(d, w) in chunk {
                    let j = self.big_k / d;
                    if cached.0 != j {
                        cached = (j, tail_after(j));
                    }
                    acc.add(w * (-u * self.ln_k[d]).exp() * cached.1);
                }
                acc.value()
            })
            .collect();
        let mut total = parts.into_iter().collect::<ComplexSum>();
        total.add(self.s_cum[self.big_k] * (-u * self.ln_k[self.big_k + 1]).exp());
        total.value()
    }

    fn eval(&self, u: f64, zeta_u: f64) -> Complex64 {
        self.head(u) + self.tail(u, zeta_u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sequence_is_exact() {
        let table = SieveTable::new(100).unwrap();
        let a = CoefficientSequence::from_real([1.0]);
        let p = EvalParams::default().with_truncation(1000);
        let r = difference_identity_check(&a, &table, 5, &p).unwrap();
        assert_eq!(r.lhs, Complex64::new(0.0, 0.0));
        assert!(r.error <= p.quad_tol);
    }

    #[test]
    fn guards() {
        let table = SieveTable::new(100).unwrap();
        let a = CoefficientSequence::from_real([1.0]);
        let p = EvalParams::default().with_truncation(1000);
        assert!(difference_identity_check(&a, &table, 51, &p).is_err());
        assert!(difference_identity_check(&a, &table, 1, &p).is_err());
        let long = CoefficientSequence::from_real(vec![1.0; 2000]);
        assert!(difference_identity_check(&long, &table, 5, &p).is_err());
    }

    #[test]
    fn s_prefix_matches_block_sums() {
        let a = CoefficientSequence::from_real((1..=50).map(|k| ((k * 7) % 5) as f64 - 2.0));
        let s = s_prefix(&a, 200);
        let padded = a.zero_padded(200);
        for k in [1, 2, 17, 50, 51, 200] {
            assert!((s[k] - ingham_s(&padded, k).unwrap()).norm() < 1e-10);
        }
    }
}
