//! Ingham sums `A(n) = Σ_{k≤n} a_k ⌊n/k⌋`, the log-weighted sums
//! `S(n) = Σ_{k≤n} a_k ⌊n/k⌋ log k`, and the partial sums used by the
//! Ingham, Tauber and Abel-type summation methods.
//!
//! `A(n)` and `S(n)` are evaluated over the maximal blocks of `k` on which
//! `⌊n/k⌋` is constant, so a query costs `O(√n)` given the prefix sums held
//! by [`CoefficientSequence`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::numeric::{dirichlet_partial, ComplexSum};
use crate::sequences::CoefficientSequence;

fn check_n(seq: &CoefficientSequence, n: usize) -> Result<()> {
    if n > seq.len() {
        Err(out_of_range("n", n as f64, seq.len() as f64))
    } else {
        Ok(())
    }
}

/// Σ over floor-quotient blocks of `⌊n/k⌋ · (P(r) − P(l−1))`.
fn block_sum(n: usize, prefix: impl Fn(usize) -> Complex64) -> Complex64 {
    let mut acc = ComplexSum::new();
    let mut l = 1;
    while l <= n {
        let q = n / l;
        let r = n / q;
        acc.add((prefix(r) - prefix(l - 1)) * q as f64);
        l = r + 1;
    }
    acc.value()
}

/// `A(n) = Σ_{k≤n} a_k ⌊n/k⌋`.
pub fn ingham_a(seq: &CoefficientSequence, n: usize) -> Result<Complex64> {
    check_n(seq, n)?;
    Ok(block_sum(n, |k| seq.prefix_a(k)))
}

/// `S(n) = Σ_{k≤n} a_k ⌊n/k⌋ log k`.
pub fn ingham_s(seq: &CoefficientSequence, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(out_of_range("n", 0.0, seq.len() as f64));
    }
    check_n(seq, n)?;
    Ok(block_sum(n, |k| seq.prefix_alog(k)))
}

/// `A(n)`, `S(n)` and their normalizations at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummationValue {
    pub n: usize,
    pub a: Complex64,
    pub s: Complex64,
    /// `A(n)/n`
    pub normalized_a: Complex64,
    /// `S(n)/(n log n)`; not applicable at `n = 1`.
    pub normalized_s: Option<Complex64>,
}

impl SummationValue {
    pub fn at(seq: &CoefficientSequence, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid points must be >= 1".into()));
        }
        let a = ingham_a(seq, n)?;
        let s = ingham_s(seq, n)?;
        let nf = n as f64;
        Ok(Self {
            n,
            a,
            s,
            normalized_a: a / nf,
            normalized_s: (n > 1).then(|| s / (nf * nf.ln())),
        })
    }
}

/// Evaluates [`SummationValue::at`] on every grid point, in grid order.
pub fn batch_sums(seq: &CoefficientSequence, grid: &[usize]) -> Result<Vec<SummationValue>> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "grid must be sorted ascending".into(),
        ));
    }
    if let Some(&last) = grid.last() {
        check_n(seq, last)?;
    }
    grid.par_iter()
        .map(|&n| SummationValue::at(seq, n))
        .collect()
}

/// Ingham partial sum `Σ_{m≤n} (m/n) ⌊n/m⌋ c_m`.
pub fn ingham_series_partial(c: &CoefficientSequence, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(out_of_range("n", 0.0, c.len() as f64));
    }
    check_n(c, n)?;
    let nf = n as f64;
    let mut acc = ComplexSum::new();
    for m in 1..=n {
        let w = (m * (n / m)) as f64 / nf;
        acc.add(c.get(m) * w);
    }
    Ok(acc.value())
}

/// Tauber's weighted sum `Σ_{k≤n} k a_k`.
pub fn tauber_weighted(a: &CoefficientSequence, n: usize) -> Result<Complex64> {
    check_n(a, n)?;
    Ok((1..=n)
        .map(|k| a.get(k) * k as f64)
        .collect::<ComplexSum>()
        .value())
}

/// A finite-prefix Abel-type sum together with the number of terms used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbelSum {
    pub value: Complex64,
    pub terms: usize,
}

/// Power-series sum `Σ_{k≤N} a_k x^k` over the whole stored prefix.
pub fn abel_power_sum(a: &CoefficientSequence, x: f64) -> Result<AbelSum> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "abel_power_sum needs 0 < x < 1, got {x}"
        )));
    }
    let mut acc = ComplexSum::new();
    let mut power = 1.0;
    for k in 1..=a.len() {
        power *= x;
        acc.add(a.get(k) * power);
    }
    Ok(AbelSum {
        value: acc.value(),
        terms: a.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// `λ_m = log m`
    Log,
    Explicit,
}

/// Exponents `λ_1 < λ_2 < ...` of an `(A, λ)` summation method.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    kind: WeightKind,
    weights: Vec<f64>,
}

impl WeightSequence {
    /// `λ_m = log m` for `m = 1..=n`.
    pub fn log(n: usize) -> Self {
        Self {
            kind: WeightKind::Log,
            weights: (1..=n).map(|m| (m as f64).ln()).collect(),
        }
    }

    /// Explicit weights: strictly increasing, positive except that `λ_1 = 0` is allowed.
    pub fn explicit(weights: Vec<f64>) -> Result<Self> {
        if let Some(&first) = weights.first() {
            if !(first >= 0.0) {
                return Err(Error::InvalidArgument(format!("λ_1 = {first} is negative")));
            }
        }
        if let Some(i) = weights.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!(
                "weights not strictly increasing at index {}",
                i + 2
            )));
        }
        Ok(Self {
            kind: WeightKind::Explicit,
            weights,
        })
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `λ_1 = 0`, the boundary case where the first term is not damped.
    pub fn has_boundary_weight(&self) -> bool {
        self.weights.first() == Some(&0.0)
    }
}

/// `Σ_m c_m e^{−λ_m x}` over the stored prefix of `c`.
///
/// For logarithmic weights this is the Dirichlet series `Σ c_m m^{−x}`,
/// evaluated by the same kernel as the Dirichlet series evaluator.
pub fn abel_lambda_sum(c: &CoefficientSequence, w: &WeightSequence, x: f64) -> Result<AbelSum> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "abel_lambda_sum needs x > 0, got {x}"
        )));
    }
    if w.len() < c.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            found: w.len(),
        });
    }
    let value = match w.kind {
        WeightKind::Log => dirichlet_partial(c.values(), x),
        WeightKind::Explicit => c
            .values()
            .iter()
            .zip(&w.weights)
            .map(|(&cm, &lam)| cm * (-lam * x).exp())
            .collect::<ComplexSum>()
            .value(),
    };
    Ok(AbelSum {
        value,
        terms: c.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PsiTable, SieveTable};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn unit(n: usize) -> CoefficientSequence {
        CoefficientSequence::from_fn(n, |k| if k == 1 { c(1.0) } else { c(0.0) })
    }

    fn mu_seq(t: &SieveTable, n: usize) -> CoefficientSequence {
        let mu = t.mobius_table(n).unwrap();
        CoefficientSequence::from_real(mu[1..].iter().map(|&x| x as f64))
    }

    #[test]
    fn ingham_a_examples() {
        assert_eq!(ingham_a(&unit(100), 100).unwrap(), c(100.0));
        let ones = CoefficientSequence::from_real(vec![1.0; 6]);
        assert_eq!(ingham_a(&ones, 6).unwrap(), c(14.0));
        let t = SieveTable::new(1000).unwrap();
        let mu = mu_seq(&t, 1000);
        for n in 1..=1000 {
            assert_eq!(ingham_a(&mu, n).unwrap(), c(1.0));
        }
        assert!(ingham_a(&ones, 7).is_err());
    }

    #[test]
    fn ingham_s_examples() {
        assert_eq!(ingham_s(&unit(5), 1).unwrap(), c(0.0));
        let t = SieveTable::new(100).unwrap();
        let mu = mu_seq(&t, 100);
        assert!((ingham_s(&mu, 10).unwrap().re + 7.8320141).abs() < 1e-7);
        assert!((ingham_s(&mu, 10).unwrap().re + 2520f64.ln()).abs() < 1e-9);
        let a2 = CoefficientSequence::from_fn(10, |k| if k == 2 { c(1.0) } else { c(0.0) });
        let s = ingham_s(&a2, 7).unwrap();
        assert!((s.re - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!((s.re - 2.0794415).abs() < 1e-7);
        assert!(ingham_s(&a2, 0).is_err());
    }

    #[test]
    fn mu_s_is_minus_psi() {
        let t = SieveTable::new(20_000).unwrap();
        let mu = mu_seq(&t, 20_000);
        let psi = PsiTable::new(&t, 20_000).unwrap();
        for n in (2..=20_000).step_by(37) {
            let s = ingham_s(&mu, n).unwrap().re;
            let p = psi.psi_int(n);
            assert!((s + p).abs() <= 1e-9 * p.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn batch_matches_pointwise() {
        let t = SieveTable::new(1000).unwrap();
        let mu = mu_seq(&t, 1000);
        let vals = batch_sums(&mu, &[10, 100, 1000]).unwrap();
        assert!(vals.iter().all(|v| v.a == c(1.0)));
        let one = batch_sums(&mu, &[77]).unwrap();
        assert_eq!(one[0].a, ingham_a(&mu, 77).unwrap());
        assert_eq!(one[0].s, ingham_s(&mu, 77).unwrap());
        assert!(batch_sums(&mu, &[100, 10]).is_err());
        assert!(batch_sums(&mu, &[1001]).is_err());
        assert_eq!(batch_sums(&mu, &[1]).unwrap()[0].normalized_s, None);
    }

    #[test]
    fn ingham_partial_examples() {
        let five = CoefficientSequence::from_fn(50, |k| if k == 1 { c(5.0) } else { c(0.0) });
        for n in 1..=50 {
            assert_eq!(ingham_series_partial(&five, n).unwrap(), c(5.0));
        }
        let two = CoefficientSequence::from_real([1.0, 1.0]);
        assert_eq!(ingham_series_partial(&two, 2).unwrap(), c(2.0));
    }

    #[test]
    fn ingham_partial_for_mu_matches_loop() {
        let t = SieveTable::new(10_000).unwrap();
        let mu = mu_seq(&t, 10_000);
        let n = 10_000usize;
        let direct: f64 = (1..=n)
            .map(|m| t.mobius(m).unwrap() as f64 * (m * (n / m)) as f64)
            .sum::<f64>()
            / n as f64;
        let v = ingham_series_partial(&mu, n).unwrap();
        assert!((v.re - direct).abs() < 1e-12);
    }

    #[test]
    fn tauber_examples() {
        let u = unit(10);
        for n in 1..=10 {
            assert_eq!(tauber_weighted(&u, n).unwrap(), c(1.0));
        }
        let inv_sq = CoefficientSequence::from_fn(100, |k| c(1.0 / (k * k) as f64));
        let h100: f64 = (1..=100).map(|k| 1.0 / k as f64).sum();
        let v = tauber_weighted(&inv_sq, 100).unwrap().re;
        assert!((v - h100).abs() < 1e-12);
        assert!((v - 5.1873775).abs() < 1e-7);
        let alt = CoefficientSequence::from_fn(4, |k| c(if k % 2 == 0 { 1.0 } else { -1.0 }));
        assert_eq!(tauber_weighted(&alt, 4).unwrap(), c(2.0));
    }

    #[test]
    fn abel_power_examples() {
        let u = unit(30);
        assert!((abel_power_sum(&u, 0.3).unwrap().value.re - 0.3).abs() < 1e-16);
        let ones = CoefficientSequence::from_real(vec![1.0; 60]);
        let s = abel_power_sum(&ones, 0.5).unwrap();
        assert_eq!(s.terms, 60);
        assert!((s.value.re - 1.0).abs() <= 2f64.powi(-60) * 2.0);
        let alt = CoefficientSequence::from_fn(200, |k| c(if k % 2 == 0 { 1.0 } else { -1.0 }));
        let v = abel_power_sum(&alt, 0.9).unwrap().value.re;
        assert!((v + 0.9 / 1.9).abs() < 1e-8);
        assert!(abel_power_sum(&alt, 1.0).is_err());
        assert!(abel_power_sum(&alt, 0.0).is_err());
    }

    #[test]
    fn abel_lambda_examples() {
        let c1 = CoefficientSequence::from_fn(5, |k| if k == 1 { c(3.0) } else { c(0.0) });
        let w = WeightSequence::explicit(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(w.has_boundary_weight());
        for x in [0.1, 1.0, 7.0] {
            assert_eq!(abel_lambda_sum(&c1, &w, x).unwrap().value, c(3.0));
        }
        let two = CoefficientSequence::from_real([1.0, 1.0]);
        let w = WeightSequence::explicit(vec![0.0, 2f64.ln()]).unwrap();
        assert!((abel_lambda_sum(&two, &w, 1.0).unwrap().value.re - 1.5).abs() < 1e-15);
        assert!(abel_lambda_sum(&two, &w, 0.0).is_err());
        assert!(WeightSequence::explicit(vec![0.0, 0.0]).is_err());
        assert!(WeightSequence::explicit(vec![-1.0, 0.0]).is_err());
        let short = WeightSequence::explicit(vec![0.0]).unwrap();
        assert!(abel_lambda_sum(&two, &short, 1.0).is_err());
    }
}
