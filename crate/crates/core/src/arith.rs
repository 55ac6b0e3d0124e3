//! Sieve-backed arithmetic functions.
//!
//! A [`SieveTable`] stores the smallest prime factor of every integer up to
//! its limit, built with a linear sieve. The Möbius function, the von
//! Mangoldt function, factorizations and divisor lists are all derived from
//! that table on demand.

use crate::error::{out_of_range, Error, Result};
use crate::numeric::CompensatedSum;

/// Largest sieve limit accepted by [`SieveTable::new`].
pub const DEFAULT_MAX_LIMIT: usize = 100_000_000;

/// Smallest-prime-factor table for `2..=limit`.
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: usize,
    // spf[0] = 0, spf[1] = 1
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SieveTable {
    /// Builds the table with the default capacity cap of 10^8.
    pub fn new(limit: usize) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_MAX_LIMIT)
    }

    /// Builds the table, rejecting limits outside `2..=cap`.
    pub fn with_cap(limit: usize, cap: usize) -> Result<Self> {
        let cap = cap.min(u32::MAX as usize);
        if !(2..=cap).contains(&limit) {
            return Err(Error::Capacity {
                requested: limit as u64,
                max: cap as u64,
            });
        }

        let mut spf = vec![0u32; limit + 1];
        spf[1] = 1;
        let mut primes: Vec<u32> = Vec::with_capacity(estimate_prime_count(limit));
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > limit {
                    break;
                }
                spf[m] = p;
            }
        }

        Ok(Self { limit, spf, primes })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `<= x`.
    pub fn primes_up_to(&self, x: usize) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as usize) <= x);
        &self.primes[..end]
    }

    /// Smallest prime factor of `m` (`m >= 2`).
    pub fn spf(&self, m: usize) -> Result<usize> {
        if m < 2 || m > self.limit {
            return Err(out_of_range("m", m as f64, self.limit as f64));
        }
        Ok(self.spf[m] as usize)
    }

    pub fn is_prime(&self, m: usize) -> bool {
        m >= 2 && m <= self.limit && self.spf[m] as usize == m
    }

    fn check(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.limit {
            Err(out_of_range("m", m as f64, self.limit as f64))
        } else {
            Ok(())
        }
    }

    /// Prime factorization as `(p, exponent)` pairs in ascending `p`.
    pub fn factorize(&self, m: usize) -> Result<Vec<(usize, u32)>> {
        self.check(m)?;
        Ok(self.factorize_unchecked(m))
    }

    pub(crate) fn factorize_unchecked(&self, mut m: usize) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Möbius function μ(m).
    pub fn mobius(&self, m: usize) -> Result<i8> {
        self.check(m)?;
        Ok(self.mobius_unchecked(m))
    }

    pub(crate) fn mobius_unchecked(&self, mut m: usize) -> i8 {
        let mut sign = 1i8;
        while m > 1 {
            let p = self.spf[m] as usize;
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        sign
    }

    /// Von Mangoldt function Λ(m): `log p` when `m = p^k`, else 0.
    pub fn mangoldt(&self, m: usize) -> Result<f64> {
        self.check(m)?;
        Ok(self.mangoldt_unchecked(m))
    }

    pub(crate) fn mangoldt_unchecked(&self, m: usize) -> f64 {
        if m < 2 {
            return 0.0;
        }
        let p = self.spf[m] as usize;
        let mut r = m;
        while r.is_multiple_of(p) {
            r /= p;
        }
        if r == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    }

    /// μ(1..=n); index 0 holds 0.
    pub fn mobius_table(&self, n: usize) -> Result<Vec<i8>> {
        if n > self.limit {
            return Err(out_of_range("n", n as f64, self.limit as f64));
        }
        let mut mu = vec![0i8; n + 1];
        if n >= 1 {
            mu[1] = 1;
        }
        for m in 2..=n {
            let p = self.spf[m] as usize;
            let r = m / p;
            mu[m] = if r.is_multiple_of(p) { 0 } else { -mu[r] };
        }
        Ok(mu)
    }

    /// Λ(1..=n); index 0 holds 0.
    pub fn mangoldt_table(&self, n: usize) -> Result<Vec<f64>> {
        if n > self.limit {
            return Err(out_of_range("n", n as f64, self.limit as f64));
        }
        Ok((0..=n).map(|m| self.mangoldt_unchecked(m)).collect())
    }

    /// Chebyshev's function Ψ(x) = Σ_{m ≤ x} Λ(m), summed directly.
    ///
    /// Use [`PsiTable`] when many queries are made.
    pub fn chebyshev_psi(&self, x: f64) -> Result<f64> {
        let top = self.floor_in_range(x)?;
        let mut acc = CompensatedSum::new();
        for m in 2..=top {
            acc.add(self.mangoldt_unchecked(m));
        }
        Ok(acc.value())
    }

    /// Δ(x, y) = Ψ(y) − Ψ(x) − (y − x).
    pub fn delta(&self, x: f64, y: f64) -> Result<f64> {
        if x > y {
            return Err(Error::InvalidArgument(format!(
                "delta requires x <= y, got x = {x}, y = {y}"
            )));
        }
        Ok(self.chebyshev_psi(y)? - self.chebyshev_psi(x)? - (y - x))
    }

    /// Σ_{d ≤ x} μ(d)/d.
    pub fn mu_over_d_partial(&self, x: usize) -> Result<f64> {
        if x > self.limit {
            return Err(out_of_range("x", x as f64, self.limit as f64));
        }
        let mut acc = CompensatedSum::new();
        for d in 1..=x {
            let mu = self.mobius_unchecked(d);
            if mu != 0 {
                acc.add(mu as f64 / d as f64);
            }
        }
        Ok(acc.value())
    }

    /// Divisors of `m` in ascending order.
    pub fn divisors(&self, m: usize) -> Result<Vec<usize>> {
        self.check(m)?;
        let mut divs = vec![1usize];
        for (p, e) in self.factorize_unchecked(m) {
            let base = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..base {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        Ok(divs)
    }

    fn floor_in_range(&self, x: f64) -> Result<usize> {
        if !(x >= 0.0) || x > self.limit as f64 {
            return Err(out_of_range("x", x, self.limit as f64));
        }
        Ok(x.floor() as usize)
    }
}

fn estimate_prime_count(n: usize) -> usize {
    if n < 17 {
        return 8;
    }
    let x = n as f64;
    (1.26 * x / x.ln()) as usize + 1
}

/// Prefix sums of Λ for O(1) Ψ queries.
#[derive(Debug, Clone)]
pub struct PsiTable {
    // prefix[m] = Ψ(m)
    prefix: Vec<f64>,
}

impl PsiTable {
    pub fn new(table: &SieveTable, n: usize) -> Result<Self> {
        if n > table.limit() {
            return Err(out_of_range("n", n as f64, table.limit() as f64));
        }
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = CompensatedSum::new();
        prefix.push(0.0);
        for m in 1..=n {
            acc.add(table.mangoldt_unchecked(m));
            prefix.push(acc.value());
        }
        Ok(Self { prefix })
    }

    pub fn limit(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn psi(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || x > self.limit() as f64 {
            return Err(out_of_range("x", x, self.limit() as f64));
        }
        Ok(self.prefix[x.floor() as usize])
    }

    /// Ψ at an integer argument.
    pub fn psi_int(&self, m: usize) -> f64 {
        self.prefix[m]
    }
}
