//! Coefficient sequences `a_k`, their divisor sums `f(m) = Σ_{d|m} a_d`, and
//! completely multiplicative functions given by their values on primes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::SieveTable;
use crate::error::{out_of_range, Error, Result};
use crate::numeric::ComplexSum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used when checking `|f(p)| <= 1`.
pub const BOUND_TOL: f64 = 1e-12;

/// A finite prefix `a_1..a_N` together with the running sums of `a_k` and
/// `a_k log k` used by the block-decomposed Ingham sums.
///
/// Coefficients beyond `N` are treated as zero by every consumer that needs
/// them ([`CoefficientSequence::zero_padded`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    values: Vec<Complex64>,
    // prefix_a[k] = a_1 + ... + a_k, prefix_a[0] = 0
    prefix_a: Vec<Complex64>,
    // prefix_alog[k] = Σ_{j<=k} a_j log j
    prefix_alog: Vec<Complex64>,
}

impl CoefficientSequence {
    pub fn new(values: Vec<Complex64>) -> Self {
        let n = values.len();
        let mut prefix_a = Vec::with_capacity(n + 1);
        let mut prefix_alog = Vec::with_capacity(n + 1);
        prefix_a.push(ZERO);
        prefix_alog.push(ZERO);
        let mut acc = ComplexSum::new();
        let mut acc_log = ComplexSum::new();
        for (i, &a) in values.iter().enumerate() {
            let k = i + 1;
            acc.add(a);
            // log 1 = 0, so a_1 never enters the weighted prefix
            if k > 1 {
                acc_log.add(a * (k as f64).ln());
            }
            prefix_a.push(acc.value());
            prefix_alog.push(acc_log.value());
        }
        Self {
            values,
            prefix_a,
            prefix_alog,
        }
    }

    pub fn from_real<I: IntoIterator<Item = f64>>(values: I) -> Self {
        Self::new(values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    /// Sequence of length `n` with `a_k = gen(k)`.
    pub fn from_fn(n: usize, mut gen: impl FnMut(usize) -> Complex64) -> Self {
        Self::new((1..=n).map(&mut gen).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_k` for `1 <= k <= N`; zero outside.
    pub fn get(&self, k: usize) -> Complex64 {
        if k == 0 || k > self.values.len() {
            ZERO
        } else {
            self.values[k - 1]
        }
    }

    /// The coefficients `a_1..a_N` (index 0 holds `a_1`).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `Σ_{j<=k} a_j`, for `k <= N`.
    pub fn prefix_a(&self, k: usize) -> Complex64 {
        self.prefix_a[k]
    }

    /// `Σ_{j<=k} a_j log j`, for `k <= N`.
    pub fn prefix_alog(&self, k: usize) -> Complex64 {
        self.prefix_alog[k]
    }

    /// The same coefficients extended with zeros to length `n` (or truncated).
    pub fn zero_padded(&self, n: usize) -> Self {
        let mut v = self.values.clone();
        v.resize(n, ZERO);
        Self::new(v)
    }

    /// Index of the last nonzero coefficient (0 when all vanish).
    pub fn support_end(&self) -> usize {
        self.values
            .iter()
            .rposition(|z| z.re != 0.0 || z.im != 0.0)
            .map_or(0, |i| i + 1)
    }
}

/// `f(m) = Σ_{d|m} a_d` for `m = 1..=N`, via the divisor-lattice double loop.
pub fn f_from_a(table: &SieveTable, seq: &CoefficientSequence) -> Result<Vec<Complex64>> {
    let n = seq.len();
    if n > table.limit() {
        return Err(Error::LengthMismatch {
            expected: table.limit(),
            found: n,
        });
    }
    let mut f = vec![ZERO; n];
    for d in 1..=n {
        let a = seq.get(d);
        if a == ZERO {
            continue;
        }
        let mut m = d;
        while m <= n {
            f[m - 1] += a;
            m += d;
        }
    }
    Ok(f)
}

/// Möbius inversion: `a_m = Σ_{d|m} μ(m/d) f(d)`.
pub fn a_from_f(table: &SieveTable, f: &[Complex64]) -> Result<CoefficientSequence> {
    let n = f.len();
    if n > table.limit() {
        return Err(Error::LengthMismatch {
            expected: table.limit(),
            found: n,
        });
    }
    let mu = table.mobius_table(n)?;
    let mut a = vec![ZERO; n];
    for j in 1..=n {
        let sign = mu[j];
        if sign == 0 {
            continue;
        }
        let mut d = 1;
        while d * j <= n {
            let v = f[d - 1];
            if sign > 0 {
                a[d * j - 1] += v;
            } else {
                a[d * j - 1] -= v;
            }
            d += 1;
        }
    }
    Ok(CoefficientSequence::new(a))
}

/// A completely multiplicative function described by its values on primes.
///
/// Primes up to `cutoff` take the listed value or `default`; primes above
/// `cutoff` take the value 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeSpec {
    prime_values: BTreeMap<u64, Complex64>,
    default: Complex64,
    cutoff: u64,
    bound_check: bool,
}

impl MultiplicativeSpec {
    /// A spec with every prime up to `cutoff` mapped to `default`.
    pub fn new(cutoff: u64, default: Complex64, bound_check: bool) -> Result<Self> {
        let spec = Self {
            prime_values: BTreeMap::new(),
            default,
            cutoff,
            bound_check,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `f(p) = 1` everywhere, i.e. `f ≡ 1`.
    pub fn trivial(cutoff: u64) -> Self {
        Self::new(cutoff, ONE, true).expect("unit default is valid")
    }

    /// Liouville's λ: `f(p) = -1` for every prime up to `cutoff`.
    pub fn liouville(cutoff: u64) -> Self {
        Self::new(cutoff, -ONE, true).expect("-1 default is valid")
    }

    /// Sets `f(p) = value` for a prime `p <= cutoff`.
    pub fn with_prime(mut self, p: u64, value: Complex64) -> Result<Self> {
        self.check_entry(p, value)?;
        self.prime_values.insert(p, value);
        Ok(self)
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn default_value(&self) -> Complex64 {
        self.default
    }

    pub fn bound_check(&self) -> bool {
        self.bound_check
    }

    /// Explicitly listed prime values.
    pub fn prime_values(&self) -> &BTreeMap<u64, Complex64> {
        &self.prime_values
    }

    /// `f(p)`, with the convention `f(p) = 1` for `p > cutoff`.
    pub fn value_at_prime(&self, p: u64) -> Complex64 {
        if p > self.cutoff {
            ONE
        } else {
            self.prime_values.get(&p).copied().unwrap_or(self.default)
        }
    }

    /// Whether every prime value satisfies `|f(p)| <= 1` (within [`BOUND_TOL`]).
    pub fn is_bounded(&self) -> bool {
        self.first_unbounded().is_none()
    }

    /// Describes the first value breaking `|f(p)| <= 1`, if any.
    fn first_unbounded(&self) -> Option<String> {
        if self.default.norm() > 1.0 + BOUND_TOL {
            return Some(format!("default value has modulus {}", self.default.norm()));
        }
        self.prime_values
            .iter()
            .find(|(_, v)| v.norm() > 1.0 + BOUND_TOL)
            .map(|(p, v)| format!("prime {p}: |f({p})| = {} > 1", v.norm()))
    }

    /// Fails with [`Error::BoundViolation`] unless `|f(p)| <= 1` for all `p`.
    pub fn require_bounded(&self) -> Result<()> {
        match self.first_unbounded() {
            Some(msg) => Err(Error::BoundViolation(msg)),
            None => Ok(()),
        }
    }

    fn check_entry(&self, p: u64, value: Complex64) -> Result<()> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidArgument(format!("key {p} is not prime")));
        }
        if p > self.cutoff {
            return Err(Error::InvalidArgument(format!(
                "prime {p} exceeds cutoff {}",
                self.cutoff
            )));
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "prime {p}: value is not finite"
            )));
        }
        if self.bound_check && value.norm() > 1.0 + BOUND_TOL {
            return Err(Error::BoundViolation(format!(
                "prime {p}: |f({p})| = {} > 1",
                value.norm()
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.default.re.is_finite() || !self.default.im.is_finite() {
            return Err(Error::InvalidArgument("default value is not finite".into()));
        }
        if self.bound_check && self.default.norm() > 1.0 + BOUND_TOL {
            return Err(Error::BoundViolation(format!(
                "default value has modulus {} > 1",
                self.default.norm()
            )));
        }
        for (&p, &v) in &self.prime_values {
            self.check_entry(p, v)?;
        }
        Ok(())
    }

    /// Parses the JSON form
    /// `{"type":"completely_multiplicative","cutoff":N,"default":[re,im],"primes":{"2":[re,im]}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpecJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("multiplicative spec: {e}")))?;
        raw.into_spec()
    }

    pub fn to_json(&self) -> String {
        let raw = SpecJson {
            kind: SPEC_TYPE.to_string(),
            cutoff: self.cutoff,
            default: [self.default.re, self.default.im],
            primes: self
                .prime_values
                .iter()
                .map(|(p, v)| (p.to_string(), [v.re, v.im]))
                .collect(),
            bound_check: self.bound_check,
        };
        serde_json::to_string(&raw).expect("spec serializes")
    }
}

const SPEC_TYPE: &str = "completely_multiplicative";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    #[serde(rename = "type")]
    kind: String,
    cutoff: u64,
    default: [f64; 2],
    #[serde(default)]
    primes: BTreeMap<String, [f64; 2]>,
    #[serde(default = "default_true")]
    bound_check: bool,
}

fn default_true() -> bool {
    true
}

impl SpecJson {
    fn into_spec(self) -> Result<MultiplicativeSpec> {
        if self.kind != SPEC_TYPE {
            return Err(Error::InvalidArgument(format!(
                "field `type`: expected \"{SPEC_TYPE}\", got \"{}\"",
                self.kind
            )));
        }
        let default = Complex64::new(self.default[0], self.default[1]);
        let mut spec = MultiplicativeSpec::new(self.cutoff, default, self.bound_check)
            .map_err(|e| Error::InvalidArgument(format!("field `default`: {e}")))?;
        for (key, [re, im]) in self.primes {
            let p: u64 = key.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "field `primes`: key \"{key}\" is not a decimal integer"
                ))
            })?;
            spec = spec
                .with_prime(p, Complex64::new(re, im))
                .map_err(|e| Error::InvalidArgument(format!("field `primes`: {e}")))?;
        }
        Ok(spec)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Values `f(1..=n)` of the completely multiplicative extension of `spec`.
pub fn extend_completely_multiplicative(
    spec: &MultiplicativeSpec,
    table: &SieveTable,
    n: usize,
) -> Result<Vec<Complex64>> {
    if n > table.limit() {
        return Err(out_of_range("n", n as f64, table.limit() as f64));
    }
    let mut f = vec![ZERO; n + 1];
    if n >= 1 {
        f[1] = ONE;
    }
    for m in 2..=n {
        let p = table.spf(m)?;
        f[m] = f[m / p] * spec.value_at_prime(p as u64);
    }
    f.remove(0);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn brute_f(a: &[Complex64], m: usize) -> Complex64 {
        (1..=m)
            .filter(|d| m.is_multiple_of(*d))
            .map(|d| a[d - 1])
            .sum()
    }

    #[test]
    fn prefixes_skip_log_one() {
        let s = CoefficientSequence::from_real([5.0, 1.0, 2.0]);
        assert_eq!(s.prefix_a(3), c(8.0));
        let expected = 2f64.ln() + 2.0 * 3f64.ln();
        assert!((s.prefix_alog(3).re - expected).abs() < 1e-15);
        assert_eq!(s.prefix_alog(1), ZERO);
    }

    #[test]
    fn f_from_unit_is_one() {
        let t = SieveTable::new(50).unwrap();
        let mut v = vec![0.0; 50];
        v[0] = 1.0;
        let f = f_from_a(&t, &CoefficientSequence::from_real(v)).unwrap();
        assert!(f.iter().all(|&z| z == ONE));
    }

    #[test]
    fn f_from_mu_is_indicator_of_one() {
        let t = SieveTable::new(200).unwrap();
        let mu = t.mobius_table(200).unwrap();
        let a = CoefficientSequence::from_real(mu[1..].iter().map(|&x| x as f64));
        let f = f_from_a(&t, &a).unwrap();
        assert_eq!(f[0], ONE);
        assert!(f[1..].iter().all(|&z| z == ZERO));
    }

    #[test]
    fn f_of_four_from_sparse_a() {
        let t = SieveTable::new(10).unwrap();
        let a = CoefficientSequence::from_real([1.0, 1.0, 0.0, 1.0, 0.0]);
        let f = f_from_a(&t, &a).unwrap();
        assert_eq!(f[3], c(3.0));
        for m in 1..=5 {
            assert_eq!(f[m - 1], brute_f(a.values(), m));
        }
    }

    #[test]
    fn a_from_constant_f() {
        let t = SieveTable::new(100).unwrap();
        let a = a_from_f(&t, &vec![ONE; 100]).unwrap();
        assert_eq!(a.get(1), ONE);
        assert!((2..=100).all(|k| a.get(k) == ZERO));
    }

    #[test]
    fn a_from_identity_is_totient() {
        let t = SieveTable::new(100).unwrap();
        let f: Vec<Complex64> = (1..=100).map(|m| c(m as f64)).collect();
        let a = a_from_f(&t, &f).unwrap();
        for m in 1..=100usize {
            let phi = (1..=m).filter(|&k| gcd(k, m) == 1).count() as f64;
            assert_eq!(a.get(m), c(phi), "m = {m}");
        }
    }

    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }

    #[test]
    fn length_guard() {
        let t = SieveTable::new(10).unwrap();
        let a = CoefficientSequence::from_real(vec![1.0; 11]);
        assert!(matches!(
            f_from_a(&t, &a),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(a_from_f(&t, a.values()).is_err());
    }

    #[test]
    fn extension_examples() {
        let t = SieveTable::new(100).unwrap();
        let trivial =
            extend_completely_multiplicative(&MultiplicativeSpec::trivial(100), &t, 20).unwrap();
        assert!(trivial.iter().all(|&z| z == ONE));

        let f2 = MultiplicativeSpec::trivial(100)
            .with_prime(2, ZERO)
            .unwrap();
        let f = extend_completely_multiplicative(&f2, &t, 10).unwrap();
        let expect: Vec<Complex64> = [1., 0., 1., 0., 1., 0., 1., 0., 1., 0.].map(c).to_vec();
        assert_eq!(f, expect);

        let lv =
            extend_completely_multiplicative(&MultiplicativeSpec::liouville(10), &t, 10).unwrap();
        let expect: Vec<Complex64> = [1., -1., -1., 1., -1., 1., -1., -1., 1., 1.]
            .map(c)
            .to_vec();
        assert_eq!(lv, expect);
    }

    #[test]
    fn cutoff_convention() {
        let t = SieveTable::new(100).unwrap();
        let spec = MultiplicativeSpec::liouville(5);
        let f = extend_completely_multiplicative(&spec, &t, 14).unwrap();
        // 7, 11, 13 lie above the cutoff
        assert_eq!(f[6], ONE);
        assert_eq!(f[13], -ONE); // 14 = 2 * 7
    }

    #[test]
    fn spec_json_roundtrip_and_validation() {
        let text = r#"{"type":"completely_multiplicative","cutoff":1000000,"default":[1,0],"primes":{"2":[0,0]}}"#;
        let spec = MultiplicativeSpec::from_json(text).unwrap();
        assert_eq!(spec.value_at_prime(2), ZERO);
        assert_eq!(spec.value_at_prime(3), ONE);
        assert_eq!(spec.cutoff(), 1_000_000);
        let again = MultiplicativeSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);

        let bad = r#"{"type":"completely_multiplicative","cutoff":100,"default":[1,0],"primes":{"2":[1.5,0]}}"#;
        let err = MultiplicativeSpec::from_json(bad).unwrap_err().to_string();
        assert!(err.contains("prime 2"), "{err}");

        let opt_out = r#"{"type":"completely_multiplicative","cutoff":100,"default":[1,0],"primes":{"2":[1.5,0]},"bound_check":false}"#;
        let spec = MultiplicativeSpec::from_json(opt_out).unwrap();
        assert!(!spec.is_bounded());

        let not_prime = r#"{"type":"completely_multiplicative","cutoff":100,"default":[1,0],"primes":{"4":[0,0]}}"#;
        assert!(MultiplicativeSpec::from_json(not_prime)
            .unwrap_err()
            .to_string()
            .contains("not prime"));

        let wrong_type = r#"{"type":"additive","cutoff":100,"default":[1,0]}"#;
        assert!(MultiplicativeSpec::from_json(wrong_type)
            .unwrap_err()
            .to_string()
            .contains("`type`"));

        let above = r#"{"type":"completely_multiplicative","cutoff":10,"default":[1,0],"primes":{"11":[0,0]}}"#;
        assert!(MultiplicativeSpec::from_json(above).is_err());
    }
}
