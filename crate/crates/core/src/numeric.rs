//! Compensated accumulation and a few shared numerical kernels.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Component-wise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Sum in ascending order with compensation.
pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

pub fn sum_complex<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    iter.into_iter().collect::<ComplexSum>().value()
}

/// `sum_{m <= len} coeffs[m-1] * m^{-s}`, ascending, compensated.
///
/// Shared by the Dirichlet series evaluator and the logarithmic-weight
/// Abel sum so both produce bit-identical values.
pub fn dirichlet_partial(coeffs: &[Complex64], s: f64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (i, &a) in coeffs.iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let m = (i + 1) as f64;
        acc.add(a * m.powf(-s));
    }
    acc.value()
}

/// Relative distance used by the tolerance checks: `|x - y| / max(|x|, |y|, floor)`.
pub fn rel_diff(x: Complex64, y: Complex64, floor: f64) -> f64 {
    let scale = x.norm().max(y.norm()).max(floor);
    (x - y).norm() / scale
}
