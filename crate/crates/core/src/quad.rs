//! Adaptive Simpson quadrature over finite panels.
//!
//! Improper integrals are handled by the callers: they pick a cutoff beyond
//! which the integrand is provably below a tail tolerance and integrate the
//! remaining finite range panel by panel.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
    fn zero() -> Self;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn zero() -> Self {
        0.0
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    /// Sum of the accepted local error estimates.
    pub error: f64,
    pub evaluations: usize,
}

pub const MAX_DEPTH: u32 = 48;

struct Simpson<'f, T, F> {
    f: &'f F,
    evaluations: usize,
    error: f64,
    _marker: std::marker::PhantomData<T>,
}

impl<T: QuadValue, F: Fn(f64) -> T> Simpson<'_, T, F> {
    fn eval(&mut self, x: f64) -> Result<T> {
        self.evaluations += 1;
        let y = (self.f)(x);
        if !y.magnitude().is_finite() {
            return Err(Error::NonConvergence(format!(
                "integrand is not finite at {x}"
            )));
        }
        Ok(y)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: f64,
        depth: u32,
    ) -> Result<T> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let h = (b - a) / 12.0;
        let left = (fa + flm * 4.0 + fm) * h;
        let right = (fm + frm * 4.0 + fb) * h;
        let both = left + right;
        let diff = both - whole;
        if diff.magnitude() <= 15.0 * tol || (m - a) <= f64::EPSILON * m.abs().max(1.0) {
            self.error += diff.magnitude() / 15.0;
            return Ok(both + diff * (1.0 / 15.0));
        }
        if depth == 0 {
            return Err(Error::NonConvergence(format!(
                "adaptive Simpson exceeded depth {MAX_DEPTH} on [{a}, {b}] (local error {:.3e}, tol {tol:.3e})",
                diff.magnitude() / 15.0
            )));
        }
        let l = self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Quadrature<T>> {
    integrate_panels(f, &[a, b], tol)
}

/// Integrates over consecutive panels `[edges[i], edges[i+1]]`, sharing the
/// tolerance in proportion to panel width.
pub fn integrate_panels<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    edges: &[f64],
    tol: f64,
) -> Result<Quadrature<T>> {
    if edges.len() < 2 {
        return Err(Error::InvalidArgument("need at least one panel".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    let width = edges[edges.len() - 1] - edges[0];
    let mut s = Simpson {
        f,
        evaluations: 0,
        error: 0.0,
        _marker: std::marker::PhantomData,
    };
    let mut total = T::zero();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            return Err(Error::InvalidArgument(format!(
                "panel edges not increasing: {a} >= {b}"
            )));
        }
        let fa = s.eval(a)?;
        let fm = s.eval(0.5 * (a + b))?;
        let fb = s.eval(b)?;
        let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
        let panel_tol = tol * (b - a) / width;
        total = total + s.refine(a, b, fa, fm, fb, whole, panel_tol, MAX_DEPTH)?;
    }
    Ok(Quadrature {
        value: total,
        error: s.error,
        evaluations: s.evaluations,
    })
}

/// Panel edges `0, 1, 2, 4, ...` doubling up to `end` (the last edge is `end`).
pub fn doubling_edges(end: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut x = 1.0;
    while x < end {
        edges.push(x);
        x *= 2.0;
    }
    edges.push(end);
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_decay() {
        let edges = doubling_edges(60.0);
        let q = integrate_panels(&|t: f64| (-t).exp(), &edges, 1e-11).unwrap();
        assert!((q.value - (1.0 - (-60f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn complex_integrand() {
        let q = adaptive_simpson(
            &|x: f64| Complex64::new(x.cos(), x.sin()),
            0.0,
            std::f64::consts::PI,
            1e-11,
        )
        .unwrap();
        assert!((q.value - Complex64::new(0.0, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let r = adaptive_simpson(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }

    #[test]
    fn bad_arguments() {
        assert!(adaptive_simpson(&|x: f64| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_panels(&|x: f64| x, &[0.0], 1e-8).is_err());
        assert!(integrate_panels(&|x: f64| x, &[1.0, 0.5], 1e-8).is_err());
    }
}
