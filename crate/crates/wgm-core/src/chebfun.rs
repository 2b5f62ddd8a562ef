//! Chebyshev-coefficient representation of complex functions on an interval.
//!
//! The carrier of every boundary-value-problem solution. Coefficient space
//! (rather than point values) so the decay of the tail doubles as the
//! convergence monitor of the adaptive solver.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Chebyshev-T series sum c_n T_n(x(r)) on [a, b], x(r) = (2r - a - b)/(b - a).
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<Complex64>,
}

impl ChebSeries {
    pub fn new(a: f64, b: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(b > a) || coeffs.is_empty() {
            return Err(Error::Domain {
                context: "ChebSeries::new",
                message: format!("need b > a and at least one coefficient (a={a}, b={b})"),
            });
        }
        Ok(ChebSeries { a, b, coeffs })
    }

    pub fn zero(a: f64, b: f64) -> Self {
        ChebSeries { a, b, coeffs: vec![Complex64::new(0.0, 0.0)] }
    }

    fn to_unit(&self, r: f64) -> f64 {
        (2.0 * r - self.a - self.b) / (self.b - self.a)
    }

    /// Clenshaw evaluation at r in [a, b].
    pub fn evaluate(&self, r: f64) -> Result<Complex64> {
        let slack = 1e-12 * (self.b - self.a);
        if r < self.a - slack || r > self.b + slack {
            return Err(Error::Domain {
                context: "ChebSeries::evaluate",
                message: format!("r = {r} outside [{}, {}]", self.a, self.b),
            });
        }
        let x = self.to_unit(r).clamp(-1.0, 1.0);
        Ok(clenshaw(&self.coeffs, x))
    }

    /// Coefficient-space derivative, scaled by 2/(b - a); degree drops by one.
    pub fn differentiate(&self) -> ChebSeries {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebSeries::zero(self.a, self.b);
        }
        let mut d = vec![Complex64::new(0.0, 0.0); n - 1];
        // Backward recurrence: d_{k-1} = d_{k+1} + 2k c_k.
        let mut dkp1 = Complex64::new(0.0, 0.0);
        let mut dkp2 = Complex64::new(0.0, 0.0);
        for k in (1..n).rev() {
            let dk = dkp2 + 2.0 * k as f64 * self.coeffs[k];
            d[k - 1] = dk;
            dkp2 = dkp1;
            dkp1 = dk;
        }
        d[0] *= 0.5;
        let scale = 2.0 / (self.b - self.a);
        for c in &mut d {
            *c *= scale;
        }
        ChebSeries { a: self.a, b: self.b, coeffs: d }
    }

    /// Max magnitude of the last 3 coefficients over the max magnitude of all
    /// coefficients; 0 for the identically-zero series.
    pub fn tail_ratio(&self) -> f64 {
        let max_all = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if max_all == 0.0 {
            return 0.0;
        }
        let tail = self
            .coeffs
            .iter()
            .rev()
            .take(3)
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        tail / max_all
    }

    /// Interpolant through f at the n+1 Chebyshev-Lobatto points of [a, b].
    pub fn fit(a: f64, b: f64, n: usize, f: impl Fn(f64) -> Complex64) -> ChebSeries {
        let pts = lobatto_points(a, b, n);
        let values: Vec<Complex64> = pts.iter().map(|&r| f(r)).collect();
        Self::from_lobatto_values(a, b, &values)
    }

    /// Coefficients from values at Lobatto points x_j = cos(j pi / n)
    /// (mapped to `[a, b]`, so `values[0]` belongs to r = b and `values[n]`
    /// to r = a).
    pub fn from_lobatto_values(a: f64, b: f64, values: &[Complex64]) -> ChebSeries {
        let n = values.len() - 1;
        if n == 0 {
            return ChebSeries { a, b, coeffs: vec![values[0]] };
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.5 * (values[0] + if k % 2 == 0 { values[n] } else { -values[n] });
            for j in 1..n {
                acc += values[j] * ((k * j) as f64 * PI / n as f64).cos();
            }
            *ck = acc * (2.0 / n as f64);
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        ChebSeries { a, b, coeffs }
    }
}

fn clenshaw(c: &[Complex64], x: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// Chebyshev-Lobatto points of [a, b] ordered from b down to a
/// (r_j maps to x_j = cos(j pi / n)).
pub fn lobatto_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let x = (j as f64 * PI / n as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * x
        })
        .collect()
}
