//! Dense complex LU with partial pivoting and one pass of double-double
//! iterative refinement.
//!
//! Collocation matrices carry second-derivative rows whose magnitude grows
//! like N^2; plain LU then leaves the coefficient tail at ~N^2 * eps, which
//! would stall the spectral solver's 1e-12 tail criterion. Rows are
//! max-equilibrated before factoring and solutions are refined against a
//! residual accumulated error-free.

use num_complex::Complex64;

use crate::dd::Cdd;
use crate::error::{Error, Result};

pub struct Lu {
    n: usize,
    /// Equilibrated original matrix, row-major.
    a: Vec<Complex64>,
    /// LU factors of `a`, row-major.
    lu: Vec<Complex64>,
    piv: Vec<usize>,
    /// 1 / max |row| applied to each row of the original system.
    row_scale: Vec<f64>,
}

impl Lu {
    /// Factors the row-major n x n matrix.
    pub fn factor(mut a: Vec<Complex64>, n: usize) -> Result<Lu> {
        assert_eq!(a.len(), n * n);
        let mut row_scale = vec![1.0; n];
        for i in 0..n {
            let mx = a[i * n..(i + 1) * n]
                .iter()
                .map(|v| v.re.abs().max(v.im.abs()))
                .fold(0.0f64, f64::max);
            if mx == 0.0 {
                return Err(Error::SingularSystem(format!("zero row {i}")));
            }
            let s = 1.0 / mx;
            row_scale[i] = s;
            for v in &mut a[i * n..(i + 1) * n] {
                *v *= s;
            }
        }

        let mut lu = a.clone();
        let mut piv = vec![0usize; n];
        for k in 0..n {
            // Partial pivot on |.|_1 of the column tail.
            let mut p = k;
            let mut best = lu[k * n + k].re.abs() + lu[k * n + k].im.abs();
            for i in k + 1..n {
                let mag = lu[i * n + k].re.abs() + lu[i * n + k].im.abs();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            if best < 1e-280 {
                return Err(Error::SingularSystem(format!(
                    "pivot {best:e} at column {k}"
                )));
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let inv_pivot = Complex64::new(1.0, 0.0) / lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] * inv_pivot;
                lu[i * n + k] = factor;
                if factor != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let update = factor * lu[k * n + j];
                        lu[i * n + j] -= update;
                    }
                }
            }
        }
        Ok(Lu { n, a, lu, piv, row_scale })
    }

    fn substitute(&self, b: &mut [Complex64]) {
        let n = self.n;
        // Factorization swaps whole rows (L parts included), so the whole
        // permutation applies to the right-hand side before elimination.
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        for k in 0..n {
            let bk = b[k];
            for i in k + 1..n {
                b[i] -= self.lu[i * n + k] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..n {
                acc -= self.lu[k * n + j] * b[j];
            }
            b[k] = acc / self.lu[k * n + k];
        }
    }

    /// Solves A x = b with one double-double refinement step.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut scaled = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            scaled[i] = b[i] * self.row_scale[i];
        }
        let mut x = scaled.clone();
        self.substitute(&mut x);

        // r = b - A x accumulated error-free, then one correction.
        let mut r = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Cdd::from_c64(scaled[i]);
            let row = &self.a[i * n..(i + 1) * n];
            for j in 0..n {
                acc = acc.mul_acc_c64(-row[j], x[j]);
            }
            r[i] = acc.to_c64();
        }
        self.substitute(&mut r);
        for i in 0..n {
            x[i] += r[i];
        }
        x
    }
}
