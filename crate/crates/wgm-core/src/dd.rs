//! Double-double arithmetic (~31 significant digits).
//!
//! Used where a plain f64 accumulation loses too many digits to cancellation:
//! the Kummer series, the Airy Maclaurin series, and the iterative-refinement
//! residuals of the collocation solver. Error-free transformations follow
//! Dekker (1971) and Knuth; no FMA is assumed.

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum of two floats (Knuth two-sum).
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Error-free sum assuming |a| >= |b| (fast two-sum).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Veltkamp split of a float into two 26-bit halves.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Error-free product (Dekker two-prod).
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let s2 = s2 + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul(Dd::from_f64(q2)));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    #[inline]
    pub fn scale(self, s: f64) -> Dd {
        self.mul(Dd::from_f64(s))
    }

    /// Division by a plain double, accurate to dd precision.
    #[inline]
    pub fn div_f64(self, x: f64) -> Dd {
        let q1 = self.hi / x;
        let (p, pe) = two_prod(q1, x);
        let r = self.sub(Dd { hi: p, lo: pe });
        let q2 = (r.hi + r.lo) / x;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }
}

/// Complex number with double-double components.
#[derive(Copy, Clone, Debug, Default)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    // ZERO and scale only appear in test oracles.
    #[allow(dead_code)]
    pub const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: Cdd = Cdd { re: Dd::ONE, im: Dd::ZERO };

    #[inline]
    pub fn from_c64(z: Complex64) -> Cdd {
        Cdd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    #[inline]
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn add(self, other: Cdd) -> Cdd {
        Cdd { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    #[inline]
    pub fn mul(self, other: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    #[allow(dead_code)]
    #[inline]
    pub fn scale(self, s: f64) -> Cdd {
        Cdd { re: self.re.scale(s), im: self.im.scale(s) }
    }

    #[inline]
    pub fn div_f64(self, x: f64) -> Cdd {
        Cdd { re: self.re.div_f64(x), im: self.im.div_f64(x) }
    }

    /// Cheap magnitude estimate (hi parts only), for tail tests.
    #[inline]
    pub fn abs_est(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    /// Accumulates `acc += a * b` where `a`, `b` are plain complex doubles,
    /// keeping the products error-free. Workhorse of refined residuals.
    #[inline]
    pub fn mul_acc_c64(self, a: Complex64, b: Complex64) -> Cdd {
        let (rr, rre) = two_prod(a.re, b.re);
        let (ii, iie) = two_prod(a.im, b.im);
        let (ri, rie) = two_prod(a.re, b.im);
        let (ir, ire) = two_prod(a.im, b.re);
        let re = self
            .re
            .add(Dd { hi: rr, lo: rre })
            .sub(Dd { hi: ii, lo: iie });
        let im = self
            .im
            .add(Dd { hi: ri, lo: rie })
            .add(Dd { hi: ir, lo: ire });
        Cdd { re, im }
    }
}
