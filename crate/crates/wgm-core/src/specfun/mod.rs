//! Complex-argument special functions of integer and half-integer order.
//!
//! Everything the resonance pipeline consumes lives here: Bessel J_m and
//! Hankel H_m^(1) with derivatives on the complex strip where resonances are
//! hunted, roots of the flipped Airy function for the asymptotic starting
//! values, and the Kummer/Whittaker pair for the Luneburg-lens oracle.
//!
//! All functions are pure; accuracy targets and working regions are stated on
//! each item. The guiding identity used throughout to eliminate second
//! derivatives is the Bessel equation y'' = -y'/z - (1 - m^2/z^2) y.

mod airy;
mod bessel;
mod kummer;

pub use airy::airy_neg_roots;
pub use bessel::{bessel_j_pair, hankel1_pair};
pub use kummer::{kummer_1f1, whittaker_m_pair};

#[cfg(test)]
pub(crate) use airy::ai_neg;

use num_complex::Complex64;

/// A function value together with its derivative with respect to the
/// function's own argument.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FunPair {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl FunPair {
    pub(crate) fn new(value: Complex64, derivative: Complex64) -> Self {
        FunPair { value, derivative }
    }

    pub fn is_finite(&self) -> bool {
        self.value.re.is_finite()
            && self.value.im.is_finite()
            && self.derivative.re.is_finite()
            && self.derivative.im.is_finite()
    }
}

/// Largest order accepted by the Bessel/Hankel entry points.
pub const MAX_ORDER: usize = 200;

/// Largest |z| accepted by the Bessel/Hankel entry points.
pub const MAX_ARG: f64 = 1.0e4;

/// Largest |Im z| accepted by `hankel1_pair`.
pub const MAX_HANKEL_IM: f64 = 50.0;
