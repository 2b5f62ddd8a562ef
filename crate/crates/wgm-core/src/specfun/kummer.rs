//! Kummer confluent hypergeometric 1F1 and the Whittaker M function.
//!
//! The 1F1 series alternates violently for the Luneburg parameters (a in the
//! left half-plane, z with positive real part), so partial sums are carried
//! in complex double-double arithmetic. The Whittaker function is assembled
//! from M_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2} 1F1(mu-kappa+1/2; 1+2mu; z).

use num_complex::Complex64;

use super::FunPair;
use crate::dd::Cdd;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 3000;

fn series_1f1(a: Complex64, b: u32, z: Complex64) -> Result<Complex64> {
    let z_dd = Cdd::from_c64(z);
    let mut term = Cdd::ONE;
    let mut sum = Cdd::ONE;
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let factor = Cdd::from_c64(a + kf)
            .mul(z_dd)
            .div_f64(b as f64 + kf)
            .div_f64(kf + 1.0);
        term = term.mul(factor);
        sum = sum.add(term);
        if term.abs_est() <= 1e-26 * sum.abs_est().max(1e-250) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum.to_c64());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Convergence {
        context: "kummer_1f1",
        message: format!("series did not meet tail criterion within {MAX_TERMS} terms"),
    })
}

/// (1F1(a;b;z), d/dz 1F1(a;b;z)) with the derivative from the contiguous
/// relation d/dz 1F1(a;b;z) = (a/b) 1F1(a+1;b+1;z).
pub fn kummer_1f1(a: Complex64, b: u32, z: Complex64) -> Result<FunPair> {
    if b == 0 {
        return Err(Error::Domain {
            context: "kummer_1f1",
            message: "b must be a positive integer".into(),
        });
    }
    if z.norm() > 500.0 {
        return Err(Error::Domain {
            context: "kummer_1f1",
            message: format!("|z| = {:e} exceeds 500", z.norm()),
        });
    }
    let value = series_1f1(a, b, z)?;
    let derivative = a / (b as f64) * series_1f1(a + 1.0, b + 1, z)?;
    Ok(FunPair::new(value, derivative))
}

/// (M_{kappa,mu}(z), d/dz M_{kappa,mu}(z)) on the principal branch.
///
/// Requires 1 + 2 mu to be a positive integer (here mu = m/2).
pub fn whittaker_m_pair(kappa: Complex64, mu: f64, z: Complex64) -> Result<FunPair> {
    let b_real = 1.0 + 2.0 * mu;
    let b = b_real.round();
    if (b_real - b).abs() > 1e-12 || b < 1.0 {
        return Err(Error::Domain {
            context: "whittaker_m_pair",
            message: format!("1 + 2 mu = {b_real} is not a positive integer"),
        });
    }
    if z.norm() == 0.0 {
        return Err(Error::Domain {
            context: "whittaker_m_pair",
            message: "z = 0 is a branch point".into(),
        });
    }
    let a = mu - kappa + 0.5;
    let f = kummer_1f1(a, b as u32, z)?;
    let prefactor = (-0.5 * z).exp() * z.powc(Complex64::new(mu + 0.5, 0.0));
    let value = prefactor * f.value;
    // Product rule on e^{-z/2} z^{mu+1/2} F(z).
    let derivative = prefactor * (f.derivative + ((mu + 0.5) / z - 0.5) * f.value);
    Ok(FunPair::new(value, derivative))
}
