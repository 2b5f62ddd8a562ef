//! Bessel J_m and Hankel H_m^(1) for complex argument, integer order.
//!
//! J_m: backward (Miller) recurrence normalized with the Jacobi-Anger sum
//! e^{iz} = J_0 + 2 sum_j i^j J_j (or its conjugate twin for Im z > 0, so the
//! normalizer is always the *growing* exponential and the sum never cancels
//! catastrophically).
//!
//! Y_m: Neumann series for Y_0 and Y_0' in terms of the already-normalized
//! J_{2k}, then the three-term recurrence upward. H = J + iY. This route is
//! accurate wherever H^(1) is not recessive, i.e. Im z <= 0 and a mild band
//! above the axis.
//!
//! For Im z > 8, H^(1) is recessive and J + iY cancels ~e^{2 Im z}; there we
//! switch to the modified-Bessel integral K_m(w) = int_0^inf e^{-w cosh t}
//! cosh(mt) dt with w = -iz (Re w = Im z > 8, so the integrand decays fast)
//! and H_m^(1)(z) = (2/pi) (-i)^{m+1} K_m(-iz).

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{FunPair, MAX_ARG, MAX_HANKEL_IM, MAX_ORDER};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switch line between the J+iY route and the K-integral route for H^(1).
const UPPER_IM_SWITCH: f64 = 8.0;

fn check_region(context: &'static str, m: usize, z: Complex64) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::Domain {
            context,
            message: format!("order m = {m} exceeds {MAX_ORDER}"),
        });
    }
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() > MAX_ARG {
        return Err(Error::Domain {
            context,
            message: format!("|z| = {:e} outside working region", z.norm()),
        });
    }
    Ok(())
}

/// (J_m(z), J_m'(z)).
///
/// Relative accuracy ~1e-13 or better for |z| <= 300, m <= 120; the tested
/// region of the resonance pipeline. Values that genuinely underflow f64
/// come back as 0.
pub fn bessel_j_pair(m: usize, z: Complex64) -> Result<FunPair> {
    check_region("bessel_j_pair", m, z)?;
    let j = j_seq(m + 1, z);
    let value = j[m];
    let derivative = if m == 0 {
        -j[1]
    } else {
        0.5 * (j[m - 1] - j[m + 1])
    };
    let pair = FunPair::new(value, derivative);
    if !pair.is_finite() {
        return Err(Error::Domain {
            context: "bessel_j_pair",
            message: "result not finite".into(),
        });
    }
    Ok(pair)
}

/// (H_m^(1)(z), (H_m^(1))'(z)).
///
/// z = 0 is a pole/logarithmic singularity and is rejected. Working strip
/// |Im z| <= 50. Accuracy ~1e-13 for Im z <= 0; above the axis the error
/// grows like e^{2 Im z} * 1e-16 until the switch at Im z = 8, beyond which
/// the K-integral route restores ~1e-12.
pub fn hankel1_pair(m: usize, z: Complex64) -> Result<FunPair> {
    check_region("hankel1_pair", m, z)?;
    if z.norm() < 1e-290 {
        return Err(Error::Domain {
            context: "hankel1_pair",
            message: "z = 0 is singular for H_m".into(),
        });
    }
    if z.im.abs() > MAX_HANKEL_IM {
        return Err(Error::Domain {
            context: "hankel1_pair",
            message: format!("|Im z| = {} exceeds {}", z.im.abs(), MAX_HANKEL_IM),
        });
    }

    let pair = if z.im <= UPPER_IM_SWITCH {
        hankel_via_jy(m, z)
    } else {
        hankel_via_k_integral(m, z)
    };
    if !pair.is_finite() {
        return Err(Error::Domain {
            context: "hankel1_pair",
            message: "result overflowed the representable range".into(),
        });
    }
    Ok(pair)
}

/// J_0..J_{n} by backward recurrence with Jacobi-Anger normalization.
pub(crate) fn j_seq(n: usize, z: Complex64) -> Vec<Complex64> {
    let az = z.norm();
    if az == 0.0 {
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return out;
    }

    // Keep enough orders for the caller and for the normalization sum; the
    // modal decay past the turning point j ~ |z| is only Airy-slow, so the
    // sum must run well beyond it.
    let keep = n.max((1.5 * az).ceil() as usize + 40);
    let start = keep + 22 + keep / 2;

    let mut f = vec![Complex64::new(0.0, 0.0); keep + 1];
    // Rescale ledger: number of 1e-250 rescalings applied before each kept
    // entry was written.
    let mut scale_epoch = vec![0u32; keep + 1];
    let mut epochs = 0u32;

    let mut fjp1 = Complex64::new(0.0, 0.0); // f_{start+1}
    let mut fj = Complex64::new(1e-300, 0.0); // f_{start}
    let two_over_z = 2.0 / z;
    for j in (0..=start).rev() {
        if j <= keep {
            f[j] = fj;
            scale_epoch[j] = epochs;
        }
        if j == 0 {
            break;
        }
        let fjm1 = j as f64 * two_over_z * fj - fjp1;
        fjp1 = fj;
        fj = fjm1;
        if fj.re.abs().max(fj.im.abs()) > 1e200 {
            fj *= 1e-250;
            fjp1 *= 1e-250;
            epochs += 1;
        }
    }

    // Bring all kept entries to the final scale epoch. Entries with pending
    // factors are >= 1e250 times smaller than the head and may flush to 0.
    for j in 0..=keep {
        let pending = epochs - scale_epoch[j];
        for _ in 0..pending {
            f[j] *= 1e-250;
        }
    }

    // Rescale to O(1) so the normalization sum neither under- nor overflows
    // in the complex division below.
    let fmax = f
        .iter()
        .map(|v| v.re.abs().max(v.im.abs()))
        .fold(0.0f64, f64::max);
    if fmax > 0.0 {
        let inv = 1.0 / fmax;
        for v in &mut f {
            *v *= inv;
        }
    }

    // Normalizer: e^{i sigma z} with sigma chosen so |e^{i sigma z}| >= 1.
    let sigma = if z.im <= 0.0 { 1.0 } else { -1.0 };
    let i_sigma = Complex64::new(0.0, sigma);
    let mut weight = Complex64::new(1.0, 0.0);
    let mut s = f[0];
    for j in 1..=keep {
        weight *= i_sigma;
        s += 2.0 * weight * f[j];
    }
    let norm = (i_sigma * z).exp() / s;

    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for j in 0..=n.min(keep) {
        out[j] = f[j] * norm;
    }
    out
}

/// J_0..J_{n} and Y_0..Y_{n}.
fn jy_seq(n: usize, z: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let az = z.norm();
    let keep = (n + 1).max((1.5 * az).ceil() as usize + 40);
    let j = j_seq(keep, z);

    let log_term = (0.5 * z).ln() + EULER_GAMMA;

    // Y_0 = (2/pi)[(ln(z/2)+gamma) J_0] - (4/pi) sum (-1)^k J_{2k}/k.
    let mut sum0 = Complex64::new(0.0, 0.0);
    // Y_0' = (2/pi)[J_0/z + (ln(z/2)+gamma) J_0'] - (4/pi) sum (-1)^k J_{2k}'/k.
    let mut sum1 = Complex64::new(0.0, 0.0);
    let mut sign = -1.0;
    let mut k = 1usize;
    while 2 * k + 1 <= keep {
        let w = sign / k as f64;
        sum0 += w * j[2 * k];
        sum1 += w * 0.5 * (j[2 * k - 1] - j[2 * k + 1]);
        sign = -sign;
        k += 1;
    }
    let y0 = (2.0 / PI) * (log_term * j[0]) - (4.0 / PI) * sum0;
    let dy0 = (2.0 / PI) * (j[0] / z - log_term * j[1]) - (4.0 / PI) * sum1;
    let y1 = -dy0;

    let mut y = vec![Complex64::new(0.0, 0.0); n + 1];
    y[0] = y0;
    if n >= 1 {
        y[1] = y1;
        for m in 1..n {
            y[m + 1] = (2.0 * m as f64) / z * y[m] - y[m - 1];
        }
    }
    (j, y)
}

fn hankel_via_jy(m: usize, z: Complex64) -> FunPair {
    let (j, y) = jy_seq(m + 1, z);
    let i = Complex64::new(0.0, 1.0);
    let h = j[m] + i * y[m];
    let dh = if m == 0 {
        -(j[1] + i * y[1])
    } else {
        0.5 * ((j[m - 1] + i * y[m - 1]) - (j[m + 1] + i * y[m + 1]))
    };
    FunPair::new(h, dh)
}

/// K_m(w) for Re w > 0 by trapezoidal quadrature of the cosh integral.
///
/// Step size is halved until two successive estimates agree; the integrand is
/// even and entire, so the trapezoid rule converges geometrically.
fn k_integral(m: usize, w: Complex64) -> Complex64 {
    let eval = |h: f64| -> Complex64 {
        let mut acc = 0.5 * (-w).exp(); // t = 0, cosh(0) = 1
        let mut peak = acc.norm();
        let mut small_run = 0;
        let mut idx = 1usize;
        loop {
            let t = h * idx as f64;
            let term = (-w * t.cosh()).exp() * (m as f64 * t).cosh();
            acc += term;
            let mag = term.norm();
            peak = peak.max(mag);
            if mag < peak * 1e-20 {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            idx += 1;
            if idx > 2_000_000 {
                break;
            }
        }
        acc * h
    };

    let mut h = 0.25 / (1.0 + w.im.abs() / 8.0);
    let mut prev = eval(h);
    loop {
        h *= 0.5;
        let cur = eval(h);
        if (cur - prev).norm() <= 1e-14 * cur.norm() || h < 1.0 / 4096.0 {
            return cur;
        }
        prev = cur;
    }
}

fn hankel_via_k_integral(m: usize, z: Complex64) -> FunPair {
    let w = Complex64::new(z.im, -z.re); // w = -i z, Re w = Im z > 0
    let phase = |order: usize| -> Complex64 {
        // (2/pi) (-i)^{order+1}
        let mut p = Complex64::new(2.0 / PI, 0.0);
        for _ in 0..(order + 1) % 4 {
            p *= Complex64::new(0.0, -1.0);
        }
        p
    };
    let h_m = phase(m) * k_integral(m, w);
    let dh = if m == 0 {
        -(phase(1) * k_integral(1, w))
    } else {
        let h_m_minus = phase(m - 1) * k_integral(m - 1, w);
        h_m_minus - (m as f64 / z) * h_m
    };
    FunPair::new(h_m, dh)
}
