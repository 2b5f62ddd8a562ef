//! Roots of the flipped Airy function Ai(-z).
//!
//! Ai(-x) is evaluated by the Maclaurin series in double-double arithmetic
//! for x <= 9 (the alternating series cancels ~e^{(2/3)x^{3/2}}, far beyond
//! f64 there) and by the oscillatory asymptotic expansion truncated at its
//! smallest term for x > 9. Roots start from the classical asymptotic
//! approximation and are polished by Newton.

use crate::dd::Dd;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Ai(0) and Ai'(0).
const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// Returns (Ai(-x), d/dx Ai(-x)) for x >= 0.
pub(crate) fn ai_neg(x: f64) -> (f64, f64) {
    if x <= 9.0 {
        ai_neg_maclaurin(x)
    } else {
        ai_neg_asymptotic(x)
    }
}

/// Maclaurin series of the two ODE-normalized solutions F (F(0)=1, F'(0)=0)
/// and G (G(0)=0, G'(0)=1) of y'' = w y, combined with Ai(0), Ai'(0).
fn ai_neg_maclaurin(x: f64) -> (f64, f64) {
    let w = Dd::from_f64(-x);
    let w3 = w.mul(w).mul(w);

    // F = sum t_k, t_0 = 1, t_{k+1} = t_k w^3 / ((3k+2)(3k+3))
    // G = sum u_k, u_0 = w, u_{k+1} = u_k w^3 / ((3k+3)(3k+4))
    let mut t = Dd::ONE;
    let mut u = w;
    let mut f = t;
    let mut g = u;
    // Derivatives with respect to w: term-wise 3k/w and (3k+1)/w factors.
    let mut fp = Dd::ZERO;
    let mut gp = Dd::ONE;
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        t = t.mul(w3).div_f64(3.0 * kf + 2.0).div_f64(3.0 * kf + 3.0);
        u = u.mul(w3).div_f64(3.0 * kf + 3.0).div_f64(3.0 * kf + 4.0);
        f = f.add(t);
        g = g.add(u);
        if x > 0.0 {
            fp = fp.add(t.scale(3.0 * kf + 3.0).div(w));
            gp = gp.add(u.scale(3.0 * kf + 4.0).div(w));
        }
        k += 1;
        let tail = t.abs().max(u.abs());
        if tail < 1e-40 * (f.abs().max(g.abs()).max(1.0)) || k > 400 {
            break;
        }
    }
    let ai = AI0 * f.to_f64() + AIP0 * g.to_f64();
    // d/dx Ai(-x) = -[Ai(0) F'(w) + Ai'(0) G'(w)] at w = -x.
    let dai_dx = -(AI0 * fp.to_f64() + AIP0 * gp.to_f64());
    (ai, dai_dx)
}

/// Oscillatory asymptotic expansion, DLMF 9.7.9/9.7.10, each sum truncated
/// at its smallest term.
fn ai_neg_asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let phase = zeta - PI / 4.0;
    let (sin_p, cos_p) = phase.sin_cos();

    // u_{k+1}/u_k = (6k+1)(6k+3)(6k+5) / (216 (k+1) (2k+1)),
    // v_k = u_k (6k+1)/(1-6k).
    let max_terms = 80usize;
    let mut u = Vec::with_capacity(max_terms);
    let mut v = Vec::with_capacity(max_terms);
    u.push(1.0f64);
    v.push(1.0f64);
    for k in 0..max_terms - 1 {
        let kf = k as f64;
        let next =
            u[k] * (6.0 * kf + 1.0) * (6.0 * kf + 3.0) * (6.0 * kf + 5.0)
                / (216.0 * (kf + 1.0) * (2.0 * kf + 1.0));
        u.push(next);
        let kf1 = kf + 1.0;
        v.push(next * (6.0 * kf1 + 1.0) / (1.0 - 6.0 * kf1));
    }

    let sum_min_term = |coeffs: &dyn Fn(usize) -> f64, odd: bool| -> f64 {
        let mut acc = 0.0;
        let mut best = f64::INFINITY;
        let mut sign = 1.0;
        for k in 0.. {
            let idx = if odd { 2 * k + 1 } else { 2 * k };
            if idx >= max_terms {
                break;
            }
            let pow = zeta.powi(-(idx as i32));
            let term = coeffs(idx) * pow;
            if term.abs() > best {
                break; // divergence sets in; stop at the smallest term
            }
            best = term.abs();
            acc += sign * term;
            sign = -sign;
        }
        acc
    };

    let p = sum_min_term(&|i| u[i], false);
    let q = sum_min_term(&|i| u[i], true);
    let r = sum_min_term(&|i| v[i], false);
    let s = sum_min_term(&|i| v[i], true);

    let ai = (cos_p * p + sin_p * q) / (PI.sqrt() * x.powf(0.25));
    let aip = x.powf(0.25) / PI.sqrt() * (sin_p * r - cos_p * s);
    (ai, -aip)
}

/// First `count` positive roots a_1 < a_2 < ... of Ai(-z).
///
/// Each root satisfies |Ai(-a_j)| at the 1e-12 level or better.
pub fn airy_neg_roots(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain {
            context: "airy_neg_roots",
            message: "count must be >= 1".into(),
        });
    }
    if count > 50 {
        return Err(Error::Domain {
            context: "airy_neg_roots",
            message: format!("count = {count} exceeds 50"),
        });
    }
    let mut roots = Vec::with_capacity(count);
    for jj in 1..=count {
        let t = 3.0 * PI * (4.0 * jj as f64 - 1.0) / 8.0;
        // Classical expansion of the j-th root in powers of t^{-2}.
        let t2 = t * t;
        let mut x = t.powf(2.0 / 3.0)
            * (1.0 + 5.0 / 48.0 / t2 - 5.0 / 36.0 / (t2 * t2)
                + 77125.0 / 82944.0 / (t2 * t2 * t2)
                - 108056875.0 / 6967296.0 / (t2 * t2 * t2 * t2));
        for _ in 0..40 {
            let (val, deriv) = ai_neg(x);
            let step = val / deriv;
            x -= step;
            if step.abs() <= 1e-15 * x {
                break;
            }
        }
        if let Some(&prev) = roots.last() {
            if x <= prev {
                return Err(Error::Convergence {
                    context: "airy_neg_roots",
                    message: format!("root ordering violated at j = {jj}"),
                });
            }
        }
        roots.push(x);
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection oracle on the Maclaurin series (independent of the Newton
    /// polish used by the implementation).
    fn bisect_root(mut lo: f64, mut hi: f64) -> f64 {
        let f = |x: f64| ai_neg_maclaurin(x).0;
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn first_roots_match_bisection_oracle() {
        let roots = airy_neg_roots(2).unwrap();
        let a1 = bisect_root(2.0, 3.0);
        let a2 = bisect_root(4.0, 4.5);
        assert!((roots[0] - a1).abs() < 1e-12);
        assert!((roots[1] - a2).abs() < 1e-12);
        // Frozen oracle values.
        assert!((roots[0] - 2.338_107_410_459_767).abs() < 1e-12);
        assert!((roots[1] - 4.087_949_444_130_97).abs() < 1e-12);
    }

    #[test]
    fn roots_are_roots_by_series_oracle() {
        // The dd Maclaurin series keeps ~1e-15 absolute accuracy up to
        // x ~ 16 (cancellation e^{(2/3)x^{3/2}} against ~31 digits); that
        // covers the first 12 roots.
        let roots = airy_neg_roots(12).unwrap();
        for &r in &roots {
            let (val, _) = ai_neg_maclaurin(r);
            assert!(val.abs() <= 1e-11, "Ai(-{r}) = {val:e}");
        }
    }

    #[test]
    fn roots_strictly_increasing_up_to_50() {
        let roots = airy_neg_roots(50).unwrap();
        for w in roots.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(roots[0] > 2.3 && roots[0] < 2.4);
    }

    #[test]
    fn maclaurin_and_asymptotic_agree_in_overlap() {
        // The asymptotic truncation error at its smallest term is ~3e-15 at
        // x = 9 and falls fast; the dd series is near machine-exact here.
        for &x in &[9.0, 9.5, 10.0, 11.5, 13.0] {
            let m = ai_neg_maclaurin(x);
            let a = ai_neg_asymptotic(x);
            assert!((m.0 - a.0).abs() < 1e-13, "x={x}: {} vs {}", m.0, a.0);
            assert!((m.1 - a.1).abs() < 1e-12, "x={x} deriv: {} vs {}", m.1, a.1);
        }
    }

    #[test]
    fn count_bounds_enforced() {
        assert!(airy_neg_roots(0).is_err());
        assert!(airy_neg_roots(51).is_err());
    }
}
