//! Closed-form asymptotic quasi-resonances for large azimuthal order.
//!
//! The regime is selected by the effective adimensional curvature at the jump,
//! kappa = xi (1/xi + n'/n) evaluated from inside:
//!
//! * kappa > 0: Airy-root expansion through the (2 kappa / m)^{5/3} term;
//! * kappa = 0 with positive adimensional Hessian mu: half-integer powers,
//!   k = (m/(xi n0)) [1 + (4j+3)/2 sqrt(mu)/m];
//! * kappa < 0: the cavity has an interior critical radius xi0 where
//!   (r n(r))' = 0 and k = (m/(xi0 n(xi0))) [1 + (2j+1)/2 sqrt(mu0)/m].
//!
//! The expansions require a unit outer index; profiles with variable n2 get
//! the NotApplicable regime and callers fall back to the plain starting
//! value.

use crate::error::{Error, Result};
use crate::profiles::{DerivOrder, RadialProfile};
use crate::specfun::airy_neg_roots;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Regime {
    A,
    B,
    C,
    /// No expansion available (outer index not identically 1).
    NotApplicable,
}

/// Interface invariants of a profile and the regime they select.
#[derive(Copy, Clone, Debug)]
pub struct AsymptoticInvariants {
    pub n0: f64,
    /// Effective adimensional curvature.
    pub kappa_check: f64,
    /// Adimensional Hessian.
    pub mu_check: f64,
    pub regime: Regime,
}

/// Interior critical radius and the Hessian there (regime C).
#[derive(Copy, Clone, Debug)]
pub struct InnerCriticalPoint {
    pub xi0: f64,
    pub mu0_check: f64,
}

const KAPPA_ZERO_TOL: f64 = 1e-12;

pub fn invariants(profile: &RadialProfile) -> AsymptoticInvariants {
    let t = profile.interface_trace();
    let xi = profile.xi;
    let kappa_check = xi * (1.0 / xi + t.n_i / t.n0);
    let mu_check = xi * xi * (2.0 / (xi * xi) - t.n_ii / t.n0);
    let regime = if !profile.outer_is_unit() {
        Regime::NotApplicable
    } else if kappa_check > KAPPA_ZERO_TOL {
        Regime::A
    } else if kappa_check < -KAPPA_ZERO_TOL {
        Regime::C
    } else if mu_check > 0.0 {
        Regime::B
    } else {
        Regime::NotApplicable
    };
    AsymptoticInvariants { n0: t.n0, kappa_check, mu_check, regime }
}

/// Root of 1 + r n'(r)/n(r) on (0, xi) with the Hessian check of regime C.
pub fn inner_critical_point(profile: &RadialProfile) -> Result<InnerCriticalPoint> {
    let seg = &profile.inner;
    // g(r) = n(r) + r n'(r) = (r n(r))'.
    let g = |r: f64| seg.eval(r, DerivOrder::Value) + r * seg.eval(r, DerivOrder::First);
    let dg = |r: f64| 2.0 * seg.eval(r, DerivOrder::First) + r * seg.eval(r, DerivOrder::Second);

    const CELLS: usize = 2000;
    let xi = profile.xi;
    let mut bracket = None;
    for i in 0..CELLS {
        let a = xi * i as f64 / CELLS as f64;
        let b = xi * (i + 1) as f64 / CELLS as f64;
        if g(a) * g(b) <= 0.0 && g(a) != g(b) {
            bracket = Some((a, b));
            break;
        }
    }
    let (mut a, mut b) = bracket.ok_or(Error::NoCriticalPoint)?;
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if g(a) * g(mid) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let mut xi0 = 0.5 * (a + b);
    for _ in 0..8 {
        let step = g(xi0) / dg(xi0);
        if !step.is_finite() {
            break;
        }
        xi0 -= step;
        if step.abs() < 1e-16 * xi0 {
            break;
        }
    }

    let n_xi0 = seg.eval(xi0, DerivOrder::Value);
    let mu0_check = xi0 * xi0 * (2.0 / (xi0 * xi0) - seg.eval(xi0, DerivOrder::Second) / n_xi0);
    if mu0_check <= 0.0 {
        return Err(Error::HessianNotPositive(mu0_check));
    }
    Ok(InnerCriticalPoint { xi0, mu0_check })
}

/// Quasi-resonance of azimuthal order m and radial number j (j = 0 is the
/// whispering-gallery branch).
pub fn quasi_resonance(profile: &RadialProfile, m: usize, j: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            context: "quasi_resonance",
            message: "m must be >= 1".into(),
        });
    }
    let inv = invariants(profile);
    let xi = profile.xi;
    let mf = m as f64;
    match inv.regime {
        Regime::A => {
            let a_j = *airy_neg_roots(j + 1)?.last().expect("nonempty");
            let n0 = inv.n0;
            let kappa = inv.kappa_check;
            let mu = inv.mu_check;
            let s = 2.0 * kappa / mf;
            let root_n = (n0 * n0 - 1.0).sqrt();
            if !(n0 > 1.0) {
                return Err(Error::RegimeUnsupported(format!(
                    "regime A needs n0 > 1, got {n0}"
                )));
            }
            let bracket = mf / (xi * n0)
                * (1.0 + 0.5 * a_j * s.powf(2.0 / 3.0) - n0 / (2.0 * root_n) * s
                    + a_j * a_j / 15.0
                        * (17.0 / 8.0 - 3.0 / kappa + mu / (kappa * kappa))
                        * s.powf(4.0 / 3.0)
                    - a_j * n0 / (12.0 * root_n)
                        * (n0 * n0 / (n0 * n0 - 1.0) + 2.0 - 6.0 / kappa
                            + 2.0 * mu / (kappa * kappa))
                        * s.powf(5.0 / 3.0));
            Ok(bracket)
        }
        Regime::B => {
            if inv.mu_check <= 0.0 {
                return Err(Error::RegimeUnsupported("regime B needs mu > 0".into()));
            }
            Ok(mf / (xi * inv.n0)
                * (1.0 + (4.0 * j as f64 + 3.0) / 2.0 * inv.mu_check.sqrt() / mf))
        }
        Regime::C => {
            let cp = inner_critical_point(profile)?;
            let n_xi0 = profile.inner.eval(cp.xi0, DerivOrder::Value);
            Ok(mf / (cp.xi0 * n_xi0)
                * (1.0 + (2.0 * j as f64 + 1.0) / 2.0 * cp.mu0_check.sqrt() / mf))
        }
        Regime::NotApplicable => Err(Error::RegimeUnsupported(
            "no expansion for variable outer index".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::catalog;

    #[test]
    fn constant_profile_invariants() {
        let inv = invariants(&catalog("constant-1.5").unwrap());
        assert_eq!(inv.regime, Regime::A);
        assert!((inv.n0 - 1.5).abs() < 1e-15);
        assert!((inv.kappa_check - 1.0).abs() < 1e-15);
        assert!((inv.mu_check - 2.0).abs() < 1e-15);
    }

    #[test]
    fn affine4_is_regime_b() {
        // n1 = 3(1 - r): kappa = 0, mu = 2.
        let inv = invariants(&catalog("affine-4").unwrap());
        assert_eq!(inv.regime, Regime::B);
        assert!(inv.kappa_check.abs() < 1e-14);
        assert!((inv.mu_check - 2.0).abs() < 1e-14);
    }

    #[test]
    fn affine5_is_regime_c() {
        let inv = invariants(&catalog("affine-5").unwrap());
        assert_eq!(inv.regime, Regime::C);
        assert!(inv.kappa_check < 0.0);
    }

    #[test]
    fn regime_dispatch_matches_setup_table() {
        for (name, want) in [
            ("constant-1.5", Regime::A),
            ("constant-5", Regime::A),
            ("affine-1", Regime::A),
            ("affine-2", Regime::A),
            ("affine-3", Regime::A),
            ("affine-4", Regime::B),
            ("affine-5", Regime::C),
            ("parabolic-1", Regime::B),
            ("parabolic-2", Regime::A),
            ("parabolic-3", Regime::A),
            ("luneburg", Regime::A),
            ("luneburg-n2-affine", Regime::NotApplicable),
            ("luneburg-n2-cubic", Regime::NotApplicable),
        ] {
            assert_eq!(invariants(&catalog(name).unwrap()).regime, want, "{name}");
        }
    }

    #[test]
    fn critical_point_of_affine5() {
        let cp = inner_critical_point(&catalog("affine-5").unwrap()).unwrap();
        assert!((cp.xi0 - 25.0 / 56.0).abs() < 1e-12);
        assert!((cp.mu0_check - 2.0).abs() < 1e-12);
        let n = catalog("affine-5")
            .unwrap()
            .inner
            .eval(cp.xi0, DerivOrder::Value);
        assert!((n - 1.25).abs() < 1e-12);
    }

    #[test]
    fn constant_profile_has_no_critical_point() {
        assert!(matches!(
            inner_critical_point(&catalog("constant-1.5").unwrap()),
            Err(Error::NoCriticalPoint)
        ));
    }

    #[test]
    fn quasi_resonance_matches_tables() {
        // k_asympt columns of the result tables, frozen.
        let p = catalog("constant-1.5").unwrap();
        let k = quasi_resonance(&p, 10, 0).unwrap();
        assert!((k - 17.085_561_463_191_144).abs() < 1e-9, "got {k}");

        let p = catalog("affine-4").unwrap();
        let k = quasi_resonance(&p, 10, 0).unwrap();
        assert!((k - 16.161_760_458_079_524).abs() < 1e-9, "got {k}");

        let p = catalog("affine-5").unwrap();
        let k = quasi_resonance(&p, 1, 0).unwrap();
        assert!((k - 3.059_135_351_886_293).abs() < 1e-9, "got {k}");
    }

    #[test]
    fn more_table_values_regime_a() {
        let p = catalog("constant-1.5").unwrap();
        for (m, want) in [
            (1usize, 1.404_547_952_561_922),
            (30, 46.136_535_019_139_51),
            (60, 88.119_781_401_642_16),
        ] {
            let k = quasi_resonance(&p, m, 0).unwrap();
            assert!((k - want).abs() < 1e-9, "m={m}: got {k} want {want}");
        }
        let p = catalog("luneburg").unwrap();
        let k = quasi_resonance(&p, 10, 0).unwrap();
        assert!((k - 18.649_822_497_140_867).abs() < 1e-9, "got {k}");
    }

    #[test]
    fn normalized_limit_for_large_m() {
        let p = catalog("constant-1.5").unwrap();
        let t = p.interface_trace();
        let dev = |m: usize| {
            let k = quasi_resonance(&p, m, 0).unwrap();
            (k * p.xi * t.n0 / m as f64 - 1.0).abs()
        };
        let d3 = dev(1000);
        let d6 = dev(1_000_000);
        // Leading correction is (2 kappa/m)^{2/3}: three decades in m shrink
        // the deviation by 10^2.
        assert!(d6 < d3 * 1e-1_f64.powi(2) * 1.5);
        assert!(d6 < 1e-3);
    }

    #[test]
    fn variable_n2_flagged_not_applicable() {
        let p = catalog("luneburg-n2-cubic").unwrap();
        assert!(matches!(
            quasi_resonance(&p, 10, 0),
            Err(Error::RegimeUnsupported(_))
        ));
    }
}
