//! Property tests for the series carrier and the evaluation kernels.

use num_complex::Complex64;
use proptest::prelude::*;
use wgm_core::chebfun::ChebSeries;
use wgm_core::profiles::{catalog, DerivOrder, Side, CATALOG_NAMES};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    /// Evaluation at Chebyshev points of a series fit from those values
    /// round-trips to 1e-13.
    #[test]
    fn fit_evaluate_roundtrip(
        a in -2.0f64..1.0,
        width in 0.3f64..3.0,
        freq in 0.2f64..6.0,
        phase in 0.0f64..6.28,
    ) {
        let b = a + width;
        let f = |r: f64| c((freq * r + phase).sin(), (0.7 * freq * r).cos());
        let n = 48;
        let s = ChebSeries::fit(a, b, n, f);
        for &r in &wgm_core::chebfun::lobatto_points(a, b, n) {
            let scale = f(r).norm().max(1.0);
            prop_assert!((s.evaluate(r).unwrap() - f(r)).norm() <= 1e-13 * scale);
        }
    }

    /// evaluate(differentiate(s)) agrees with centered finite differences.
    #[test]
    fn derivative_matches_fd(
        freq in 0.5f64..5.0,
        at in 0.15f64..0.85,
    ) {
        let s = ChebSeries::fit(0.0, 1.0, 40, |r| c((freq * r).sin(), (freq * r * 0.5).cos()));
        let d = s.differentiate();
        let h = 1e-6;
        let fd = (s.evaluate(at + h).unwrap() - s.evaluate(at - h).unwrap()) / (2.0 * h);
        let an = d.evaluate(at).unwrap();
        prop_assert!((fd - an).norm() <= 1e-6 * an.norm().max(1.0));
    }

    /// tail_ratio is scale-invariant and bounded by 1.
    #[test]
    fn tail_ratio_contract(
        coeffs in prop::collection::vec(-1.0f64..1.0, 4..40),
        scale in prop::num::f64::NORMAL.prop_filter("nonzero", |s| s.abs() > 1e-100 && s.abs() < 1e100),
    ) {
        let base: Vec<Complex64> = coeffs.iter().map(|&x| c(x, -0.3 * x)).collect();
        let scaled: Vec<Complex64> = base.iter().map(|&x| x * scale).collect();
        let s1 = ChebSeries::new(0.0, 1.0, base).unwrap();
        let s2 = ChebSeries::new(0.0, 1.0, scaled).unwrap();
        prop_assert!(s1.tail_ratio() <= 1.0 + 1e-15);
        prop_assert!((s1.tail_ratio() - s2.tail_ratio()).abs() <= 1e-12 * s1.tail_ratio().max(1e-300));
    }
}

/// Catalog profiles: derivatives consistent with finite differences and
/// positivity on a dense grid.
#[test]
fn catalog_profiles_are_consistent() {
    for name in CATALOG_NAMES {
        let p = catalog(name).unwrap();
        for side in [Side::Inner, Side::Outer] {
            let (lo, hi) = match side {
                Side::Inner => (0.0, p.xi),
                Side::Outer => (p.xi, 1.0),
            };
            let h = 1e-6;
            for i in 1..20 {
                let r = lo + (hi - lo) * i as f64 / 20.0;
                let v = p.eval_n(side, r, DerivOrder::Value).unwrap();
                assert!(v > 0.0);
                let d1 = p.eval_n(side, r, DerivOrder::First).unwrap();
                let fd = (p.segment(side).eval(r + h, DerivOrder::Value)
                    - p.segment(side).eval(r - h, DerivOrder::Value))
                    / (2.0 * h);
                assert!((d1 - fd).abs() <= 1e-8 * d1.abs().max(1.0), "{name}");
            }
        }
    }
}

/// Interface traces of the closed-form cases quoted in the setup table.
#[test]
fn interface_traces_match_setup_rows() {
    let t = catalog("affine-5").unwrap().interface_trace();
    assert!((t.n0 - 1.1).abs() < 1e-14 && (t.n_i + 2.8).abs() < 1e-14);
    let t = catalog("luneburg").unwrap().interface_trace();
    assert!((t.n0 - 1.75f64.sqrt()).abs() < 1e-14);
    assert!((t.n_i + 0.5 / 1.75f64.sqrt()).abs() < 1e-14);
}
