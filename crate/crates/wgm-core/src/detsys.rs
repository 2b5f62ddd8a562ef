//! Assembly of the scaled fundamental system and the modal determinant.
//!
//! At a wavenumber k, four spectral solves produce the fundamental pair
//! f11 (inner, regular at 0, Robin at xi) and f22 (outer, Robin at xi, DtN at
//! 1) together with their k-derivatives, each derivative sharing the operator
//! factorization of its base solve. The interface traces assemble the 2x2
//! matrix T(k), the determinant
//!
//! ```text
//! det(k) = i k (n2(xi) + n1(xi)) f11 f22 + h22 f11 + h11 f22   (traces at xi)
//! ```
//!
//! and its analytic k-derivative. The Robin boundary data h11/h22 follow the
//! Bessel-based choice that makes the piecewise-constant fundamental system
//! exactly (J_m, H_m) - the scaling that keeps the Newton iteration pointed
//! into the lower half-plane.

use num_complex::Complex64;

use crate::bvp::{self, FollowUp, LinearBC, OdeProblem};
use crate::chebfun::ChebSeries;
use crate::error::{Error, Result};
use crate::profiles::RadialProfile;
use crate::specfun::{bessel_j_pair, hankel1_pair};

/// Robin boundary data h11, h22 and their k-derivatives.
#[derive(Copy, Clone, Debug)]
pub struct ScalingData {
    pub h11: Complex64,
    pub h22: Complex64,
    pub dh11: Complex64,
    pub dh22: Complex64,
}

/// Which boundary data to impose at the interface.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Scaling {
    /// h11 = k n1 (J' - iJ), h22 = -k n2 (H' + iH): the conditioned choice.
    BoundaryData,
    /// h11 = h22 = 1: the naive choice (used by diagnostics and sweeps).
    Unit,
}

/// DtN Fourier multiplier beta = kappa H_m'(kappa)/H_m(kappa) at kappa =
/// k n2(1), with its k-derivative.
#[derive(Copy, Clone, Debug)]
pub struct DtnMultiplier {
    pub beta: Complex64,
    pub dbeta: Complex64,
}

/// Fundamental system at one wavenumber: solutions, k-derivatives, interface
/// traces and the data that entered the boundary rows.
#[derive(Clone, Debug)]
pub struct FundamentalSystem {
    pub k: Complex64,
    pub f11: ChebSeries,
    pub f22: ChebSeries,
    pub df11: ChebSeries,
    pub df22: ChebSeries,
    /// f11(xi)
    pub f11_xi: Complex64,
    /// f11'(xi), from the Robin identity (exact, no differentiation)
    pub f11p_xi: Complex64,
    /// f22(xi)
    pub f22_xi: Complex64,
    /// f22'(xi), from the Robin identity
    pub f22p_xi: Complex64,
    /// d/dk f11(xi)
    pub df11_xi: Complex64,
    /// d/dk f22(xi)
    pub df22_xi: Complex64,
    pub scaling: ScalingData,
    pub dtn: DtnMultiplier,
    /// n1(xi), n2(xi) cached for the determinant formulas.
    pub n1_xi: f64,
    pub n2_xi: f64,
}

/// det(k), its k-derivative, the T(k) entries and the relative residual.
#[derive(Copy, Clone, Debug)]
pub struct DeterminantEval {
    pub det: Complex64,
    pub ddet: Complex64,
    pub t11: Complex64,
    pub t12: Complex64,
    pub t21: Complex64,
    pub t22: Complex64,
    pub fro_norm: f64,
    pub rel_residual: f64,
}

impl DeterminantEval {
    /// d/dk of the T entries, for the Newton-trace formula.
    pub fn from_parts(
        det: Complex64,
        ddet: Complex64,
        t: [Complex64; 4],
    ) -> DeterminantEval {
        let fro_norm =
            (t[0].norm_sqr() + t[1].norm_sqr() + t[2].norm_sqr() + t[3].norm_sqr()).sqrt();
        DeterminantEval {
            det,
            ddet,
            t11: t[0],
            t12: t[1],
            t21: t[2],
            t22: t[3],
            fro_norm,
            rel_residual: det.norm() / fro_norm,
        }
    }
}

/// Second derivative of a cylinder function eliminated via the Bessel
/// equation: y'' = -y'/z - (1 - m^2/z^2) y.
fn second_from_bessel_eq(m: usize, z: Complex64, y: Complex64, dy: Complex64) -> Complex64 {
    let m2 = (m * m) as f64;
    -dy / z - (1.0 - m2 / (z * z)) * y
}

/// Boundary data of the conditioned scaling for piecewise-constant-like
/// evaluation at the interface: n1, n2 are the index values at xi.
pub fn scaling_data_pwc(m: usize, k: Complex64, xi: f64, n1: f64, n2: f64) -> Result<ScalingData> {
    if k.norm() == 0.0 {
        return Err(Error::Domain {
            context: "scaling_data",
            message: "k = 0".into(),
        });
    }
    let i = Complex64::new(0.0, 1.0);
    let z1 = k * xi * n1;
    let z2 = k * xi * n2;
    let j = bessel_j_pair(m, z1)?;
    let h = hankel1_pair(m, z2)?;

    let h11 = k * n1 * (j.derivative - i * j.value);
    let h22 = -k * n2 * (h.derivative + i * h.value);

    // d/dk of h11 = k n1 [J'(z1) - i J(z1)], z1 = k xi n1, with J'' removed.
    let jpp = second_from_bessel_eq(m, z1, j.value, j.derivative);
    let dh11 = n1 * (j.derivative - i * j.value) + k * n1 * xi * n1 * (jpp - i * j.derivative);
    let hpp = second_from_bessel_eq(m, z2, h.value, h.derivative);
    let dh22 = -n2 * (h.derivative + i * h.value) - k * n2 * xi * n2 * (hpp + i * h.derivative);

    if h11.norm() < 1e-300 {
        return Err(Error::ScalingDegenerate {
            which: "h11",
            magnitude: h11.norm(),
            k: k.to_string(),
        });
    }
    if h22.norm() < 1e-300 {
        return Err(Error::ScalingDegenerate {
            which: "h22",
            magnitude: h22.norm(),
            k: k.to_string(),
        });
    }
    Ok(ScalingData { h11, h22, dh11, dh22 })
}

/// Boundary data of the conditioned scaling for a profile (index values taken
/// at the jump).
pub fn scaling_data(profile: &RadialProfile, m: usize, k: Complex64) -> Result<ScalingData> {
    let t = profile.interface_trace();
    scaling_data_pwc(m, k, profile.xi, t.n0, t.n2_xi)
}

/// DtN multiplier at kappa = k n2(1) and its k-derivative, H'' eliminated via
/// the Bessel equation.
pub fn dtn_multiplier(m: usize, k: Complex64, n2_at_1: f64) -> Result<DtnMultiplier> {
    let kappa = k * n2_at_1;
    let h = hankel1_pair(m, kappa)?;
    if h.value.norm() < 1e-280 {
        return Err(Error::NearHankelZero { magnitude: h.value.norm() });
    }
    let q = h.derivative / h.value;
    let beta = kappa * q;
    let m2 = (m * m) as f64;
    let dbeta = n2_at_1 * (m2 / kappa - kappa - kappa * q * q);
    Ok(DtnMultiplier { beta, dbeta })
}

/// Assembles the fundamental system at k with the conditioned boundary data.
pub fn assemble(
    profile: &RadialProfile,
    m: usize,
    k: Complex64,
    tol: f64,
) -> Result<FundamentalSystem> {
    assemble_with(profile, m, k, tol, Scaling::BoundaryData)
}

/// Assembles with an explicit choice of boundary data.
pub fn assemble_with(
    profile: &RadialProfile,
    m: usize,
    k: Complex64,
    tol: f64,
    scaling: Scaling,
) -> Result<FundamentalSystem> {
    if k.norm() == 0.0 {
        return Err(Error::Domain {
            context: "assemble",
            message: "k = 0".into(),
        });
    }
    let trace = profile.interface_trace();
    let (n1_xi, n2_xi) = (trace.n0, trace.n2_xi);
    let xi = profile.xi;
    let i = Complex64::new(0.0, 1.0);

    let sc = match scaling {
        Scaling::BoundaryData => scaling_data(profile, m, k)?,
        Scaling::Unit => ScalingData {
            h11: Complex64::new(1.0, 0.0),
            h22: Complex64::new(1.0, 0.0),
            dh11: Complex64::new(0.0, 0.0),
            dh22: Complex64::new(0.0, 0.0),
        },
    };
    let dtn = dtn_multiplier(m, k, trace.n2_one)?;

    // Inner pair: f11 and its k-derivative share the operator.
    let inner_problem = OdeProblem {
        interval: (0.0, xi),
        m,
        k,
        segment: profile.inner.clone(),
        rhs: None,
        left: if m % 2 == 1 {
            LinearBC::dirichlet(Complex64::new(0.0, 0.0))
        } else {
            LinearBC::neumann(Complex64::new(0.0, 0.0))
        },
        right: LinearBC {
            a_coef: -i * k * n1_xi,
            b_coef: Complex64::new(1.0, 0.0),
            rhs: sc.h11,
        },
    };
    let inner_n2poly = profile.inner.n_squared_poly();
    let (f11, df11) = bvp::solve_with_followup(&inner_problem, tol, &|f: &ChebSeries| {
        let rhs = forcing_2kn2f(&inner_n2poly, k, f)?;
        Ok(FollowUp {
            rhs: Some(rhs),
            left_rhs: Complex64::new(0.0, 0.0),
            right_rhs: sc.dh11 + i * n1_xi * f.evaluate(xi)?,
        })
    })?;

    // Outer pair: f22 and its k-derivative.
    let outer_problem = OdeProblem {
        interval: (xi, 1.0),
        m,
        k,
        segment: profile.outer.clone(),
        rhs: None,
        left: LinearBC {
            a_coef: -i * k * n2_xi,
            b_coef: Complex64::new(-1.0, 0.0),
            rhs: sc.h22,
        },
        right: LinearBC {
            a_coef: -dtn.beta,
            b_coef: Complex64::new(1.0, 0.0),
            rhs: Complex64::new(0.0, 0.0),
        },
    };
    let outer_n2poly = profile.outer.n_squared_poly();
    let (f22, df22) = bvp::solve_with_followup(&outer_problem, tol, &|f: &ChebSeries| {
        let rhs = forcing_2kn2f(&outer_n2poly, k, f)?;
        Ok(FollowUp {
            rhs: Some(rhs),
            left_rhs: sc.dh22 + i * n2_xi * f.evaluate(xi)?,
            right_rhs: dtn.dbeta * f.evaluate(1.0)?,
        })
    })?;

    let f11_xi = f11.evaluate(xi)?;
    let f22_xi = f22.evaluate(xi)?;
    Ok(FundamentalSystem {
        k,
        f11_xi,
        f22_xi,
        // Robin identities, exact by construction of the boundary rows.
        f11p_xi: i * k * n1_xi * f11_xi + sc.h11,
        f22p_xi: -i * k * n2_xi * f22_xi - sc.h22,
        df11_xi: df11.evaluate(xi)?,
        df22_xi: df22.evaluate(xi)?,
        f11,
        f22,
        df11,
        df22,
        scaling: sc,
        dtn,
        n1_xi,
        n2_xi,
    })
}

/// Forcing 2 k n(r)^2 f(r) of the derivative problems, fitted as a series on
/// the grid of f (n^2 is polynomial, so a modest degree bump is exact).
fn forcing_2kn2f(n2poly: &[f64], k: Complex64, f: &ChebSeries) -> Result<ChebSeries> {
    let deg = (f.coeffs.len() - 1) + n2poly.len() + 2;
    let fit = ChebSeries::fit(f.a, f.b, deg, |r| {
        let mut n2 = 0.0;
        for &c in n2poly.iter().rev() {
            n2 = n2 * r + c;
        }
        2.0 * k * n2 * f.evaluate(r).expect("fit node inside the solution interval")
    });
    Ok(fit)
}

impl FundamentalSystem {
    /// Modal determinant, analytic k-derivative, T entries and residual.
    pub fn determinant(&self) -> DeterminantEval {
        let i = Complex64::new(0.0, 1.0);
        let n_sum = self.n2_xi + self.n1_xi;
        let det = i * self.k * n_sum * self.f11_xi * self.f22_xi
            + self.scaling.h22 * self.f11_xi
            + self.scaling.h11 * self.f22_xi;
        let ddet = i * n_sum
            * (self.f11_xi * self.f22_xi
                + self.k * self.df11_xi * self.f22_xi
                + self.k * self.f11_xi * self.df22_xi)
            + self.scaling.h22 * self.df11_xi
            + self.scaling.dh22 * self.f11_xi
            + self.scaling.h11 * self.df22_xi
            + self.scaling.dh11 * self.f22_xi;
        DeterminantEval::from_parts(
            det,
            ddet,
            [self.f11_xi, -self.f22_xi, self.f11p_xi, -self.f22p_xi],
        )
    }

    /// d/dk of the T(k) entries (for the Newton-trace formula).
    pub fn dt_entries(&self) -> [Complex64; 4] {
        let i = Complex64::new(0.0, 1.0);
        // d/dk f11'(xi) from the Robin identity.
        let df11p = i * self.n1_xi * self.f11_xi
            + i * self.k * self.n1_xi * self.df11_xi
            + self.scaling.dh11;
        let df22p = -i * self.n2_xi * self.f22_xi
            - i * self.k * self.n2_xi * self.df22_xi
            - self.scaling.dh22;
        [self.df11_xi, -self.df22_xi, df11p, -df22p]
    }
}

/// Convenience: assemble and evaluate in one call.
pub fn determinant(
    profile: &RadialProfile,
    m: usize,
    k: Complex64,
    tol: f64,
) -> Result<DeterminantEval> {
    Ok(assemble(profile, m, k, tol)?.determinant())
}

/// Reciprocals of the boundary data: c1 = 1/h11, c2 = 1/h22 relate the
/// unit-data determinant to the conditioned one, det_unit = c1 c2 det.
pub fn scaling_reciprocals(sc: &ScalingData) -> (Complex64, Complex64) {
    (1.0 / sc.h11, 1.0 / sc.h22)
}
