//! Complex Newton iteration on the modal determinant.
//!
//! k_{l+1} = k_l - det(k_l)/ddet(k_l), stopping when the relative residual
//! |det| / ||T||_F drops below eps (the contrast-robust criterion; a plain
//! |det| threshold fails in high-contrast media where det is huge next to T)
//! or the iteration cap is reached. The determinant evaluator is pluggable so
//! the spectral pipeline and the closed-form oracles run through the same
//! iteration.

use num_complex::Complex64;

use crate::detsys::DeterminantEval;
use crate::error::{Error, Result};
use crate::profiles::RadialProfile;

/// Evaluator contract k -> (det, ddet, T).
pub trait DetProvider {
    fn eval(&self, k: Complex64) -> Result<DeterminantEval>;
}

impl<F> DetProvider for F
where
    F: Fn(Complex64) -> Result<DeterminantEval>,
{
    fn eval(&self, k: Complex64) -> Result<DeterminantEval> {
        self(k)
    }
}

/// Stopping quantity compared against eps.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum StopRule {
    /// |det| / ||T||_F <= eps: the contrast-robust production criterion.
    #[default]
    RelativeResidual,
    /// |det| <= eps: the plain criterion of the validation tables (those
    /// iterate on D(k) = det(k)/k from small real starts, where the relative
    /// residual is already tiny far from any root).
    AbsoluteDet,
}

#[derive(Copy, Clone, Debug)]
pub struct NewtonConfig {
    /// Stopping threshold.
    pub eps: f64,
    /// Iteration cap.
    pub l_max: usize,
    /// Tolerance handed to the spectral solver.
    pub bvp_tol: f64,
    /// Which residual eps applies to.
    pub stop: StopRule,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            eps: 1e-8,
            l_max: 2000,
            bvp_tol: 1e-12,
            stop: StopRule::RelativeResidual,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-12..=1e-4).contains(&self.eps) {
            return Err(Error::Domain {
                context: "NewtonConfig",
                message: format!("eps = {:e} outside [1e-12, 1e-4]", self.eps),
            });
        }
        if self.l_max == 0 {
            return Err(Error::Domain {
                context: "NewtonConfig",
                message: "l_max must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// One recorded iterate.
#[derive(Copy, Clone, Debug)]
pub struct IterateRecord {
    pub k: Complex64,
    pub abs_det: f64,
    pub abs_ddet: f64,
    pub rel_residual: f64,
}

/// Full history of a Newton run.
#[derive(Clone, Debug)]
pub struct NewtonResult {
    /// Final iterate.
    pub k: Complex64,
    /// Every evaluated iterate, k_0 first.
    pub iterations: Vec<IterateRecord>,
    pub converged: bool,
    /// Number of Newton steps taken when the iteration stopped.
    pub l: usize,
}

impl NewtonResult {
    pub fn last(&self) -> &IterateRecord {
        self.iterations.last().expect("nonempty history")
    }
}

/// Starting value m / (xi n1(xi)) from the leading term of the asymptotics.
pub fn starting_value(profile: &RadialProfile, m: usize) -> f64 {
    let n0 = profile.interface_trace().n0;
    m as f64 / (profile.xi * n0)
}

/// Newton iteration from k0. Provider errors are propagated with the iterate
/// index attached.
pub fn solve(provider: &dyn DetProvider, k0: Complex64, cfg: &NewtonConfig) -> Result<NewtonResult> {
    cfg.validate()?;
    let mut k = k0;
    let mut history = Vec::new();
    for l in 0..=cfg.l_max {
        let d = provider.eval(k).map_err(|e| Error::AtIterate {
            iterate: l,
            source: Box::new(e),
        })?;
        history.push(IterateRecord {
            k,
            abs_det: d.det.norm(),
            abs_ddet: d.ddet.norm(),
            rel_residual: d.rel_residual,
        });
        let stop_value = match cfg.stop {
            StopRule::RelativeResidual => d.rel_residual,
            StopRule::AbsoluteDet => d.det.norm(),
        };
        if stop_value <= cfg.eps {
            return Ok(NewtonResult { k, iterations: history, converged: true, l });
        }
        if l == cfg.l_max {
            break;
        }
        if d.ddet.norm() < 1e-300 {
            return Err(Error::DerivativeVanished { iterate: l });
        }
        k -= d.det / d.ddet;
    }
    Ok(NewtonResult {
        k,
        iterations: history,
        converged: false,
        l: cfg.l_max,
    })
}

/// Newton-trace step 1/trace(T^{-1} dT); equals det/ddet when ddet is the
/// derivative of det(T).
pub fn trace_step(d: &DeterminantEval, dt: [Complex64; 4]) -> Result<Complex64> {
    let det_t = d.t11 * d.t22 - d.t12 * d.t21;
    if det_t.norm() < 1e-300 * d.fro_norm * d.fro_norm {
        return Err(Error::SingularT { det_magnitude: det_t.norm() });
    }
    // trace(T^{-1} dT) = (t22 d11 - t12 d21 - t21 d12 + t11 d22)/det(T)
    let tr = (d.t22 * dt[0] - d.t12 * dt[2] - d.t21 * dt[1] + d.t11 * dt[3]) / det_t;
    Ok(1.0 / tr)
}
