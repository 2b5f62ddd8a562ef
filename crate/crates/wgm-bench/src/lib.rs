//! Shared fixtures for the solver benchmarks.

use num_complex::Complex64;
use wgm_core::detsys;
use wgm_core::newton::{self, DetProvider, NewtonConfig};
use wgm_core::profiles::{catalog, RadialProfile};
use wgm_core::{DeterminantEval, Result};

pub struct NumericDet {
    pub profile: RadialProfile,
    pub m: usize,
    pub tol: f64,
}

impl DetProvider for NumericDet {
    fn eval(&self, k: Complex64) -> Result<DeterminantEval> {
        Ok(detsys::assemble(&self.profile, self.m, k, self.tol)?.determinant())
    }
}

/// One full Newton run from the standard start.
pub fn newton_run(name: &str, m: usize) -> Complex64 {
    let profile = catalog(name).expect("catalog name");
    let provider = NumericDet { profile: profile.clone(), m, tol: 1e-12 };
    let k0 = Complex64::new(newton::starting_value(&profile, m), 0.0);
    let cfg = NewtonConfig::default();
    newton::solve(&provider, k0, &cfg).expect("newton").k
}
