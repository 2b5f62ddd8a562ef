//! Closed-form determinants for the two analytically solvable cases, used to
//! validate the spectral pipeline end to end.
//!
//! Piecewise constant: D(k) = det(k)/k = -[J_m(k n1 xi) n2 H_m'(k n2 xi)
//! - n1 J_m'(k n1 xi) H_m(k n2 xi)]. Luneburg (n1 = sqrt(2 - r^2), n2 = 1):
//! the inner Bessel solution is replaced by f1(r) = M_{k/2,m/2}(k r^2)/r.
//! Both evaluators plug into the same Newton iteration as the numeric
//! pipeline through [`DetProvider`].

use num_complex::Complex64;

use crate::detsys::DeterminantEval;
use crate::error::{Error, Result};
use crate::newton::DetProvider;
use crate::specfun::{bessel_j_pair, hankel1_pair, whittaker_m_pair, FunPair};

/// A closed-form determinant value and its k-derivative.
#[derive(Copy, Clone, Debug)]
pub struct OracleDeterminant {
    pub value: Complex64,
    pub derivative: Complex64,
}

fn second_from_bessel_eq(m: usize, z: Complex64, f: &FunPair) -> Complex64 {
    let m2 = (m * m) as f64;
    -f.derivative / z - (1.0 - m2 / (z * z)) * f.value
}

/// D(k) = det(k)/k of the piecewise constant case, derivative in k with the
/// second derivatives eliminated through the Bessel equation.
pub fn det_pw_constant(
    m: usize,
    k: Complex64,
    xi: f64,
    n1: f64,
    n2: f64,
) -> Result<OracleDeterminant> {
    if k.norm() == 0.0 {
        return Err(Error::Domain {
            context: "det_pw_constant",
            message: "k = 0".into(),
        });
    }
    let z1 = k * xi * n1;
    let z2 = k * xi * n2;
    let j = bessel_j_pair(m, z1)?;
    let h = hankel1_pair(m, z2)?;
    let value = -(j.value * n2 * h.derivative - n1 * j.derivative * h.value);

    let jpp = second_from_bessel_eq(m, z1, &j);
    let hpp = second_from_bessel_eq(m, z2, &h);
    // d/dk with z1' = xi n1, z2' = xi n2.
    let derivative = -(xi * n1 * j.derivative * n2 * h.derivative
        + j.value * n2 * xi * n2 * hpp
        - n1 * xi * n1 * jpp * h.value
        - n1 * j.derivative * xi * n2 * h.derivative);
    Ok(OracleDeterminant { value, derivative })
}

/// Normalized determinant D~_N(K) = N J_m'(NK) H_m(K) - J_m(NK) H_m'(K);
/// its zeros map to the piecewise-constant ones through k0 = K0/(n2 xi).
pub fn dtilde(m: usize, n_ratio: f64, big_k: Complex64) -> Result<Complex64> {
    if big_k.norm() == 0.0 {
        return Err(Error::Domain {
            context: "dtilde",
            message: "K = 0".into(),
        });
    }
    let j = bessel_j_pair(m, n_ratio * big_k)?;
    let h = hankel1_pair(m, big_k)?;
    Ok(n_ratio * j.derivative * h.value - j.value * h.derivative)
}

/// d/dz of [`dtilde`], second derivatives eliminated via the Bessel equation.
pub fn dtilde_deriv(m: usize, n_ratio: f64, z: Complex64) -> Result<Complex64> {
    let j = bessel_j_pair(m, n_ratio * z)?;
    let h = hankel1_pair(m, z)?;
    let jpp = second_from_bessel_eq(m, n_ratio * z, &j);
    let hpp = second_from_bessel_eq(m, z, &h);
    // The mixed N J' H' terms cancel.
    Ok(n_ratio * n_ratio * jpp * h.value - j.value * hpp)
}

/// Whittaker-based inner fundamental solution of the Luneburg lens,
/// f1(r) = M_{k/2, m/2}(k r^2)/r, with its r-derivative.
fn luneburg_inner(m: usize, k: Complex64, r: f64) -> Result<FunPair> {
    let w = whittaker_m_pair(0.5 * k, 0.5 * m as f64, k * r * r)?;
    let value = w.value / r;
    let derivative = 2.0 * k * w.derivative - w.value / (r * r);
    Ok(FunPair::new(value, derivative))
}

/// Traces of the Luneburg fundamental system at the interface, normalized so
/// the inner solution satisfies the same Robin data as the spectral pipeline
/// (the exact and numeric determinants are then the same function of k).
fn luneburg_traces(m: usize, k: Complex64, xi: f64) -> Result<[Complex64; 4]> {
    let i = Complex64::new(0.0, 1.0);
    let n1_xi = (2.0 - xi * xi).sqrt();
    let f1 = luneburg_inner(m, k, xi)?;

    let z1 = k * xi * n1_xi;
    let j = bessel_j_pair(m, z1)?;
    let h11 = k * n1_xi * (j.derivative - i * j.value);
    let robin = f1.derivative - i * k * n1_xi * f1.value;
    if robin.norm() < 1e-290 {
        return Err(Error::ScalingDegenerate {
            which: "luneburg inner Robin trace",
            magnitude: robin.norm(),
            k: k.to_string(),
        });
    }
    let c1 = h11 / robin;

    let h = hankel1_pair(m, k * xi)?;
    Ok([c1 * f1.value, c1 * f1.derivative, h.value, k * h.derivative])
}

/// D(k) = det(k)/k of the Luneburg lens (n2 = 1). The k-derivative is taken
/// by central differences with step 1e-6 max(1, |k|); accurate to ~1e-8,
/// enough for the quadratic phase of Newton down to eps = 1e-8.
pub fn det_luneburg(m: usize, k: Complex64, xi: f64) -> Result<OracleDeterminant> {
    let value = det_luneburg_value(m, k, xi)?;
    let step = 1e-6 * k.norm().max(1.0);
    let plus = det_luneburg_value(m, k + step, xi)?;
    let minus = det_luneburg_value(m, k - step, xi)?;
    Ok(OracleDeterminant { value, derivative: (plus - minus) / (2.0 * step) })
}

fn det_luneburg_value(m: usize, k: Complex64, xi: f64) -> Result<Complex64> {
    let [f11, f11p, h, khp] = luneburg_traces(m, k, xi)?;
    // det = -[f11 f22' - f11' f22] with f22 = H_m(k r); divide by k.
    Ok(-(f11 * khp - f11p * h) / k)
}

/// Determinant provider iterating on D(k) = det(k)/k for the piecewise
/// constant case. T carries the (J, H) fundamental traces; its Frobenius norm
/// is divided by |k| so the relative residual matches det/k.
#[derive(Copy, Clone, Debug)]
pub struct PwConstantProvider {
    pub m: usize,
    pub xi: f64,
    pub n1: f64,
    pub n2: f64,
}

impl DetProvider for PwConstantProvider {
    fn eval(&self, k: Complex64) -> Result<DeterminantEval> {
        let d = det_pw_constant(self.m, k, self.xi, self.n1, self.n2)?;
        let z1 = k * self.xi * self.n1;
        let z2 = k * self.xi * self.n2;
        let j = bessel_j_pair(self.m, z1)?;
        let h = hankel1_pair(self.m, z2)?;
        let inv_k = 1.0 / k.norm();
        let t = [
            j.value * inv_k,
            -h.value * inv_k,
            k * self.n1 * j.derivative * inv_k,
            -k * self.n2 * h.derivative * inv_k,
        ];
        Ok(DeterminantEval::from_parts(d.value, d.derivative, t))
    }
}

/// Determinant provider iterating on D(k) = det(k)/k for the Luneburg lens.
#[derive(Copy, Clone, Debug)]
pub struct LuneburgProvider {
    pub m: usize,
    pub xi: f64,
}

impl DetProvider for LuneburgProvider {
    fn eval(&self, k: Complex64) -> Result<DeterminantEval> {
        let d = det_luneburg(self.m, k, self.xi)?;
        let [f11, f11p, h, khp] = luneburg_traces(self.m, k, self.xi)?;
        let inv_k = 1.0 / k.norm();
        let t = [f11 * inv_k, -h * inv_k, f11p * inv_k, -khp * inv_k];
        Ok(DeterminantEval::from_parts(d.value, d.derivative, t))
    }
}

/// Wraps a det(k) provider into a D(k) = det(k)/k provider (the validation
/// tables iterate on D rather than det). T is rescaled by 1/|k| to keep the
/// relative residual aligned.
pub struct ScaledByK<P: DetProvider>(pub P);

impl<P: DetProvider> DetProvider for ScaledByK<P> {
    fn eval(&self, k: Complex64) -> Result<DeterminantEval> {
        let d = self.0.eval(k)?;
        let inv_k = 1.0 / k.norm();
        let t = [d.t11 * inv_k, d.t12 * inv_k, d.t21 * inv_k, d.t22 * inv_k];
        Ok(DeterminantEval::from_parts(
            d.det / k,
            d.ddet / k - d.det / (k * k),
            t,
        ))
    }
}
