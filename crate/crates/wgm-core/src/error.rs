//! Error type shared by all solver stages.

use thiserror::Error;

/// Everything that can go wrong between a profile definition and a converged
/// resonance.
#[derive(Error, Debug, Clone)]
pub enum Error {
    /// Argument outside the documented working region of a special function
    /// or of an evaluation interval.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// A series or quadrature failed its tail criterion within the term budget.
    #[error("no convergence in {context}: {message}")]
    Convergence { context: &'static str, message: String },

    /// The collocation matrix is numerically singular; the wavenumber sits at
    /// a critical frequency of the auxiliary boundary value problem.
    #[error("singular collocation system (near a critical frequency of the auxiliary problem): {0}")]
    SingularSystem(String),

    /// Degree budget exhausted before the coefficient tail criterion was met.
    #[error("spectral solve did not converge: {0}")]
    NoConvergence(String),

    /// The Robin boundary data h11/h22 vanished at this wavenumber.
    #[error("degenerate scaling data: |{which}| = {magnitude:e} at k = {k}")]
    ScalingDegenerate { which: &'static str, magnitude: f64, k: String },

    /// k n2(1) fell on (or numerically under) a zero of the Hankel function.
    #[error("|H_m(k n2(1))| = {magnitude:e} is below threshold; DtN multiplier undefined")]
    NearHankelZero { magnitude: f64 },

    /// Unknown catalog profile name.
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),

    /// Newton step undefined because the determinant derivative vanished.
    #[error("determinant derivative vanished at iterate {iterate}")]
    DerivativeVanished { iterate: usize },

    /// T(k) is numerically singular, the Newton-trace step is undefined.
    #[error("T(k) singular: |det T| = {det_magnitude:e}")]
    SingularT { det_magnitude: f64 },

    /// Scattering solve requested at (numerically) an exact real resonance.
    #[error("T(k) nearly singular at real k (relative residual {rel_residual:e}); scattering solve refused")]
    NearSingular { rel_residual: f64 },

    /// The requested interface trace is too small to normalize a mode by.
    #[error("normalization trace magnitude {magnitude:e} below threshold; use the other normalization")]
    NormalizationDegenerate { magnitude: f64 },

    /// 1 + r n'(r)/n(r) has no sign change on (0, xi).
    #[error("no inner critical point: 1 + r n'/n has no sign change on (0, xi)")]
    NoCriticalPoint,

    /// The adimensional Hessian at the inner critical point is not positive.
    #[error("adimensional Hessian at the inner critical point is not positive: {0}")]
    HessianNotPositive(f64),

    /// No asymptotic expansion applies to this profile/regime.
    #[error("asymptotic regime unsupported: {0}")]
    RegimeUnsupported(String),

    /// Invalid profile data (non-positive index, bad jump point, ...).
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// Error raised by a determinant provider during a Newton iteration,
    /// tagged with the iterate index at which it occurred.
    #[error("provider failed at iterate {iterate}: {source}")]
    AtIterate {
        iterate: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
