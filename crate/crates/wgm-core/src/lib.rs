//! Computation of whispering-gallery-mode resonances of the 2-D radially
//! symmetric heterogeneous Helmholtz problem with one refractive-index jump.
//!
//! The pipeline: a radial profile ([`profiles`]) defines two Bessel-type
//! boundary value problems whose solutions form a fundamental system
//! ([`bvp`], [`detsys`]); the zeros of the 2x2 modal determinant in the lower
//! half-plane are the resonances, found by a scaled complex Newton iteration
//! ([`newton`]). Closed-form cross-checks live in [`oracle`] (piecewise
//! constant and Luneburg lens) and [`asympt`] (large-order quasi-resonance
//! expansions); field reconstruction and scaling diagnostics in [`modes`].

pub mod asympt;
pub mod bvp;
pub mod chebfun;
pub(crate) mod dd;
pub mod detsys;
pub mod error;
pub(crate) mod linalg;
pub mod modes;
pub mod newton;
pub mod oracle;
pub mod profiles;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use chebfun::ChebSeries;
pub use detsys::{DeterminantEval, FundamentalSystem};
pub use newton::{NewtonConfig, NewtonResult};
pub use profiles::{catalog, RadialProfile};
