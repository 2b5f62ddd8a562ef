//! Piecewise-smooth radial refractive-index profiles with one jump point.
//!
//! A profile is two smooth segments, inner on (0, xi) and outer on (xi, 1),
//! each either a polynomial in r or a sqrt-quadratic sqrt(alpha + gamma r^2)
//! (the Luneburg form). Both forms have exact first and second derivatives,
//! which the asymptotic expansions need at the jump.

use serde::Deserialize;

use crate::error::{Error, Result};

/// Which side of the jump point to evaluate.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Inner,
    Outer,
}

/// Derivative order accepted by [`RadialProfile::eval_n`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DerivOrder {
    Value,
    First,
    Second,
}

/// One smooth segment of the refractive index.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSegment {
    /// Coefficients c0 + c1 r + c2 r^2 + ...
    Poly(Vec<f64>),
    /// n(r) = sqrt(alpha + gamma r^2)
    SqrtQ { alpha: f64, gamma: f64 },
}

impl ProfileSegment {
    /// n, n' or n'' at r. Segments are globally defined expressions; interval
    /// membership is enforced by [`RadialProfile::eval_n`].
    pub fn eval(&self, r: f64, order: DerivOrder) -> f64 {
        match self {
            ProfileSegment::Poly(c) => match order {
                DerivOrder::Value => horner(c, r, 0),
                DerivOrder::First => horner(c, r, 1),
                DerivOrder::Second => horner(c, r, 2),
            },
            ProfileSegment::SqrtQ { alpha, gamma } => {
                let n = (alpha + gamma * r * r).sqrt();
                match order {
                    DerivOrder::Value => n,
                    DerivOrder::First => gamma * r / n,
                    // n'' = gamma alpha / n^3
                    DerivOrder::Second => gamma * alpha / (n * n * n),
                }
            }
        }
    }

    /// n^2 as polynomial coefficients; exact for both segment forms. The ODE
    /// coefficient (k n r)^2 stays polynomial this way.
    pub fn n_squared_poly(&self) -> Vec<f64> {
        match self {
            ProfileSegment::Poly(c) => {
                let mut out = vec![0.0; 2 * c.len().saturating_sub(1) + 1];
                for (i, &a) in c.iter().enumerate() {
                    for (j, &b) in c.iter().enumerate() {
                        out[i + j] += a * b;
                    }
                }
                out
            }
            ProfileSegment::SqrtQ { alpha, gamma } => vec![*alpha, 0.0, *gamma],
        }
    }

    fn positive_on(&self, a: f64, b: f64) -> bool {
        const GRID: usize = 10_000;
        (0..=GRID).all(|i| {
            let r = a + (b - a) * i as f64 / GRID as f64;
            let sq = match self {
                ProfileSegment::Poly(_) => self.eval(r, DerivOrder::Value),
                ProfileSegment::SqrtQ { alpha, gamma } => alpha + gamma * r * r,
            };
            sq > 0.0
        })
    }
}

fn horner(c: &[f64], r: f64, deriv: usize) -> f64 {
    let mut acc = 0.0;
    for (i, &ci) in c.iter().enumerate().rev() {
        if i < deriv {
            break;
        }
        let mut factor = 1.0;
        for d in 0..deriv {
            factor *= (i - d) as f64;
        }
        acc = acc * r + ci * factor;
    }
    acc
}

/// Refractive index with a single jump at `xi`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct RadialProfile {
    #[serde(default = "default_xi")]
    pub xi: f64,
    pub inner: ProfileSegment,
    pub outer: ProfileSegment,
}

fn default_xi() -> f64 {
    0.5
}

/// One-sided limits of the index and its derivatives at the jump and at 1.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct InterfaceTrace {
    /// n from inside at xi.
    pub n0: f64,
    /// n' from inside at xi.
    pub n_i: f64,
    /// n'' from inside at xi.
    pub n_ii: f64,
    /// n from outside at xi.
    pub n2_xi: f64,
    /// n from outside at 1.
    pub n2_one: f64,
}

impl RadialProfile {
    pub fn new(xi: f64, inner: ProfileSegment, outer: ProfileSegment) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::InvalidProfile(format!("xi = {xi} not in (0,1)")));
        }
        if !inner.positive_on(0.0, xi) || !outer.positive_on(xi, 1.0) {
            return Err(Error::InvalidProfile(
                "refractive index must be positive on its segment".into(),
            ));
        }
        Ok(RadialProfile { xi, inner, outer })
    }

    pub fn segment(&self, side: Side) -> &ProfileSegment {
        match side {
            Side::Inner => &self.inner,
            Side::Outer => &self.outer,
        }
    }

    /// n, n' or n'' of the chosen side at r (one-sided values at xi allowed).
    pub fn eval_n(&self, side: Side, r: f64, order: DerivOrder) -> Result<f64> {
        let (lo, hi) = match side {
            Side::Inner => (0.0, self.xi),
            Side::Outer => (self.xi, 1.0),
        };
        let slack = 1e-12;
        if r < lo - slack || r > hi + slack {
            return Err(Error::Domain {
                context: "eval_n",
                message: format!("r = {r} outside [{lo}, {hi}]"),
            });
        }
        Ok(self.segment(side).eval(r, order))
    }

    pub fn interface_trace(&self) -> InterfaceTrace {
        InterfaceTrace {
            n0: self.inner.eval(self.xi, DerivOrder::Value),
            n_i: self.inner.eval(self.xi, DerivOrder::First),
            n_ii: self.inner.eval(self.xi, DerivOrder::Second),
            n2_xi: self.outer.eval(self.xi, DerivOrder::Value),
            n2_one: self.outer.eval(1.0, DerivOrder::Value),
        }
    }

    /// True when the outer segment is identically 1 (the assumption behind
    /// the closed-form asymptotics).
    pub fn outer_is_unit(&self) -> bool {
        match &self.outer {
            ProfileSegment::Poly(c) => {
                c.first().map_or(false, |&c0| (c0 - 1.0).abs() < 1e-14)
                    && c.iter().skip(1).all(|&ci| ci.abs() < 1e-14)
            }
            ProfileSegment::SqrtQ { alpha, gamma } => {
                (alpha - 1.0).abs() < 1e-14 && gamma.abs() < 1e-14
            }
        }
    }

    /// True when both segments are constants.
    pub fn is_piecewise_constant(&self) -> Option<(f64, f64)> {
        let constant = |seg: &ProfileSegment| -> Option<f64> {
            match seg {
                ProfileSegment::Poly(c) => {
                    if c.iter().skip(1).all(|&ci| ci == 0.0) {
                        c.first().copied()
                    } else {
                        None
                    }
                }
                ProfileSegment::SqrtQ { alpha, gamma } => {
                    if *gamma == 0.0 {
                        Some(alpha.sqrt())
                    } else {
                        None
                    }
                }
            }
        };
        Some((constant(&self.inner)?, constant(&self.outer)?))
    }
}

/// Built-in profile catalog, all with xi = 0.5.
pub fn catalog(name: &str) -> Result<RadialProfile> {
    use ProfileSegment::{Poly, SqrtQ};
    let unit = Poly(vec![1.0]);
    let (inner, outer) = match name {
        "constant-1.5" => (Poly(vec![1.5]), unit),
        "constant-5" => (Poly(vec![5.0]), unit),
        "affine-1" => (Poly(vec![2.0, -1.0]), unit),
        "affine-2" => (Poly(vec![1.5, 1.0]), unit),
        "affine-3" => (Poly(vec![1.0, 1.0]), unit),
        "affine-4" => (Poly(vec![3.0, -3.0]), unit),
        "affine-5" => (Poly(vec![2.5, -2.8]), unit),
        // 1.5 + 6 r (1/2 - r) and its reflected twin
        "parabolic-1" => (Poly(vec![1.5, 3.0, -6.0]), unit),
        "parabolic-2" => (Poly(vec![1.5, -3.0, 6.0]), unit),
        "parabolic-3" => (Poly(vec![3.0, -1.0, -1.0]), unit),
        "luneburg" => (SqrtQ { alpha: 2.0, gamma: -1.0 }, unit),
        "luneburg-n2-affine" => (
            SqrtQ { alpha: 2.0, gamma: -1.0 },
            Poly(vec![0.5, 1.0]),
        ),
        // n2(r) = 1 + (r - 1/2)^3
        "luneburg-n2-cubic" => (
            SqrtQ { alpha: 2.0, gamma: -1.0 },
            Poly(vec![0.875, 0.75, -1.5, 1.0]),
        ),
        other => return Err(Error::UnknownProfile(other.to_string())),
    };
    RadialProfile::new(0.5, inner, outer)
}

/// All catalog names, in table order.
pub const CATALOG_NAMES: [&str; 13] = [
    "constant-1.5",
    "constant-5",
    "affine-1",
    "affine-2",
    "affine-3",
    "affine-4",
    "affine-5",
    "parabolic-1",
    "parabolic-2",
    "parabolic-3",
    "luneburg",
    "luneburg-n2-affine",
    "luneburg-n2-cubic",
];

/// Parses either a catalog name or a JSON profile literal like
/// `{"xi":0.5,"inner":{"poly":[2.5,-2.8]},"outer":{"poly":[1.0]}}`.
pub fn parse_profile_json(json: &str) -> Result<RadialProfile> {
    let raw: RadialProfile = serde_json::from_str(json)
        .map_err(|e| Error::InvalidProfile(format!("bad profile JSON: {e}")))?;
    RadialProfile::new(raw.xi, raw.inner, raw.outer)
}
