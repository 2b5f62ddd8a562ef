//! Adaptive Chebyshev collocation for the Bessel-type two-point boundary
//! value problems of the fundamental system.
//!
//! The operator L v = -(1/r)(r v')' + (m^2/r^2 - (k n(r))^2) v is
//! regularized by multiplying through with r^2:
//!
//! ```text
//! -r^2 v'' - r v' + (m^2 - (k n(r) r)^2) v = r^2 g(r)
//! ```
//!
//! so all coefficients are bounded down to r = 0. The series is collocated at
//! the Chebyshev-Lobatto points; the two endpoint rows are replaced by the
//! boundary rows, the degree is doubled until the coefficient tail passes the
//! tolerance.

use num_complex::Complex64;

use crate::chebfun::{lobatto_points, ChebSeries};
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::profiles::{DerivOrder, ProfileSegment};

/// a v(x0) + b v'(x0) = rhs at an endpoint.
#[derive(Copy, Clone, Debug)]
pub struct LinearBC {
    pub a_coef: Complex64,
    pub b_coef: Complex64,
    pub rhs: Complex64,
}

impl LinearBC {
    pub fn new(a_coef: Complex64, b_coef: Complex64, rhs: Complex64) -> Result<Self> {
        if a_coef == Complex64::new(0.0, 0.0) && b_coef == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain {
                context: "LinearBC",
                message: "(a_coef, b_coef) must not both vanish".into(),
            });
        }
        Ok(LinearBC { a_coef, b_coef, rhs })
    }

    /// Dirichlet v(x0) = rhs.
    pub fn dirichlet(rhs: Complex64) -> Self {
        LinearBC { a_coef: Complex64::new(1.0, 0.0), b_coef: Complex64::new(0.0, 0.0), rhs }
    }

    /// Neumann v'(x0) = rhs.
    pub fn neumann(rhs: Complex64) -> Self {
        LinearBC { a_coef: Complex64::new(0.0, 0.0), b_coef: Complex64::new(1.0, 0.0), rhs }
    }
}

/// One radial two-point BVP on (a, b) with the regularized Bessel operator.
#[derive(Clone, Debug)]
pub struct OdeProblem {
    pub interval: (f64, f64),
    pub m: usize,
    pub k: Complex64,
    pub segment: ProfileSegment,
    /// Right-hand side g of L v = g, or None for the homogeneous problem.
    pub rhs: Option<ChebSeries>,
    /// Boundary row at r = interval.0.
    pub left: LinearBC,
    /// Boundary row at r = interval.1.
    pub right: LinearBC,
}

/// Follow-up problem sharing the operator (and therefore the factorization)
/// of a base problem: same interval, m, k, segment and BC coefficient rows;
/// only the right-hand sides differ.
pub struct FollowUp {
    pub rhs: Option<ChebSeries>,
    pub left_rhs: Complex64,
    pub right_rhs: Complex64,
}

pub const MIN_DEGREE: usize = 32;
pub const MAX_DEGREE: usize = 4096;

/// Solves a single problem adaptively. tol in [1e-14, 1e-6].
pub fn solve(p: &OdeProblem, tol: f64) -> Result<ChebSeries> {
    let (v, _) = solve_adaptive(p, tol, None)?;
    Ok(v)
}

/// Solves `p` and a follow-up problem with the same operator, reusing one
/// factorization per degree. The follow-up right-hand sides may depend on the
/// base solution (they are rebuilt after each base solve).
pub fn solve_with_followup(
    p: &OdeProblem,
    tol: f64,
    followup: &dyn Fn(&ChebSeries) -> Result<FollowUp>,
) -> Result<(ChebSeries, ChebSeries)> {
    let (v, w) = solve_adaptive(p, tol, Some(followup))?;
    Ok((v, w.expect("follow-up requested")))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::Domain {
            context: "bvp::solve",
            message: format!("tol = {tol:e} outside [1e-14, 1e-6]"),
        });
    }
    Ok(())
}

fn solve_adaptive(
    p: &OdeProblem,
    tol: f64,
    followup: Option<&dyn Fn(&ChebSeries) -> Result<FollowUp>>,
) -> Result<(ChebSeries, Option<ChebSeries>)> {
    check_tol(tol)?;
    let (a, b) = p.interval;
    if !(b > a) {
        return Err(Error::Domain {
            context: "bvp::solve",
            message: format!("bad interval ({a}, {b})"),
        });
    }

    let mut n = MIN_DEGREE;
    loop {
        let sys = Collocation::build(p, n);
        let lu = Lu::factor(sys.matrix.clone(), n + 1)?;

        let base_rhs = sys.rhs_vector(p.rhs.as_ref(), p.left.rhs, p.right.rhs)?;
        let base = ChebSeries { a, b, coeffs: lu.solve(&base_rhs) };

        let follow = match followup {
            Some(make) => {
                let fu = make(&base)?;
                let rhs = sys.rhs_vector(fu.rhs.as_ref(), fu.left_rhs, fu.right_rhs)?;
                Some(ChebSeries { a, b, coeffs: lu.solve(&rhs) })
            }
            None => None,
        };

        let mut tail = base.tail_ratio();
        if let Some(f) = &follow {
            tail = tail.max(f.tail_ratio());
        }
        if tail <= tol {
            return Ok((base, follow));
        }
        if n >= MAX_DEGREE {
            return Err(Error::NoConvergence(format!(
                "tail ratio {tail:e} > {tol:e} at degree {MAX_DEGREE}"
            )));
        }
        n *= 2;
    }
}





/// Collocation system at a fixed degree: basis value/derivative tables and
/// the assembled square matrix, endpoint rows replaced by BC rows.
struct Collocation {
    n: usize,
    points: Vec<f64>,
    matrix: Vec<Complex64>,
    /// Multiplier of the interior right-hand side rows: r_i^2.
    row_weight: Vec<f64>,
}

impl Collocation {
    fn build(p: &OdeProblem, n: usize) -> Collocation {
        let (a, b) = p.interval;
        let points = lobatto_points(a, b, n);
        let dim = n + 1;
        let scale = 2.0 / (b - a);

        // Chebyshev T_j, T_j', T_j'' at each node (real tables).
        let mut t0 = vec![0.0; dim * dim];
        let mut t1 = vec![0.0; dim * dim];
        let mut t2 = vec![0.0; dim * dim];
        for (i, &r) in points.iter().enumerate() {
            let x = ((2.0 * r - a - b) / (b - a)).clamp(-1.0, 1.0);
            let row0 = &mut t0[i * dim..(i + 1) * dim];
            let row1 = &mut t1[i * dim..(i + 1) * dim];
            let row2 = &mut t2[i * dim..(i + 1) * dim];
            row0[0] = 1.0;
            if dim > 1 {
                row0[1] = x;
                row1[1] = 1.0;
            }
            for j in 2..dim {
                row0[j] = 2.0 * x * row0[j - 1] - row0[j - 2];
                row1[j] = 2.0 * row0[j - 1] + 2.0 * x * row1[j - 1] - row1[j - 2];
                row2[j] = 4.0 * row1[j - 1] + 2.0 * x * row2[j - 1] - row2[j - 2];
            }
            for j in 0..dim {
                row1[j] *= scale;
                row2[j] *= scale * scale;
            }
        }

        let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut row_weight = vec![0.0; dim];
        let k2 = p.k * p.k;
        for i in 0..dim {
            let r = points[i];
            // Lobatto points run from b down to a: row 0 is the right
            // endpoint, row n the left one.
            if i == 0 || i == n {
                let bc = if i == n { &p.left } else { &p.right };
                for j in 0..dim {
                    matrix[i * dim + j] = bc.a_coef * t0[i * dim + j] + bc.b_coef * t1[i * dim + j];
                }
                continue;
            }
            let nr = p.segment.eval(r, DerivOrder::Value);
            let m2 = (p.m * p.m) as f64;
            let zero_order = Complex64::new(m2, 0.0) - k2 * (nr * r) * (nr * r);
            row_weight[i] = r * r;
            for j in 0..dim {
                matrix[i * dim + j] = Complex64::new(-r * r * t2[i * dim + j], 0.0)
                    + Complex64::new(-r * t1[i * dim + j], 0.0)
                    + zero_order * t0[i * dim + j];
            }
        }
        Collocation { n, points, matrix, row_weight }
    }

    fn rhs_vector(
        &self,
        g: Option<&ChebSeries>,
        left_rhs: Complex64,
        right_rhs: Complex64,
    ) -> Result<Vec<Complex64>> {
        let dim = self.n + 1;
        let mut rhs = vec![Complex64::new(0.0, 0.0); dim];
        rhs[0] = right_rhs;
        rhs[self.n] = left_rhs;
        if let Some(g) = g {
            for i in 1..self.n {
                rhs[i] = self.row_weight[i] * g.evaluate(self.points[i])?;
            }
        }
        Ok(rhs)
    }
}
