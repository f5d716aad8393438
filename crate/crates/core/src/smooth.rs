//! Shipped smooth terms.

use crate::error::{check_len, Error, Result};
use crate::operator::{DenseMatrix, LinearOperator};
use crate::oracle::singular_values;
use crate::terms::SmoothTerm;
use crate::vector::Vector;

/// `f(u) = 1/2 ||u - target||^2`; `L = mu = 1`.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    target: Vector,
}

impl SquaredDistance {
    pub fn new(target: Vector) -> Self {
        SquaredDistance { target }
    }

    pub fn target(&self) -> &Vector {
        &self.target
    }
}

impl SmoothTerm for SquaredDistance {
    fn dim(&self) -> Option<usize> {
        Some(self.target.len())
    }

    fn value(&self, u: &Vector) -> f64 {
        0.5 * u.distance_squared(&self.target)
    }

    fn gradient(&self, u: &Vector) -> Vector {
        u - &self.target
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }

    fn strong_convexity(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `f(u) = 1/2 ||M u - rhs||^2` with `L = s_max(M)^2` and, when `M` has
/// full column rank, `mu = s_min(M)^2`. Both come from a dense SVD.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    matrix: DenseMatrix,
    rhs: Vector,
    lipschitz: f64,
    strong_convexity: Option<f64>,
}

impl LeastSquares {
    pub fn new(matrix: DenseMatrix, rhs: Vector) -> Result<Self> {
        check_len("least-squares rhs", matrix.rows(), rhs.len())?;
        let s = singular_values(&matrix);
        let smax = s.first().copied().unwrap_or(0.0);
        if smax <= 0.0 {
            return Err(Error::invalid("matrix", "least-squares matrix is zero"));
        }
        let full_rank = matrix.rows() >= matrix.cols() && s.last().is_some_and(|&x| x > 0.0);
        let strong_convexity = full_rank.then(|| s[s.len() - 1].powi(2));
        Ok(LeastSquares {
            matrix,
            rhs,
            lipschitz: smax * smax,
            strong_convexity,
        })
    }
}

impl SmoothTerm for LeastSquares {
    fn dim(&self) -> Option<usize> {
        Some(self.matrix.cols())
    }

    fn value(&self, u: &Vector) -> f64 {
        0.5 * self.matrix.apply(u).distance_squared(&self.rhs)
    }

    fn gradient(&self, u: &Vector) -> Vector {
        self.matrix.adjoint(&(&self.matrix.apply(u) - &self.rhs))
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> Option<f64> {
        self.strong_convexity
    }
}
