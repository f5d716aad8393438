//! Matrix-free linear operators.

use crate::error::{check_len, check_positive, Error, Result};
use crate::rng::seeded;
use crate::vector::Vector;

/// A linear map `A: R^d -> R^d'` given by its action and the action of its
/// transpose.
///
/// `norm_bound` must be an upper bound on the largest singular value. Step
/// sizes are always derived from this declared bound, so a loose bound is
/// safe and merely conservative.
pub trait LinearOperator: Send + Sync {
    fn in_dim(&self) -> usize;

    fn out_dim(&self) -> usize;

    fn norm_bound(&self) -> f64;

    /// `A x`. Panics if `x.len() != in_dim()`.
    fn apply(&self, x: &Vector) -> Vector;

    /// `A^T y`. Panics if `y.len() != out_dim()`.
    fn adjoint(&self, y: &Vector) -> Vector;
}

/// Identity on `R^n`.
#[derive(Debug, Clone)]
pub struct Identity {
    dim: usize,
}

impl Identity {
    pub fn new(dim: usize) -> Self {
        Identity { dim }
    }
}

impl LinearOperator for Identity {
    fn in_dim(&self) -> usize {
        self.dim
    }

    fn out_dim(&self) -> usize {
        self.dim
    }

    fn norm_bound(&self) -> f64 {
        1.0
    }

    fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.dim, "operator input length");
        x.clone()
    }

    fn adjoint(&self, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.dim, "operator input length");
        y.clone()
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    norm_bound: f64,
}

impl DenseMatrix {
    /// Builds a matrix whose norm bound is its Frobenius norm, which always
    /// dominates the spectral norm.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len("matrix data", rows * cols, data.len())?;
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let frobenius = data.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(DenseMatrix {
            rows,
            cols,
            data,
            // A zero matrix still needs a positive bound for the step-size rules.
            norm_bound: if frobenius > 0.0 { frobenius } else { 1.0 },
        })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len("matrix row", cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Replaces the Frobenius bound with a tighter declared one.
    pub fn with_norm_bound(mut self, bound: f64) -> Result<Self> {
        check_positive("norm_bound", bound)?;
        self.norm_bound = bound;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

impl LinearOperator for DenseMatrix {
    fn in_dim(&self) -> usize {
        self.cols
    }

    fn out_dim(&self) -> usize {
        self.rows
    }

    fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.cols, "operator input length");
        let x = x.as_slice();
        Vector::from_fn(self.rows, |i| {
            self.data[i * self.cols..(i + 1) * self.cols]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    fn adjoint(&self, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.rows, "operator input length");
        let mut out = Vector::zeros(self.cols);
        let acc = out.as_mut_slice();
        for (i, yi) in y.iter().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, a) in acc.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        out
    }
}

/// Forward differences `(D u)_i = u_{i+1} - u_i`, mapping `R^d` to `R^{d-1}`.
///
/// The declared bound is 2; the exact norm is `2 sin(pi (d-1) / (2d))`.
#[derive(Debug, Clone)]
pub struct ForwardDifference {
    dim: usize,
}

impl ForwardDifference {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid("dimension", "forward differences need d >= 2"));
        }
        Ok(ForwardDifference { dim })
    }

    pub fn exact_norm(&self) -> f64 {
        let d = self.dim as f64;
        2.0 * (std::f64::consts::PI * (d - 1.0) / (2.0 * d)).sin()
    }
}

impl LinearOperator for ForwardDifference {
    fn in_dim(&self) -> usize {
        self.dim
    }

    fn out_dim(&self) -> usize {
        self.dim - 1
    }

    fn norm_bound(&self) -> f64 {
        2.0
    }

    fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.dim, "operator input length");
        let x = x.as_slice();
        Vector::from_fn(self.dim - 1, |i| x[i + 1] - x[i])
    }

    fn adjoint(&self, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.dim - 1, "operator input length");
        let y = y.as_slice();
        let last = self.dim - 1;
        Vector::from_fn(self.dim, |j| {
            let from_left = if j >= 1 { y[j - 1] } else { 0.0 };
            let from_right = if j < last { y[j] } else { 0.0 };
            from_left - from_right
        })
    }
}

/// Largest of `|<Au, v> - <u, A^T v>| / (1 + |<Au, v>|)` over `trials`
/// seeded random pairs.
pub fn adjoint_consistency_check(op: &dyn LinearOperator, trials: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let u = Vector::random(&mut rng, op.in_dim(), 1.0);
        let v = Vector::random(&mut rng, op.out_dim(), 1.0);
        let forward = op.apply(&u).dot(&v);
        let backward = u.dot(&op.adjoint(&v));
        worst = worst.max((forward - backward).abs() / (1.0 + forward.abs()));
    }
    worst
}

/// Power iteration on `A^T A` from a seeded start.
///
/// Returns `||A x|| / ||x||` for the final iterate, which never exceeds the
/// true norm. A zero operator yields 0.
pub fn estimate_operator_norm(op: &dyn LinearOperator, iterations: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut x = Vector::random(&mut rng, op.in_dim(), 1.0);
    let n = x.norm();
    if n == 0.0 {
        return 0.0;
    }
    x = x.scaled(1.0 / n);
    let mut estimate = op.apply(&x).norm();
    for _ in 0..iterations.max(1) {
        let y = op.adjoint(&op.apply(&x));
        let n = y.norm();
        if n == 0.0 {
            return 0.0;
        }
        x = y.scaled(1.0 / n);
        estimate = op.apply(&x).norm();
    }
    estimate
}
