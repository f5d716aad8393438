//! Dense reference computations for small problems.

use nalgebra::DMatrix;

use crate::operator::LinearOperator;
use crate::vector::Vector;

/// Materializes `A` column by column.
pub fn to_dense(op: &dyn LinearOperator) -> DMatrix<f64> {
    let (rows, cols) = (op.out_dim(), op.in_dim());
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        let col = op.apply(&Vector::basis(cols, j));
        for i in 0..rows {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// Singular values of `A`, largest first.
pub fn singular_values(op: &dyn LinearOperator) -> Vec<f64> {
    let m = to_dense(op);
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest `sigma` with `||A^T v|| >= sigma ||v||` for all `v`, i.e. the
/// smallest singular value when `A` has full row rank, and 0 otherwise.
pub fn adjoint_coercivity(op: &dyn LinearOperator) -> f64 {
    let s = singular_values(op);
    if s.len() < op.out_dim() {
        // Fewer columns than rows: A^T has a kernel.
        return 0.0;
    }
    s.last().copied().unwrap_or(0.0)
}
