//! Thin wrappers over nalgebra's Cholesky plus a fixed-order summation.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub(crate) fn cholesky(matrix: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(matrix.clone()).ok_or(Error::NotPositiveDefinite)
}

/// `ln det A` for symmetric positive-definite `A`.
pub(crate) fn log_det_spd(matrix: &DMatrix<f64>) -> Result<f64> {
    let chol = cholesky(matrix)?;
    let l = chol.l_dirty();
    let mut total = 0.0;
    for i in 0..matrix.nrows() {
        let pivot = l[(i, i)];
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        total += pivot.ln();
    }
    Ok(2.0 * total)
}

pub(crate) fn inverse_spd(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = cholesky(matrix)?.inverse();
    // symmetrize away rounding so C(e, f) == C(f, e) bit for bit
    Ok((&inv + inv.transpose()) * 0.5)
}

pub(crate) fn solve_spd(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(cholesky(matrix)?.solve(rhs))
}

/// Pairwise (tree) summation with a fixed split, so the result depends only on
/// the order of `values`.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
