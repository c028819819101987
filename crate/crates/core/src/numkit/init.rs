use crate::error::{Error, Result};

use super::{DenseMatrix, Rng};

/// Uniform Glorot initialisation in `±sqrt(6 / (rows + cols))`.
pub fn glorot_init(rows: usize, cols: usize, rng: &mut Rng) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::shape("glorot_init", (rows, cols), (1, 1)));
    }
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.uniform_range(-bound, bound))
        .collect();
    DenseMatrix::new(rows, cols, data)
}

/// Matrix of independent standard normal draws.
pub fn randn(rows: usize, cols: usize, rng: &mut Rng) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::shape("randn", (rows, cols), (1, 1)));
    }
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.normal()).collect())
}
