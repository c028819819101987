use crate::error::{Error, Result};

use super::DenseMatrix;

/// Compressed-row sparse matrix with sorted, unique column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicate positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= rows || *c >= cols) {
            return Err(Error::shape(
                "SparseMatrix::from_triplets",
                (rows, cols),
                (r, c),
            ));
        }
        if triplets.iter().any(|t| !t.2.is_finite()) {
            return Err(Error::NotFinite("SparseMatrix::from_triplets"));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut offsets = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            offsets[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            offsets,
            indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            offsets: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            offsets: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        (&self.indices[s..e], &self.values[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, vals) = self.row(i);
        idx.binary_search(&j).map_or(0.0, |p| vals[p])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                let (idx, vals) = self.row(i);
                idx.iter()
                    .zip(vals)
                    .all(|(&j, &v)| (self.get(j, i) - v).abs() <= tol)
            })
    }

    /// `self · b`
    pub fn spmm(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != b.rows() {
            return Err(Error::shape("spmm", self.shape(), b.shape()));
        }
        let n = b.cols();
        let mut out = DenseMatrix::zeros(self.rows, n);
        for i in 0..self.rows {
            let (idx, vals) = self.row(i);
            let acc = out.row_mut(i);
            for (&k, &a) in idx.iter().zip(vals) {
                for (o, &bv) in acc.iter_mut().zip(b.row(k)) {
                    *o += a * bv;
                }
            }
        }
        debug_assert!(out.is_finite());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Rng;
    use proptest::prelude::*;

    #[test]
    fn identity_and_empty() {
        let b = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        assert_eq!(SparseMatrix::identity(3).spmm(&b).unwrap(), b);
        assert_eq!(
            SparseMatrix::zeros(3, 3).spmm(&b).unwrap(),
            DenseMatrix::zeros(3, 2)
        );
    }

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let s =
            SparseMatrix::from_triplets(2, 3, vec![(0, 2, 1.0), (0, 0, 2.0), (0, 2, 0.5)]).unwrap();
        assert_eq!(s.row(0), (&[0usize, 2][..], &[2.0, 1.5][..]));
        assert_eq!(s.nnz(), 2);
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn random_sparse_matches_dense_oracle() {
        let mut rng = Rng::new(11);
        let mut trip = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                if rng.uniform() < 0.3 {
                    trip.push((i, j, rng.normal()));
                }
            }
        }
        let s = SparseMatrix::from_triplets(5, 5, trip).unwrap();
        let b = DenseMatrix::new(5, 3, (0..15).map(|_| rng.normal()).collect()).unwrap();
        let got = s.spmm(&b).unwrap();
        let want = s.to_dense().matmul(&b).unwrap();
        assert!(
            got.max_abs_diff(&want)
                <= 1e-12 * (1.0 + want.data().iter().fold(0.0f64, |m, v| m.max(v.abs())))
        );
    }

    #[test]
    fn spmm_shape_error() {
        let s = SparseMatrix::identity(3);
        assert!(s.spmm(&DenseMatrix::zeros(2, 2)).is_err());
    }

    proptest! {
        #[test]
        fn spmm_equals_densified_matmul(
            seed in any::<u64>(),
            rows in 1usize..12,
            inner in 1usize..12,
            cols in 1usize..6,
            density in 0.0f64..1.0,
        ) {
            let mut rng = Rng::new(seed);
            let mut trip = Vec::new();
            for i in 0..rows {
                for j in 0..inner {
                    if rng.uniform() < density {
                        trip.push((i, j, rng.normal() * 10.0));
                    }
                }
            }
            let s = SparseMatrix::from_triplets(rows, inner, trip).unwrap();
            let b = DenseMatrix::new(inner, cols, (0..inner * cols).map(|_| rng.normal()).collect()).unwrap();
            let got = s.spmm(&b).unwrap();
            let want = s.to_dense().matmul(&b).unwrap();
            for (g, w) in got.data().iter().zip(want.data()) {
                prop_assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0));
            }
        }
    }
}
