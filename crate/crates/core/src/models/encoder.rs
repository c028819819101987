use crate::error::{Error, Result};
use crate::numkit::{relu, relu_backward, DenseMatrix, SparseMatrix};

/// Two-layer graph convolution: `L · relu(L·X·W0) · W1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoder {
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
}

/// Intermediates of one encoder pass, consumed by [`Encoder::backward`].
#[derive(Clone, Debug)]
pub struct EncoderCache {
    pub pre: DenseMatrix,
    pub smoothed: DenseMatrix,
    pub code: DenseMatrix,
}

impl Encoder {
    /// Forward pass from pre-propagated features `L·X`.
    pub fn forward(&self, l: &SparseMatrix, propagated: &DenseMatrix) -> Result<EncoderCache> {
        let pre = propagated.matmul(&self.w0)?;
        let smoothed = l.spmm(&relu(&pre))?;
        let code = smoothed.matmul(&self.w1)?;
        Ok(EncoderCache {
            pre,
            smoothed,
            code,
        })
    }

    /// Gradients `[dW0, dW1]` given the cotangent of the code. `L` is symmetric.
    pub fn backward(
        &self,
        l: &SparseMatrix,
        propagated: &DenseMatrix,
        cache: EncoderCache,
        d_code: &DenseMatrix,
    ) -> Result<Vec<DenseMatrix>> {
        let d_w1 = cache.smoothed.matmul_tn(d_code)?;
        let d_smoothed = d_code.matmul_nt(&self.w1)?;
        let d_hidden = l.spmm(&d_smoothed)?;
        let d_pre = relu_backward(&d_hidden, &cache.pre)?;
        let d_w0 = propagated.matmul_tn(&d_pre)?;
        Ok(vec![d_w0, d_w1])
    }
}

pub fn gcn_encode(
    l: &SparseMatrix,
    x: &DenseMatrix,
    w0: &DenseMatrix,
    w1: &DenseMatrix,
) -> Result<DenseMatrix> {
    if w0.cols() != w1.rows() {
        return Err(Error::shape("gcn_encode", w0.shape(), w1.shape()));
    }
    let enc = Encoder {
        w0: w0.clone(),
        w1: w1.clone(),
    };
    Ok(enc.forward(l, &l.spmm(x)?)?.code)
}

/// Linear expansion `Z = Z′·We` with no activation.
pub fn expand(code: &DenseMatrix, we: &DenseMatrix) -> Result<DenseMatrix> {
    if we.cols() < we.rows() {
        return Err(Error::shape("expand", code.shape(), we.shape()));
    }
    code.matmul(we)
}

/// `[Z ‖ onehot(private)]`; rows with a missing label carry a zero block.
pub fn concat_privacy(z: &DenseMatrix, privacy: &DenseMatrix) -> Result<DenseMatrix> {
    DenseMatrix::hstack(&[z, privacy])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{glorot_init, Rng};

    #[test]
    fn single_node() {
        let one = DenseMatrix::filled(1, 1, 1.0);
        let l = SparseMatrix::identity(1);
        assert_eq!(gcn_encode(&l, &one, &one, &one).unwrap().data(), &[1.0]);
        let z = gcn_encode(&l, &one, &one, &DenseMatrix::zeros(1, 3)).unwrap();
        assert_eq!(z, DenseMatrix::zeros(1, 3));
    }

    #[test]
    fn path_graph_matches_dense_evaluation() {
        let s = 1.0 / 6f64.sqrt();
        let dense_l =
            DenseMatrix::from_rows(&[vec![0.5, s, 0.0], vec![s, 1.0 / 3.0, s], vec![0.0, s, 0.5]]);
        let mut trip = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if dense_l.get(i, j) != 0.0 {
                    trip.push((i, j, dense_l.get(i, j)));
                }
            }
        }
        let l = SparseMatrix::from_triplets(3, 3, trip).unwrap();
        let mut rng = Rng::new(12);
        let x = glorot_init(3, 4, &mut rng).unwrap();
        let w0 = glorot_init(4, 5, &mut rng).unwrap();
        let w1 = glorot_init(5, 2, &mut rng).unwrap();
        let want = dense_l
            .matmul(&relu(&dense_l.matmul(&x).unwrap().matmul(&w0).unwrap()))
            .unwrap()
            .matmul(&w1)
            .unwrap();
        let got = gcn_encode(&l, &x, &w0, &w1).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn expansion_cases() {
        let z = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]);
        assert_eq!(expand(&z, &DenseMatrix::identity(2)).unwrap(), z);
        assert_eq!(
            expand(&DenseMatrix::zeros(2, 2), &DenseMatrix::filled(2, 4, 1.5)).unwrap(),
            DenseMatrix::zeros(2, 4)
        );
        let we = DenseMatrix::from_rows(&[vec![1.0, 0.0, 2.0, -1.0], vec![0.0, 1.0, 1.0, 1.0]]);
        let got = expand(&z, &we).unwrap();
        assert_eq!(got.row(0), &[1.0, -2.0, 0.0, -3.0]);
        assert_eq!(got.row(1), &[0.5, 3.0, 4.0, 2.5]);
        assert!(expand(&z, &DenseMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn privacy_concat() {
        let z = DenseMatrix::from_rows(&[vec![0.5], vec![0.5]]);
        let p = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let zp = concat_privacy(&z, &p).unwrap();
        assert_eq!(zp.row(0), &[0.5, 0.0, 1.0]);
        assert_eq!(zp.row(1), &[0.5, 0.0, 0.0]);
        assert_eq!(zp.cols(), 3);
        assert!(concat_privacy(&z, &DenseMatrix::zeros(3, 2)).is_err());
    }
}
