use crate::error::Result;
use crate::graphcore::Labels;
use crate::numkit::{softmax_cross_entropy, DenseMatrix};

#[derive(Clone, Debug)]
pub struct HeadGrads {
    pub w: DenseMatrix,
    pub input: DenseMatrix,
}

/// Softmax cross-entropy of the utility head `Zin·Wc` over labelled nodes.
pub fn attr_loss(zin: &DenseMatrix, wc: &DenseMatrix, labels: &Labels) -> Result<(f64, HeadGrads)> {
    let logits = zin.matmul(wc)?;
    let (loss, d_logits) = softmax_cross_entropy(&logits, &labels.onehot, &labels.mask)?;
    let w = zin.matmul_tn(&d_logits)?;
    let input = d_logits.matmul_nt(wc)?;
    Ok((loss, HeadGrads { w, input }))
}

/// Link term plus one cross-entropy term per utility attribute.
pub fn recon_loss(link: f64, attrs: &[f64]) -> f64 {
    link + attrs.iter().sum::<f64>()
}
