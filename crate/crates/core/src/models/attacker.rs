use crate::error::Result;
use crate::graphcore::Labels;
use crate::numkit::{
    glorot_init, softmax_cross_entropy, softmax_rows, standardize_columns, DenseMatrix, Rng,
};

const STD_EPS: f64 = 1e-8;

/// Training-time adversary: a linear softmax classifier on the release embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct Attacker {
    pub w: DenseMatrix,
    pub b: DenseMatrix,
    /// Standardize each embedding column over all nodes before the linear map.
    pub standardize: bool,
}

#[derive(Clone, Debug)]
pub struct AttackerGrads {
    pub w: DenseMatrix,
    pub b: DenseMatrix,
    pub z: DenseMatrix,
}

impl Attacker {
    pub fn init(input: usize, classes: usize, rng: &mut Rng) -> Result<Self> {
        Ok(Attacker {
            w: glorot_init(input, classes, rng)?,
            b: DenseMatrix::zeros(1, classes),
            standardize: false,
        })
    }

    pub fn logits(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        if self.standardize {
            let zs = standardize_columns(z, STD_EPS).output;
            zs.matmul(&self.w)?.add_row_vector(&self.b)
        } else {
            z.matmul(&self.w)?.add_row_vector(&self.b)
        }
    }
}

/// Predicted private-class probabilities per node.
pub fn attacker_forward(attacker: &Attacker, z: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(softmax_rows(&attacker.logits(z)?))
}

pub fn attacker_loss(
    attacker: &Attacker,
    z: &DenseMatrix,
    labels: &Labels,
) -> Result<(f64, AttackerGrads)> {
    let scaled = attacker
        .standardize
        .then(|| standardize_columns(z, STD_EPS));
    let input = scaled.as_ref().map_or(z, |s| &s.output);
    let logits = input.matmul(&attacker.w)?.add_row_vector(&attacker.b)?;
    let (loss, d) = softmax_cross_entropy(&logits, &labels.onehot, &labels.mask)?;
    let d_input = d.matmul_nt(&attacker.w)?;
    let dz = match &scaled {
        Some(s) => s.backward(&d_input)?,
        None => d_input,
    };
    Ok((
        loss,
        AttackerGrads {
            w: input.matmul_tn(&d)?,
            b: d.column_sums(),
            z: dz,
        },
    ))
}
