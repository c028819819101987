use crate::error::Result;
use crate::numkit::{glorot_init, relu, relu_backward, sigmoid, softplus, DenseMatrix, Rng};

pub const DISC_HIDDEN: usize = 64;

/// Two fully connected layers: `sigmoid(relu(z·W1 + b1)·W2 + b2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Discriminator {
    pub w1: DenseMatrix,
    pub b1: DenseMatrix,
    pub w2: DenseMatrix,
    pub b2: DenseMatrix,
}

struct Pass {
    pre: DenseMatrix,
    hidden: DenseMatrix,
    logits: DenseMatrix,
}

impl Discriminator {
    pub fn init(input: usize, rng: &mut Rng) -> Result<Self> {
        Ok(Discriminator {
            w1: glorot_init(input, DISC_HIDDEN, rng)?,
            b1: DenseMatrix::zeros(1, DISC_HIDDEN),
            w2: glorot_init(DISC_HIDDEN, 1, rng)?,
            b2: DenseMatrix::zeros(1, 1),
        })
    }

    fn pass(&self, z: &DenseMatrix) -> Result<Pass> {
        let pre = z.matmul(&self.w1)?.add_row_vector(&self.b1)?;
        let hidden = relu(&pre);
        let logits = hidden.matmul(&self.w2)?.add_row_vector(&self.b2)?;
        Ok(Pass {
            pre,
            hidden,
            logits,
        })
    }

    /// Back-propagates logit cotangents; returns `([dW1, db1, dW2, db2], dz)`.
    fn backward(
        &self,
        z: &DenseMatrix,
        p: &Pass,
        d_logits: &DenseMatrix,
    ) -> Result<(Vec<DenseMatrix>, DenseMatrix)> {
        let d_w2 = p.hidden.matmul_tn(d_logits)?;
        let d_b2 = d_logits.column_sums();
        let d_hidden = d_logits.matmul_nt(&self.w2)?;
        let d_pre = relu_backward(&d_hidden, &p.pre)?;
        let d_w1 = z.matmul_tn(&d_pre)?;
        let d_b1 = d_pre.column_sums();
        let d_z = d_pre.matmul_nt(&self.w1)?;
        Ok((vec![d_w1, d_b1, d_w2, d_b2], d_z))
    }

    pub fn logits(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(self.pass(z)?.logits)
    }

    /// Probability that each row is a prior sample.
    pub fn discriminate(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(self.logits(z)?.map(sigmoid))
    }

    /// `mean[−log D(s)] + mean[−log(1 − D(z′))]` and its parameter gradients.
    pub fn disc_loss(
        &self,
        real: &DenseMatrix,
        fake: &DenseMatrix,
    ) -> Result<(f64, Vec<DenseMatrix>)> {
        let (lr, gr) = self.side_loss(real, true)?;
        let (lf, gf) = self.side_loss(fake, false)?;
        let grads = gr
            .into_iter()
            .zip(gf)
            .map(|(a, b)| a.add(&b))
            .collect::<Result<_>>()?;
        Ok((lr + lf, grads))
    }

    fn side_loss(&self, batch: &DenseMatrix, real: bool) -> Result<(f64, Vec<DenseMatrix>)> {
        let p = self.pass(batch)?;
        let n = batch.rows() as f64;
        let (loss, d) = side_terms(&p.logits, real, n);
        let (grads, _) = self.backward(batch, &p, &d)?;
        Ok((loss, grads))
    }

    /// Non-saturating generator loss `mean[−log D(z′)]` and its gradient in `z′`.
    pub fn gen_fool_loss(&self, fake: &DenseMatrix) -> Result<(f64, DenseMatrix)> {
        let p = self.pass(fake)?;
        let (loss, d) = side_terms(&p.logits, true, fake.rows() as f64);
        let (_, dz) = self.backward(fake, &p, &d)?;
        Ok((loss, dz))
    }
}

/// Mean of `softplus(∓x)` and its per-logit gradient.
fn side_terms(logits: &DenseMatrix, real: bool, n: f64) -> (f64, DenseMatrix) {
    let sign = if real { -1.0 } else { 1.0 };
    let loss = logits
        .data()
        .iter()
        .map(|&x| softplus(sign * x))
        .sum::<f64>()
        / n;
    let d = logits.map(|x| if real { sigmoid(x) - 1.0 } else { sigmoid(x) } / n);
    (loss, d)
}
