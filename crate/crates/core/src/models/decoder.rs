use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{bce_with_logits, sigmoid, softplus, DenseMatrix, Rng};

/// Inner-product decoder logits `Zin · Zinᵀ`.
pub fn decode_links(zin: &DenseMatrix) -> Result<DenseMatrix> {
    zin.matmul_nt(zin)
}

/// Positive entries of the self-looped training adjacency `Ã`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkTargets {
    n: usize,
    /// Sorted column indices of the positives in each row, diagonal included.
    rows: Vec<Vec<usize>>,
    nnz: usize,
}

impl LinkTargets {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(u, v) in edges {
            rows[u].push(v);
            rows[v].push(u);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        let nnz = rows.iter().map(Vec::len).sum();
        LinkTargets { n, rows, nnz }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn is_positive(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// `(n² − nnz) / nnz`, the weight balancing positives against negatives.
    pub fn pos_weight(&self) -> f64 {
        let total = (self.n * self.n) as f64;
        (total - self.nnz as f64) / self.nnz as f64
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.n, self.n);
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                t.set(i, j, 1.0);
            }
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum LinkLoss {
    /// Balanced cross-entropy over all n² pairs.
    Exact,
    /// All positives plus `negatives_per_positive · nnz` negatives drawn
    /// uniformly with replacement, reweighted to estimate the exact loss.
    Sampled { negatives_per_positive: usize },
}

/// Balanced link-reconstruction loss and its gradient with respect to `zin`.
pub fn link_loss(
    zin: &DenseMatrix,
    targets: &LinkTargets,
    mode: LinkLoss,
    rng: &mut Rng,
) -> Result<(f64, DenseMatrix)> {
    if zin.rows() != targets.n {
        return Err(Error::shape(
            "link_loss",
            zin.shape(),
            (targets.n, targets.n),
        ));
    }
    match mode {
        LinkLoss::Exact => {
            let logits = decode_links(zin)?;
            let (loss, g) = bce_with_logits(&logits, &targets.to_dense(), targets.pos_weight())?;
            // g is symmetric, so d/dZ of Σ g_ij z_i·z_j is 2·g·Z
            Ok((loss, g.matmul(zin)?.scale(2.0)))
        }
        LinkLoss::Sampled {
            negatives_per_positive,
        } => sampled_link_loss(zin, targets, negatives_per_positive, rng),
    }
}

fn sampled_link_loss(
    zin: &DenseMatrix,
    targets: &LinkTargets,
    ratio: usize,
    rng: &mut Rng,
) -> Result<(f64, DenseMatrix)> {
    let n = targets.n;
    let total = (n * n) as f64;
    let w = targets.pos_weight();
    let mut grad = DenseMatrix::zeros(n, zin.cols());
    let mut loss = 0.0;
    let dot =
        |i: usize, j: usize| -> f64 { zin.row(i).iter().zip(zin.row(j)).map(|(a, b)| a * b).sum() };
    let accumulate = |grad: &mut DenseMatrix, i: usize, j: usize, coef: f64| {
        for (k, &zj) in zin.row(j).iter().enumerate() {
            let v = grad.get(i, k) + coef * zj;
            grad.set(i, k, v);
        }
        for (k, &zi) in zin.row(i).iter().enumerate() {
            let v = grad.get(j, k) + coef * zi;
            grad.set(j, k, v);
        }
    };

    for (i, row) in targets.rows.iter().enumerate() {
        for &j in row {
            let x = dot(i, j);
            loss += w * softplus(-x);
            accumulate(&mut grad, i, j, w * (sigmoid(x) - 1.0) / total);
        }
    }

    let negatives = n * n - targets.nnz;
    let requested = ratio.saturating_mul(targets.nnz);
    if requested >= negatives {
        for (i, row) in targets.rows.iter().enumerate() {
            let mut pos = row.iter().peekable();
            for j in 0..n {
                if pos.peek() == Some(&&j) {
                    pos.next();
                    continue;
                }
                let x = dot(i, j);
                loss += softplus(x);
                accumulate(&mut grad, i, j, sigmoid(x) / total);
            }
        }
    } else if requested > 0 {
        let scale = negatives as f64 / requested as f64;
        let mut drawn = 0;
        while drawn < requested {
            let (i, j) = (rng.below(n), rng.below(n));
            if targets.is_positive(i, j) {
                continue;
            }
            let x = dot(i, j);
            loss += scale * softplus(x);
            accumulate(&mut grad, i, j, scale * sigmoid(x) / total);
            drawn += 1;
        }
    }
    Ok((loss / total, grad))
}
