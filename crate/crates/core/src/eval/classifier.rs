use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{
    glorot_init, relu, relu_backward, softmax_cross_entropy, AdamConfig, AdamState, DenseMatrix,
    Rng,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "softmax-linear", alias = "softmax")]
    SoftmaxLinear,
    #[serde(rename = "mlp-1-hidden", alias = "mlp")]
    Mlp,
    #[serde(rename = "nearest-neighbor", alias = "knn")]
    NearestNeighbor,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::SoftmaxLinear,
        ClassifierKind::Mlp,
        ClassifierKind::NearestNeighbor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::SoftmaxLinear => "softmax-linear",
            ClassifierKind::Mlp => "mlp-1-hidden",
            ClassifierKind::NearestNeighbor => "nearest-neighbor",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "softmax-linear" | "softmax" => Ok(ClassifierKind::SoftmaxLinear),
            "mlp-1-hidden" | "mlp" => Ok(ClassifierKind::Mlp),
            "nearest-neighbor" | "knn" => Ok(ClassifierKind::NearestNeighbor),
            _ => Err(Error::Config(format!("unknown classifier {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub hidden: usize,
    pub k: usize,
    pub lr: f64,
    pub steps: usize,
    /// Rescale features by training-side column statistics before fitting.
    pub standardize: bool,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec {
            kind: ClassifierKind::Mlp,
            hidden: 64,
            k: 5,
            lr: 0.01,
            steps: 300,
            standardize: true,
        }
    }
}

impl ClassifierSpec {
    pub fn of(kind: ClassifierKind) -> Self {
        ClassifierSpec {
            kind,
            ..Self::default()
        }
    }
}

/// Column mean and spread of the training rows.
#[derive(Clone, Debug)]
struct Standardizer {
    mean: Vec<f64>,
    inv_std: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &DenseMatrix) -> Self {
        let (n, d) = x.shape();
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; d];
        for i in 0..n {
            for ((s, v), m) in var.iter_mut().zip(x.row(i)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let inv_std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n as f64).sqrt();
                if sd > 1e-12 {
                    1.0 / sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, inv_std }
    }

    fn identity(d: usize) -> Self {
        Standardizer {
            mean: vec![0.0; d],
            inv_std: vec![1.0; d],
        }
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.inv_std) {
                *v = (*v - m) * s;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Model {
    Linear {
        w: DenseMatrix,
        b: DenseMatrix,
    },
    Mlp {
        w1: DenseMatrix,
        b1: DenseMatrix,
        w2: DenseMatrix,
        b2: DenseMatrix,
    },
    Knn {
        x: DenseMatrix,
        y: Vec<usize>,
        k: usize,
    },
}

/// A fitted classifier over standardized features.
#[derive(Clone, Debug)]
pub struct Trained {
    scaler: Standardizer,
    model: Model,
    classes: usize,
}

fn onehot(y: &[usize], classes: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(y.len(), classes);
    for (i, &c) in y.iter().enumerate() {
        m.set(i, c, 1.0);
    }
    m
}

pub fn fit(
    spec: &ClassifierSpec,
    x: &DenseMatrix,
    y: &[usize],
    classes: usize,
    seed: u64,
) -> Result<Trained> {
    if x.rows() != y.len() {
        return Err(Error::shape("fit", x.shape(), (y.len(), 1)));
    }
    if y.is_empty() {
        return Err(Error::Precondition("no training samples".into()));
    }
    if let Some(&c) = y.iter().find(|&&c| c >= classes) {
        return Err(Error::Input(format!("label {c} out of range 0..{classes}")));
    }
    let scaler = if spec.standardize {
        Standardizer::fit(x)
    } else {
        Standardizer::identity(x.cols())
    };
    let xs = scaler.apply(x);
    let mut rng = Rng::new(seed);
    let targets = onehot(y, classes);
    let all: Vec<usize> = (0..y.len()).collect();
    let adam = AdamConfig::with_lr(spec.lr);
    let model = match spec.kind {
        ClassifierKind::SoftmaxLinear => {
            let mut w = glorot_init(xs.cols(), classes, &mut rng)?;
            let mut b = DenseMatrix::zeros(1, classes);
            let mut opt = AdamState::new(adam, &[&w, &b]);
            for _ in 0..spec.steps {
                let logits = xs.matmul(&w)?.add_row_vector(&b)?;
                let (_, g) = softmax_cross_entropy(&logits, &targets, &all)?;
                let grads = [xs.matmul_tn(&g)?, g.column_sums()];
                opt.step(&mut [&mut w, &mut b], &grads)?;
            }
            Model::Linear { w, b }
        }
        ClassifierKind::Mlp => {
            let mut w1 = glorot_init(xs.cols(), spec.hidden, &mut rng)?;
            let mut b1 = DenseMatrix::zeros(1, spec.hidden);
            let mut w2 = glorot_init(spec.hidden, classes, &mut rng)?;
            let mut b2 = DenseMatrix::zeros(1, classes);
            let mut opt = AdamState::new(adam, &[&w1, &b1, &w2, &b2]);
            for _ in 0..spec.steps {
                let pre = xs.matmul(&w1)?.add_row_vector(&b1)?;
                let h = relu(&pre);
                let logits = h.matmul(&w2)?.add_row_vector(&b2)?;
                let (_, g) = softmax_cross_entropy(&logits, &targets, &all)?;
                let dh = relu_backward(&g.matmul_nt(&w2)?, &pre)?;
                let grads = [
                    xs.matmul_tn(&dh)?,
                    dh.column_sums(),
                    h.matmul_tn(&g)?,
                    g.column_sums(),
                ];
                opt.step(&mut [&mut w1, &mut b1, &mut w2, &mut b2], &grads)?;
            }
            Model::Mlp { w1, b1, w2, b2 }
        }
        ClassifierKind::NearestNeighbor => {
            if spec.k == 0 {
                return Err(Error::Config("k must be positive".into()));
            }
            Model::Knn {
                x: xs,
                y: y.to_vec(),
                k: spec.k,
            }
        }
    };
    Ok(Trained {
        scaler,
        model,
        classes,
    })
}

fn argmax_rows(m: &DenseMatrix) -> Vec<usize> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

impl Trained {
    pub fn predict(&self, x: &DenseMatrix) -> Result<Vec<usize>> {
        let xs = self.scaler.apply(x);
        match &self.model {
            Model::Linear { w, b } => Ok(argmax_rows(&xs.matmul(w)?.add_row_vector(b)?)),
            Model::Mlp { w1, b1, w2, b2 } => {
                let h = relu(&xs.matmul(w1)?.add_row_vector(b1)?);
                Ok(argmax_rows(&h.matmul(w2)?.add_row_vector(b2)?))
            }
            Model::Knn { x: train, y, k } => {
                if xs.cols() != train.cols() {
                    return Err(Error::shape("knn_predict", train.shape(), xs.shape()));
                }
                Ok((0..xs.rows())
                    .map(|i| knn_vote(train, y, *k, xs.row(i), self.classes))
                    .collect())
            }
        }
    }
}

/// Majority vote among the `k` nearest rows; ties go to the tied class
/// whose nearest member is closest.
fn knn_vote(train: &DenseMatrix, y: &[usize], k: usize, q: &[f64], classes: usize) -> usize {
    let mut dist: Vec<(f64, usize)> = (0..train.rows())
        .map(|r| {
            let d: f64 = train
                .row(r)
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (d, r)
        })
        .collect();
    let k = k.min(dist.len());
    dist.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
    let near = &mut dist[..k];
    near.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut votes = vec![0usize; classes];
    for &(_, r) in near.iter() {
        votes[y[r]] += 1;
    }
    let top = *votes.iter().max().unwrap();
    near.iter()
        .map(|&(_, r)| y[r])
        .find(|&c| votes[c] == top)
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::randn;

    fn blobs(n: usize, seed: u64) -> (DenseMatrix, Vec<usize>) {
        let mut rng = Rng::new(seed);
        let mut x = randn(n, 3, &mut rng).unwrap();
        let y: Vec<usize> = (0..n).map(|i| i % 3).collect();
        for i in 0..n {
            let v = x.get(i, y[i]) + 4.0;
            x.set(i, y[i], v);
        }
        (x, y)
    }

    #[test]
    fn every_kind_separates_blobs() {
        let (x, y) = blobs(150, 1);
        let (xt, yt) = blobs(90, 2);
        for kind in ClassifierKind::ALL {
            let m = fit(&ClassifierSpec::of(kind), &x, &y, 3, 7).unwrap();
            let p = m.predict(&xt).unwrap();
            let acc = p.iter().zip(&yt).filter(|(a, b)| a == b).count() as f64 / 90.0;
            assert!(acc > 0.95, "{kind}: {acc}");
        }
    }

    #[test]
    fn fitting_is_deterministic() {
        let (x, y) = blobs(60, 3);
        let a = fit(&ClassifierSpec::default(), &x, &y, 3, 9)
            .unwrap()
            .predict(&x)
            .unwrap();
        let b = fit(&ClassifierSpec::default(), &x, &y, 3, 9)
            .unwrap()
            .predict(&x)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn knn_breaks_ties_by_nearest() {
        let x = DenseMatrix::from_rows(&[vec![0.0], vec![1.0], vec![3.0], vec![4.0]]);
        let spec = ClassifierSpec {
            kind: ClassifierKind::NearestNeighbor,
            k: 2,
            ..Default::default()
        };
        let m = fit(&spec, &x, &[0, 0, 1, 1], 2, 0).unwrap();
        let q = DenseMatrix::from_rows(&[vec![1.9], vec![2.1]]);
        assert_eq!(m.predict(&q).unwrap(), vec![0, 1]);
    }

    #[test]
    fn names_round_trip() {
        for kind in ClassifierKind::ALL {
            assert_eq!(kind.name().parse::<ClassifierKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(serde_json::from_str::<ClassifierKind>(&json).unwrap(), kind);
        }
        assert_eq!(
            serde_json::from_str::<ClassifierKind>("\"knn\"").unwrap(),
            ClassifierKind::NearestNeighbor
        );
        assert!("svm".parse::<ClassifierKind>().is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = DenseMatrix::zeros(2, 2);
        assert!(fit(&ClassifierSpec::default(), &x, &[0], 2, 0).is_err());
        assert!(fit(&ClassifierSpec::default(), &x, &[0, 2], 2, 0).is_err());
    }
}
