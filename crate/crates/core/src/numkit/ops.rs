use crate::error::{Error, Result};

use super::DenseMatrix;

pub fn relu(x: &DenseMatrix) -> DenseMatrix {
    x.map(|v| v.max(0.0))
}

/// Passes `cotangent` where `x > 0`; the subgradient at 0 is 0.
pub fn relu_backward(cotangent: &DenseMatrix, x: &DenseMatrix) -> Result<DenseMatrix> {
    if cotangent.shape() != x.shape() {
        return Err(Error::shape("relu_backward", cotangent.shape(), x.shape()));
    }
    let data = cotangent
        .data()
        .iter()
        .zip(x.data())
        .map(|(&c, &v)| if v > 0.0 { c } else { 0.0 })
        .collect();
    DenseMatrix::new(x.rows(), x.cols(), data)
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Row-wise softmax with the row maximum subtracted first.
pub fn softmax_rows(x: &DenseMatrix) -> DenseMatrix {
    let mut out = x.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    out
}

/// Column-standardized matrix plus what its backward pass needs.
#[derive(Clone, Debug)]
pub struct Standardized {
    pub output: DenseMatrix,
    inv_std: Vec<f64>,
}

/// `(x − mean) / sqrt(var + eps)` per column, population statistics.
pub fn standardize_columns(x: &DenseMatrix, eps: f64) -> Standardized {
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
    let inv_std: Vec<f64> = var
        .iter()
        .map(|s| (s / n as f64 + eps).sqrt().recip())
        .collect();
    let mut output = x.clone();
    for i in 0..n {
        for (j, v) in output.row_mut(i).iter_mut().enumerate() {
            *v = (*v - mean[j]) * inv_std[j];
        }
    }
    Standardized { output, inv_std }
}

impl Standardized {
    /// Pulls a cotangent on the output back to the input, including the
    /// dependence of the statistics on every row.
    pub fn backward(&self, dy: &DenseMatrix) -> Result<DenseMatrix> {
        let y = &self.output;
        if dy.shape() != y.shape() {
            return Err(Error::shape("standardize_backward", dy.shape(), y.shape()));
        }
        let (n, d) = y.shape();
        let mut mean_dy = vec![0.0; d];
        let mut mean_dyy = vec![0.0; d];
        for i in 0..n {
            for j in 0..d {
                mean_dy[j] += dy.get(i, j);
                mean_dyy[j] += dy.get(i, j) * y.get(i, j);
            }
        }
        mean_dy
            .iter_mut()
            .chain(mean_dyy.iter_mut())
            .for_each(|m| *m /= n as f64);
        let mut dx = DenseMatrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                let v = self.inv_std[j] * (dy.get(i, j) - mean_dy[j] - y.get(i, j) * mean_dyy[j]);
                dx.set(i, j, v);
            }
        }
        Ok(dx)
    }
}

/// Weighted binary cross-entropy on logits, averaged over every entry.
///
/// Per entry: `pos_weight·t·softplus(−x) + (1−t)·softplus(x)`.
pub fn bce_with_logits(
    logits: &DenseMatrix,
    targets: &DenseMatrix,
    pos_weight: f64,
) -> Result<(f64, DenseMatrix)> {
    if logits.shape() != targets.shape() {
        return Err(Error::shape(
            "bce_with_logits",
            logits.shape(),
            targets.shape(),
        ));
    }
    if !(pos_weight > 0.0) {
        return Err(Error::Precondition(format!(
            "pos_weight must be positive, got {pos_weight}"
        )));
    }
    let count = logits.data().len().max(1) as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(logits.data().len());
    for (&x, &t) in logits.data().iter().zip(targets.data()) {
        loss += pos_weight * t * softplus(-x) + (1.0 - t) * softplus(x);
        let s = sigmoid(x);
        grad.push((pos_weight * t * (s - 1.0) + (1.0 - t) * s) / count);
    }
    Ok((
        loss / count,
        DenseMatrix::new(logits.rows(), logits.cols(), grad)?,
    ))
}

/// Mean softmax cross-entropy over the rows listed in `mask`.
///
/// The gradient is `(softmax(x) − y)/|mask|` on masked rows and zero elsewhere.
pub fn softmax_cross_entropy(
    logits: &DenseMatrix,
    onehot: &DenseMatrix,
    mask: &[usize],
) -> Result<(f64, DenseMatrix)> {
    if logits.shape() != onehot.shape() {
        return Err(Error::shape(
            "softmax_cross_entropy",
            logits.shape(),
            onehot.shape(),
        ));
    }
    if mask.is_empty() {
        return Err(Error::Precondition(
            "softmax_cross_entropy: empty mask".into(),
        ));
    }
    let k = logits.cols();
    let scale = 1.0 / mask.len() as f64;
    let mut grad = DenseMatrix::zeros(logits.rows(), k);
    let mut loss = 0.0;
    for &i in mask {
        let y = onehot.row(i);
        if y.iter().filter(|&&v| v == 1.0).count() != 1 || y.iter().sum::<f64>() != 1.0 {
            return Err(Error::Precondition(format!(
                "softmax_cross_entropy: row {i} is not one-hot"
            )));
        }
        let x = logits.row(i);
        let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + x.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
        let g = grad.row_mut(i);
        for j in 0..k {
            let log_p = x[j] - lse;
            loss -= y[j] * log_p;
            g[j] = (log_p.exp() - y[j]) * scale;
        }
    }
    Ok((loss * scale, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Rng;
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn relu_forward_and_backward() {
        let x = DenseMatrix::from_rows(&[vec![-1.0, 0.0, 2.0]]);
        assert_eq!(relu(&x), DenseMatrix::from_rows(&[vec![0.0, 0.0, 2.0]]));
        let cot = DenseMatrix::filled(1, 3, 1.0);
        assert_eq!(
            relu_backward(&cot, &x).unwrap(),
            DenseMatrix::from_rows(&[vec![0.0, 0.0, 1.0]])
        );
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(700.0) - 1.0).abs() < 1e-12);
        assert!(sigmoid(-1000.0) >= 0.0 && sigmoid(1000.0).is_finite());
        // 1 / (1 + e^-1)
        assert!((sigmoid(1.0) - 0.731_058_578_630_004_9).abs() < 1e-15);
    }

    #[test]
    fn softmax_cases() {
        let eq = softmax_rows(&DenseMatrix::filled(1, 4, 3.7));
        assert!(eq.data().iter().all(|&v| (v - 0.25).abs() < 1e-15));
        let big = softmax_rows(&DenseMatrix::from_rows(&[vec![1000.0, 1000.0]]));
        assert_eq!(big.data(), &[0.5, 0.5]);
        let p = softmax_rows(&DenseMatrix::from_rows(&[vec![0.0, 3f64.ln()]]));
        assert!((p.get(0, 0) - 0.25).abs() < 1e-15 && (p.get(0, 1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bce_reference_values() {
        let one = DenseMatrix::filled(1, 1, 1.0);
        let zero = DenseMatrix::zeros(1, 1);
        let (l, _) = bce_with_logits(&zero, &one, 1.0).unwrap();
        assert!((l - LN2).abs() < 1e-12);
        let (l, _) = bce_with_logits(&zero, &zero, 1.0).unwrap();
        assert!((l - LN2).abs() < 1e-12);
        let (l, _) = bce_with_logits(&DenseMatrix::filled(1, 1, 2.0), &one, 1.0).unwrap();
        // ln(1 + e^-2)
        assert!((l - 0.126_928_011_042_972_6).abs() < 1e-12);
        assert!(bce_with_logits(&zero, &DenseMatrix::zeros(1, 2), 1.0).is_err());
        assert!(bce_with_logits(&zero, &zero, 0.0).is_err());
    }

    #[test]
    fn bce_is_stable_at_extremes() {
        let x = DenseMatrix::from_rows(&[vec![1000.0, -1000.0]]);
        let t = DenseMatrix::from_rows(&[vec![0.0, 1.0]]);
        let (l, g) = bce_with_logits(&x, &t, 3.0).unwrap();
        assert!(l.is_finite() && g.is_finite());
        assert!((l - (1000.0 + 3000.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn softmax_xent_cases() {
        let y = DenseMatrix::from_rows(&[vec![0.0, 1.0, 0.0]]);
        let (l, _) = softmax_cross_entropy(&DenseMatrix::zeros(1, 3), &y, &[0]).unwrap();
        assert!((l - 3f64.ln()).abs() < 1e-12);
        let sharp = DenseMatrix::from_rows(&[vec![0.0, 800.0, 0.0]]);
        let (l, _) = softmax_cross_entropy(&sharp, &y, &[0]).unwrap();
        assert!(l < 1e-12);
        let y2 = DenseMatrix::from_rows(&[vec![0.0, 1.0]]);
        let x2 = DenseMatrix::from_rows(&[vec![0.0, 3f64.ln()]]);
        let (l, g) = softmax_cross_entropy(&x2, &y2, &[0]).unwrap();
        assert!((l + 0.75f64.ln()).abs() < 1e-12);
        assert!((g.get(0, 0) - 0.25).abs() < 1e-12 && (g.get(0, 1) + 0.25).abs() < 1e-12);
        assert!(matches!(
            softmax_cross_entropy(&x2, &y2, &[]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn softmax_xent_zero_gradient_off_mask() {
        let y = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let x = DenseMatrix::from_rows(&[vec![0.3, -0.2], vec![1.0, 2.0]]);
        let (_, g) = softmax_cross_entropy(&x, &y, &[1]).unwrap();
        assert_eq!(g.row(0), &[0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn softmax_rows_sum_to_one(seed in any::<u64>(), scale in 0.0f64..1000.0) {
            let mut rng = Rng::new(seed);
            let x = DenseMatrix::new(4, 6, (0..24).map(|_| rng.uniform_range(-scale, scale)).collect()).unwrap();
            let p = softmax_rows(&x);
            for i in 0..4 {
                let s: f64 = p.row(i).iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!(p.row(i).iter().all(|&v| v >= 0.0));
            }
        }

        #[test]
        fn softmax_shift_invariant(seed in any::<u64>(), shift in -500.0f64..500.0) {
            let mut rng = Rng::new(seed);
            let x = DenseMatrix::new(2, 5, (0..10).map(|_| rng.normal() * 3.0).collect()).unwrap();
            let a = softmax_rows(&x);
            let b = softmax_rows(&x.map(|v| v + shift));
            prop_assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }
}
