use crate::error::{Error, Result};

fn check(truth: &[usize], pred: &[usize]) -> Result<()> {
    if truth.len() != pred.len() {
        return Err(Error::shape("metric", (truth.len(), 1), (pred.len(), 1)));
    }
    if truth.is_empty() {
        return Err(Error::Precondition("metric over zero samples".into()));
    }
    Ok(())
}

pub fn accuracy(truth: &[usize], pred: &[usize]) -> Result<f64> {
    check(truth, pred)?;
    let hits = truth.iter().zip(pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Unweighted mean of per-class F1 over classes `0..classes`; a class with
/// no predictions and no support scores 0.
pub fn macro_f1(truth: &[usize], pred: &[usize], classes: usize) -> Result<f64> {
    check(truth, pred)?;
    if classes == 0 {
        return Err(Error::Precondition(
            "macro F1 needs at least one class".into(),
        ));
    }
    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fneg = vec![0usize; classes];
    for (&t, &p) in truth.iter().zip(pred) {
        if t >= classes || p >= classes {
            return Err(Error::Input(format!("label out of range 0..{classes}")));
        }
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fneg[t] += 1;
        }
    }
    let total: f64 = (0..classes)
        .map(|c| {
            let denom = 2 * tp[c] + fp[c] + fneg[c];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[c] as f64 / denom as f64
            }
        })
        .sum();
    Ok(total / classes as f64)
}
