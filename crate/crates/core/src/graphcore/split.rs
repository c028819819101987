use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::numkit::Rng;

use super::Graph;

#[derive(Clone, Debug, PartialEq)]
pub struct NodeSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSplit {
    /// Edges visible to embedding training.
    pub train: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    /// Unconnected pairs, as many as `test_pos`.
    pub test_neg: Vec<(usize, usize)>,
    pub seed: u64,
}

fn check_fraction(f: f64, what: &str) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} must lie in (0, 1), got {f}"
        )))
    }
}

/// Shuffles `mask` and puts `round(f·|mask|)` nodes on the training side.
pub fn split_nodes(mask: &[usize], f: f64, seed: u64) -> Result<NodeSplit> {
    check_fraction(f, "train fraction")?;
    let k = (f * mask.len() as f64).round() as usize;
    if k == 0 || k == mask.len() {
        return Err(Error::Precondition(format!(
            "fraction {f} of {} nodes leaves one side empty",
            mask.len()
        )));
    }
    let mut order = mask.to_vec();
    Rng::new(seed).shuffle(&mut order);
    let test = order.split_off(k);
    Ok(NodeSplit {
        train: order,
        test,
        seed,
    })
}

/// Holds out `round(h·|E|)` edges and samples as many non-edges.
pub fn split_edges(g: &Graph, h: f64, seed: u64) -> Result<EdgeSplit> {
    check_fraction(h, "holdout fraction")?;
    let m = g.edges().len();
    let k = (h * m as f64).round() as usize;
    if k == 0 || k == m {
        return Err(Error::Precondition(format!(
            "holdout {h} of {m} edges leaves one side empty"
        )));
    }
    let n = g.node_count();
    let pairs = n * (n - 1) / 2;
    if pairs - m < k {
        return Err(Error::Precondition(format!(
            "graph has only {} non-edges, need {k}",
            pairs - m
        )));
    }
    let mut rng = Rng::new(seed);
    let mut order = g.edges().to_vec();
    rng.shuffle(&mut order);
    let train = order.split_off(k);
    let mut train_sorted = train;
    train_sorted.sort_unstable();

    let mut seen = HashSet::with_capacity(k);
    let mut test_neg = Vec::with_capacity(k);
    while test_neg.len() < k {
        let (a, b) = (rng.below(n), rng.below(n));
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if !g.has_edge(pair.0, pair.1) && seen.insert(pair) {
            test_neg.push(pair);
        }
    }
    Ok(EdgeSplit {
        train: train_sorted,
        test_pos: order,
        test_neg,
        seed,
    })
}
