use crate::error::{Error, Result};
use crate::numkit::DenseMatrix;

use super::{AttributeSchema, Graph};

/// Concatenated one-hot blocks for every attribute not in `exclude`.
///
/// Code `k` sets column `k − 1` of its block; missing (code 0) leaves the
/// block zero.
pub fn build_features(
    g: &Graph,
    schema: &AttributeSchema,
    exclude: &[&str],
) -> Result<DenseMatrix> {
    if let Some(bad) = exclude.iter().find(|e| schema.get(e).is_none()) {
        return Err(Error::Input(format!(
            "cannot exclude unknown attribute {bad}"
        )));
    }
    let included: Vec<_> = schema
        .attributes()
        .iter()
        .enumerate()
        .filter(|(_, a)| !exclude.contains(&a.name.as_str()))
        .collect();
    let width: usize = included.iter().map(|(_, a)| a.classes).sum();
    let mut x = DenseMatrix::zeros(g.node_count(), width);
    let mut offset = 0;
    for (k, spec) in included {
        for (i, &c) in g.codes(k).iter().enumerate() {
            if c > 0 {
                x.set(i, offset + c as usize - 1, 1.0);
            }
        }
        offset += spec.classes;
    }
    Ok(x)
}

/// One-hot targets for one attribute and the nodes where it is observed.
#[derive(Clone, Debug, PartialEq)]
pub struct Labels {
    pub onehot: DenseMatrix,
    /// Nodes with a non-missing code, ascending.
    pub mask: Vec<usize>,
    /// Zero-based class per node; `None` where missing.
    pub classes: Vec<Option<usize>>,
}

impl Labels {
    pub fn num_classes(&self) -> usize {
        self.onehot.cols()
    }

    /// Zero-based classes of the nodes in `nodes`; panics on a missing label.
    pub fn classes_of(&self, nodes: &[usize]) -> Vec<usize> {
        nodes
            .iter()
            .map(|&i| self.classes[i].expect("node has no label"))
            .collect()
    }
}

pub fn onehot_labels(g: &Graph, schema: &AttributeSchema, attribute: &str) -> Result<Labels> {
    let k = schema
        .position(attribute)
        .ok_or_else(|| Error::Input(format!("unknown attribute {attribute}")))?;
    let m = schema.attributes()[k].classes;
    let mut onehot = DenseMatrix::zeros(g.node_count(), m);
    let mut mask = Vec::new();
    let mut classes = Vec::with_capacity(g.node_count());
    for (i, &c) in g.codes(k).iter().enumerate() {
        if c == 0 {
            classes.push(None);
        } else {
            let cls = c as usize - 1;
            onehot.set(i, cls, 1.0);
            mask.push(i);
            classes.push(Some(cls));
        }
    }
    Ok(Labels {
        onehot,
        mask,
        classes,
    })
}
