use crate::error::{Error, Result};
use crate::numkit::SparseMatrix;

use super::Graph;

/// `D^{-1/2} (A + I) D^{-1/2}` over the given subset of `g`'s edges.
///
/// Every node keeps its self-loop, so isolated nodes get a unit diagonal.
pub fn normalize_adjacency(g: &Graph, edges: &[(usize, usize)]) -> Result<SparseMatrix> {
    let n = g.node_count();
    let mut degree = vec![1.0f64; n];
    for &(u, v) in edges {
        if !g.has_edge(u, v) {
            return Err(Error::Precondition(format!(
                "edge ({u}, {v}) is not in the graph"
            )));
        }
        degree[u] += 1.0;
        degree[v] += 1.0;
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut trip = Vec::with_capacity(n + 2 * edges.len());
    for (i, &s) in inv_sqrt.iter().enumerate() {
        trip.push((i, i, s * s));
    }
    for &(u, v) in edges {
        let w = inv_sqrt[u] * inv_sqrt[v];
        trip.push((u, v, w));
        trip.push((v, u, w));
    }
    SparseMatrix::from_triplets(n, n, trip)
}
