//! Attributed undirected graphs: loading, normalised adjacency, one-hot
//! feature assembly and seeded node/edge splits.

mod features;
mod graph;
mod io;
mod laplacian;
mod split;

pub use features::{build_features, onehot_labels, Labels};
pub use graph::{AttributeRole, AttributeSchema, AttributeSpec, Graph};
pub use io::{load_graph, write_attributes, write_edges};
pub use laplacian::normalize_adjacency;
pub use split::{split_edges, split_nodes, EdgeSplit, NodeSplit};
