//! Float64 numeric kernels, seeded randomness and the Adam optimizer.
//!
//! Every kernel is a pure function of its inputs and runs on the calling
//! thread, so results are bitwise reproducible regardless of how many
//! threads the caller uses.

mod adam;
mod dense;
mod gradcheck;
mod init;
mod ops;
mod rng;
mod sparse;

use std::sync::atomic::{AtomicBool, Ordering};

pub use adam::{AdamConfig, AdamState};
pub use dense::DenseMatrix;
pub use gradcheck::{grad_check, GradCheck};
pub use init::{glorot_init, randn};
pub use ops::{
    bce_with_logits, relu, relu_backward, sigmoid, softmax_cross_entropy, softmax_rows, softplus,
    standardize_columns, Standardized,
};
pub use rng::{derive_seed, Rng};
pub use sparse::SparseMatrix;

static DETERMINISTIC: AtomicBool = AtomicBool::new(false);

/// Forbid nondeterministic reductions for the rest of the process.
///
/// The bundled kernels never reorder reductions, so this only pins the
/// contract for code layered on top (see [`is_deterministic`]).
pub fn set_deterministic(on: bool) {
    DETERMINISTIC.store(on, Ordering::SeqCst);
}

pub fn is_deterministic() -> bool {
    DETERMINISTIC.load(Ordering::SeqCst)
}
