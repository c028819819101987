//! Privacy-preserving node embeddings for attributed graphs, trained
//! adversarially against attribute-inference attacks, plus the attack and
//! utility audits used to measure them.

// `!(x <= y)` is deliberate throughout: it treats NaN as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod datagen;
pub mod error;
pub mod eval;
pub mod gradsuite;
pub mod graphcore;
pub mod models;
pub mod numkit;
pub mod training;

pub use error::{Error, Result};
