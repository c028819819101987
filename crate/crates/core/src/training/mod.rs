//! The adversarial training loop and its degenerate schedules.

mod config;
mod engine;
mod export;

pub use config::{LinkLossMode, TrainConfig};
pub use engine::{edge_split_for, prepare, train, EmbeddingResult, Prepared, TraceRow};
pub use export::{read_embeddings, write_embeddings, write_trace};
