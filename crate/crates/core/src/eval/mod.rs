//! Attribute-inference attacks, utility audits and link prediction over
//! released embeddings.

mod classifier;
mod metrics;
mod protocol;
mod report;
mod sweep;

pub use classifier::{fit, ClassifierKind, ClassifierSpec, Trained};
pub use metrics::{accuracy, macro_f1};
pub use protocol::{
    attack_eval, evaluate, link_eval, utility_attr_eval, utility_privacy_ratio, EvalConfig,
};
pub use report::{summarize, EvalRecord, EvalReport, Metric, Task, CSV_HEADER};
pub use sweep::{eval_seed, sweep, SweepAxis, SweepValues};
