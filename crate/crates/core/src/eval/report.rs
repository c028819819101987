use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::ClassifierKind;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    Link,
    Utility(String),
    Privacy,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Link => f.write_str("link"),
            Task::Utility(name) => write!(f, "utility:{name}"),
            Task::Privacy => f.write_str("privacy"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "ACC")]
    Accuracy,
    MacroF1,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Accuracy => "ACC",
            Metric::MacroF1 => "MacroF1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub method: String,
    pub task: Task,
    pub classifier: ClassifierKind,
    /// Share of labeled nodes (or edges) the classifier was trained on.
    pub fraction: f64,
    pub metric: Metric,
    pub mean: f64,
    /// Sample standard deviation over repeats; 0 for a single repeat.
    pub std: f64,
    pub repeats: usize,
}

pub const CSV_HEADER: &str = "method,task,classifier,fraction,metric,mean,std,repeats";

/// Mean and sample standard deviation.
pub fn summarize(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub records: Vec<EvalRecord>,
}

impl EvalReport {
    pub fn new(records: Vec<EvalRecord>) -> Self {
        EvalReport { records }
    }

    pub fn extend(&mut self, other: EvalReport) {
        self.records.extend(other.records);
    }

    pub fn find(
        &self,
        method: &str,
        task: &Task,
        classifier: ClassifierKind,
        metric: Metric,
    ) -> Option<&EvalRecord> {
        self.records.iter().find(|r| {
            r.method == method
                && &r.task == task
                && r.classifier == classifier
                && r.metric == metric
        })
    }

    /// Distinct method labels in first-seen order.
    pub fn methods(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.method.as_str()) {
                out.push(&r.method);
            }
        }
        out
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{}",
                r.method, r.task, r.classifier, r.fraction, r.metric, r.mean, r.std, r.repeats
            )?;
        }
        out.flush()?;
        Ok(())
    }
}
