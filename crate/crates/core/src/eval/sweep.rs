use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcore::{onehot_labels, AttributeSchema, Graph};
use crate::numkit::derive_seed;
use crate::training::{train, TrainConfig};

use super::{attack_eval, evaluate, EvalConfig, EvalReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Lambda,
    #[serde(alias = "d_prime")]
    Dprime,
    Fraction,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Lambda => "lambda",
            SweepAxis::Dprime => "dprime",
            SweepAxis::Fraction => "fraction",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lambda" => Ok(SweepAxis::Lambda),
            "dprime" | "d_prime" => Ok(SweepAxis::Dprime),
            "fraction" => Ok(SweepAxis::Fraction),
            _ => Err(Error::Config(format!("unknown sweep axis {s:?}"))),
        }
    }
}

/// Values swept per axis when a command names only the axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepValues {
    pub lambda: Vec<f64>,
    pub dprime: Vec<f64>,
    pub fraction: Vec<f64>,
}

impl Default for SweepValues {
    fn default() -> Self {
        SweepValues {
            lambda: vec![0.0, 1.0, 10.0, 100.0],
            dprime: vec![2.0, 4.0, 8.0, 16.0],
            fraction: (1..=9).map(|k| k as f64 / 10.0).collect(),
        }
    }
}

impl SweepValues {
    pub fn for_axis(&self, axis: SweepAxis) -> &[f64] {
        match axis {
            SweepAxis::Lambda => &self.lambda,
            SweepAxis::Dprime => &self.dprime,
            SweepAxis::Fraction => &self.fraction,
        }
    }
}

/// Seed shared by every evaluation of a training run.
pub fn eval_seed(cfg: &TrainConfig) -> u64 {
    derive_seed(cfg.seed, "eval")
}

/// One report block per value, labelled `<variant>@<axis>=<value>`.
/// Lambda and d′ retrain per value; fraction re-attacks a single embedding.
pub fn sweep(
    axis: SweepAxis,
    values: &[f64],
    g: &Graph,
    schema: &AttributeSchema,
    base: &TrainConfig,
    eval: &EvalConfig,
) -> Result<EvalReport> {
    if values.is_empty() {
        return Err(Error::Config(format!(
            "sweep over {axis} needs at least one value"
        )));
    }
    eval.validate()?;
    let label = |v: f64| format!("{}@{axis}={v}", base.variant);
    let mut report = EvalReport::default();
    match axis {
        SweepAxis::Fraction => {
            let result = train(g, schema, base)?;
            let privacy = onehot_labels(g, schema, &schema.private().name)?;
            for &f in values {
                for &kind in &eval.classifiers {
                    let rows = attack_eval(
                        &label(f),
                        &result.z,
                        &privacy,
                        f,
                        &eval.spec(kind),
                        derive_seed(eval_seed(base), "privacy"),
                        eval.repeats,
                    )?;
                    report.records.extend(rows);
                }
            }
        }
        SweepAxis::Lambda | SweepAxis::Dprime => {
            for &v in values {
                let mut cfg = base.clone();
                if axis == SweepAxis::Lambda {
                    cfg.lambda = v;
                } else {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(Error::Config(format!(
                            "d_prime must be a positive integer, got {v}"
                        )));
                    }
                    cfg.d_prime = v as usize;
                }
                let result = train(g, schema, &cfg)?;
                report.extend(evaluate(
                    &label(v),
                    &result.z,
                    g,
                    schema,
                    result.edge_split.as_ref(),
                    eval,
                    eval_seed(&cfg),
                )?);
            }
        }
    }
    Ok(report)
}
