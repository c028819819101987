use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcore::{onehot_labels, split_nodes, AttributeSchema, EdgeSplit, Graph, Labels};
use crate::numkit::{derive_seed, DenseMatrix, Rng};

use super::classifier::fit;
use super::report::summarize;
use super::sweep::SweepValues;
use super::{
    accuracy, macro_f1, ClassifierKind, ClassifierSpec, EvalRecord, EvalReport, Metric, Task,
};

const SPLIT_ATTEMPTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub classifiers: Vec<ClassifierKind>,
    /// Adversary's share of labeled nodes.
    pub fraction: f64,
    pub utility_fraction: f64,
    pub repeats: usize,
    pub link_repeats: usize,
    /// Cap on training edges fed to the link classifier (plus as many non-edges).
    pub link_pairs: usize,
    pub hidden: usize,
    pub k: usize,
    pub lr: f64,
    pub steps: usize,
    pub standardize: bool,
    pub sweep: SweepValues,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let spec = ClassifierSpec::default();
        EvalConfig {
            classifiers: vec![ClassifierKind::Mlp],
            fraction: 0.5,
            utility_fraction: 0.7,
            repeats: 10,
            link_repeats: 3,
            link_pairs: 1000,
            hidden: spec.hidden,
            k: spec.k,
            lr: spec.lr,
            steps: spec.steps,
            standardize: spec.standardize,
            sweep: SweepValues::default(),
        }
    }
}

impl EvalConfig {
    pub fn spec(&self, kind: ClassifierKind) -> ClassifierSpec {
        ClassifierSpec {
            kind,
            hidden: self.hidden,
            k: self.k,
            lr: self.lr,
            steps: self.steps,
            standardize: self.standardize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classifiers.is_empty() {
            return Err(Error::Config("at least one classifier is required".into()));
        }
        if self.repeats == 0 || self.link_repeats == 0 || self.link_pairs == 0 {
            return Err(Error::Config(
                "repeats and link_pairs must be positive".into(),
            ));
        }
        for f in [self.fraction, self.utility_fraction] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Config(format!(
                    "fractions must lie in (0, 1), got {f}"
                )));
            }
        }
        Ok(())
    }
}

fn records(
    method: &str,
    task: Task,
    spec: &ClassifierSpec,
    fraction: f64,
    acc: &[f64],
    f1: &[f64],
) -> Vec<EvalRecord> {
    [(Metric::Accuracy, acc), (Metric::MacroF1, f1)]
        .into_iter()
        .map(|(metric, v)| {
            let (mean, std) = summarize(v);
            EvalRecord {
                method: method.to_string(),
                task: task.clone(),
                classifier: spec.kind,
                fraction,
                metric,
                mean,
                std,
                repeats: v.len(),
            }
        })
        .collect()
}

/// Trains on a random `f` share of labeled nodes and scores the rest,
/// repeated `repeats` times under seeds derived from `seed`.
fn node_eval(
    method: &str,
    task: Task,
    z: &DenseMatrix,
    labels: &Labels,
    f: f64,
    spec: &ClassifierSpec,
    seed: u64,
    repeats: usize,
) -> Result<Vec<EvalRecord>> {
    if z.rows() != labels.classes.len() {
        return Err(Error::shape("node_eval", z.shape(), labels.onehot.shape()));
    }
    if labels.mask.is_empty() {
        return Err(Error::Precondition(format!("no labeled nodes for {task}")));
    }
    let m = labels.num_classes();
    let present: HashSet<usize> = labels.classes_of(&labels.mask).into_iter().collect();
    let mut acc = Vec::with_capacity(repeats);
    let mut f1 = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let repeat_seed = derive_seed(seed, &format!("repeat-{r}"));
        let mut split = None;
        for attempt in 0..SPLIT_ATTEMPTS {
            let s = split_nodes(
                &labels.mask,
                f,
                derive_seed(repeat_seed, &format!("split-{attempt}")),
            )?;
            let seen: HashSet<usize> = labels.classes_of(&s.train).into_iter().collect();
            if seen == present {
                split = Some(s);
                break;
            }
        }
        let split = split.ok_or_else(|| {
            Error::Precondition(format!(
                "{task}: some class never reached the training side in {SPLIT_ATTEMPTS} draws"
            ))
        })?;
        let ytr = labels.classes_of(&split.train);
        let yte = labels.classes_of(&split.test);
        let model = fit(
            spec,
            &z.select_rows(&split.train),
            &ytr,
            m,
            derive_seed(repeat_seed, "classifier"),
        )?;
        let pred = model.predict(&z.select_rows(&split.test))?;
        acc.push(accuracy(&yte, &pred)?);
        f1.push(macro_f1(&yte, &pred, m)?);
    }
    Ok(records(method, task, spec, f, &acc, &f1))
}

/// Attribute-inference attack: the adversary knows the private label of a
/// random `f` share of nodes and predicts the rest from `z`.
pub fn attack_eval(
    method: &str,
    z: &DenseMatrix,
    privacy: &Labels,
    f: f64,
    spec: &ClassifierSpec,
    seed: u64,
    repeats: usize,
) -> Result<Vec<EvalRecord>> {
    node_eval(method, Task::Privacy, z, privacy, f, spec, seed, repeats)
}

pub fn utility_attr_eval(
    method: &str,
    attribute: &str,
    z: &DenseMatrix,
    labels: &Labels,
    f: f64,
    spec: &ClassifierSpec,
    seed: u64,
    repeats: usize,
) -> Result<Vec<EvalRecord>> {
    node_eval(
        method,
        Task::Utility(attribute.to_string()),
        z,
        labels,
        f,
        spec,
        seed,
        repeats,
    )
}

fn pair_features(z: &DenseMatrix, pairs: &[(usize, usize)]) -> DenseMatrix {
    let d = z.cols();
    let mut data = Vec::with_capacity(pairs.len() * d);
    for &(u, v) in pairs {
        data.extend(z.row(u).iter().zip(z.row(v)).map(|(a, b)| a * b));
    }
    DenseMatrix::new(pairs.len(), d, data).expect("finite embedding")
}

/// Edge classification on Hadamard pair features: trained on up to
/// `max_pairs` training edges plus as many fresh non-edges, scored on the
/// held-out positives and non-edges.
pub fn link_eval(
    method: &str,
    z: &DenseMatrix,
    split: &EdgeSplit,
    spec: &ClassifierSpec,
    seed: u64,
    repeats: usize,
    max_pairs: usize,
) -> Result<Vec<EvalRecord>> {
    if split.test_pos.is_empty() || split.test_neg.is_empty() {
        return Err(Error::Precondition(
            "edge split has no held-out pairs".into(),
        ));
    }
    let n = z.rows();
    let known: HashSet<(usize, usize)> = split
        .train
        .iter()
        .chain(&split.test_pos)
        .chain(&split.test_neg)
        .copied()
        .collect();
    if let Some(&(u, v)) = known.iter().find(|&&(u, v)| u.max(v) >= n) {
        return Err(Error::Input(format!(
            "pair ({u}, {v}) outside a {n}-row embedding"
        )));
    }
    let test: Vec<(usize, usize)> = split
        .test_pos
        .iter()
        .chain(&split.test_neg)
        .copied()
        .collect();
    let ytest: Vec<usize> = (0..test.len())
        .map(|i| usize::from(i < split.test_pos.len()))
        .collect();
    let xtest = pair_features(z, &test);
    let total = n * (n - 1) / 2;

    let mut acc = Vec::with_capacity(repeats);
    let mut f1 = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let repeat_seed = derive_seed(seed, &format!("link-repeat-{r}"));
        let mut rng = Rng::for_component(repeat_seed, "pairs");
        let mut pos = split.train.clone();
        rng.shuffle(&mut pos);
        pos.truncate(max_pairs);
        let want = pos.len().min(total.saturating_sub(known.len()));
        let mut taken = HashSet::with_capacity(want);
        let mut neg = Vec::with_capacity(want);
        while neg.len() < want {
            let (a, b) = (rng.below(n), rng.below(n));
            let pair = (a.min(b), a.max(b));
            if a != b && !known.contains(&pair) && taken.insert(pair) {
                neg.push(pair);
            }
        }
        let y: Vec<usize> = (0..pos.len() + neg.len())
            .map(|i| usize::from(i < pos.len()))
            .collect();
        pos.extend(neg);
        let model = fit(
            spec,
            &pair_features(z, &pos),
            &y,
            2,
            derive_seed(repeat_seed, "classifier"),
        )?;
        let pred = model.predict(&xtest)?;
        acc.push(accuracy(&ytest, &pred)?);
        f1.push(macro_f1(&ytest, &pred, 2)?);
    }
    let train_share = split.train.len() as f64 / (split.train.len() + split.test_pos.len()) as f64;
    Ok(records(method, Task::Link, spec, train_share, &acc, &f1))
}

/// Privacy, utility and (when a split is given) link evaluation of one
/// embedding for every configured classifier.
pub fn evaluate(
    method: &str,
    z: &DenseMatrix,
    g: &Graph,
    schema: &AttributeSchema,
    edge_split: Option<&EdgeSplit>,
    cfg: &EvalConfig,
    seed: u64,
) -> Result<EvalReport> {
    cfg.validate()?;
    let mut out = Vec::new();
    let privacy = onehot_labels(g, schema, &schema.private().name)?;
    for &kind in &cfg.classifiers {
        let spec = cfg.spec(kind);
        out.extend(attack_eval(
            method,
            z,
            &privacy,
            cfg.fraction,
            &spec,
            derive_seed(seed, "privacy"),
            cfg.repeats,
        )?);
        for u in schema.utilities() {
            let labels = onehot_labels(g, schema, &u.name)?;
            out.extend(utility_attr_eval(
                method,
                &u.name,
                z,
                &labels,
                cfg.utility_fraction,
                &spec,
                derive_seed(seed, &format!("utility-{}", u.name)),
                cfg.repeats,
            )?);
        }
        if let Some(split) = edge_split {
            out.extend(link_eval(
                method,
                z,
                split,
                &spec,
                derive_seed(seed, "link"),
                cfg.link_repeats,
                cfg.link_pairs,
            )?);
        }
    }
    Ok(EvalReport::new(out))
}

/// Mean of the link and utility Macro-F1 rows divided by the mean privacy
/// Macro-F1 row.
pub fn utility_privacy_ratio(records: &[EvalRecord]) -> Result<f64> {
    let f1 = records.iter().filter(|r| r.metric == Metric::MacroF1);
    let (utility, privacy): (Vec<_>, Vec<_>) = f1.partition(|r| r.task != Task::Privacy);
    if utility.is_empty() || privacy.is_empty() {
        return Err(Error::Precondition(
            "ratio needs utility and privacy Macro-F1 rows".into(),
        ));
    }
    let num = utility.iter().map(|r| r.mean).sum::<f64>() / utility.len() as f64;
    let den = privacy.iter().map(|r| r.mean).sum::<f64>() / privacy.len() as f64;
    if den <= 0.0 {
        return Err(Error::Precondition(
            "privacy Macro-F1 must be positive".into(),
        ));
    }
    Ok(num / den)
}
