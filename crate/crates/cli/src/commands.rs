use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use privgraph::datagen::synth_graph;
use privgraph::eval::{
    attack_eval, eval_seed, link_eval, sweep, utility_attr_eval, EvalReport, SweepAxis,
};
use privgraph::gradsuite::{registered_checks, run_checks, CheckOutcome};
use privgraph::graphcore::{load_graph, onehot_labels, write_attributes, write_edges, AttributeSchema, Graph};
use privgraph::numkit::{derive_seed, DenseMatrix};
use privgraph::training::{edge_split_for, read_embeddings, train, write_embeddings, write_trace};
use privgraph::Error;

use crate::config::RunConfig;
use crate::error::{io_err, CliResult};

pub const EDGES_FILE: &str = "edges.txt";
pub const ATTRIBUTES_FILE: &str = "attributes.csv";
pub const EMBEDDINGS_FILE: &str = "embeddings.csv";
pub const TRACE_FILE: &str = "loss_trace.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const RESOLVED_FILE: &str = "config_resolved.json";

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(io_err(path))?))
}

fn prepare_out(cfg: &RunConfig, out: &Path) -> CliResult<()> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let path = out.join(RESOLVED_FILE);
    let mut text = serde_json::to_string_pretty(cfg)?;
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))
}

/// The configured graph: files from `data`, else the synthetic generator.
pub fn load_data(cfg: &RunConfig) -> CliResult<(Graph, AttributeSchema)> {
    match (&cfg.data, &cfg.synth) {
        (Some(data), _) => {
            let schema = data.schema()?;
            let g = load_graph(open(&data.edges)?, open(&data.attributes)?, &schema)?;
            Ok((g, schema))
        }
        (None, Some(params)) => Ok(synth_graph(params)?),
        (None, None) => Err(Error::Config("no data source configured".into()).into()),
    }
}

pub fn synth(cfg: &RunConfig, out: &Path) -> CliResult<()> {
    let params = cfg
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("synth needs a synth section".into()))?;
    prepare_out(cfg, out)?;
    let (g, schema) = synth_graph(params)?;
    let edges = out.join(EDGES_FILE);
    write_edges(&g, create(&edges)?)?;
    let attrs = out.join(ATTRIBUTES_FILE);
    write_attributes(&g, &schema, create(&attrs)?)?;
    Ok(())
}

pub fn train_cmd(cfg: &RunConfig, out: &Path) -> CliResult<privgraph::training::EmbeddingResult> {
    prepare_out(cfg, out)?;
    let (g, schema) = load_data(cfg)?;
    let result = train(&g, &schema, &cfg.model)?;
    write_embeddings(&result.z, create(&out.join(EMBEDDINGS_FILE))?)?;
    write_trace(&result.trace, create(&out.join(TRACE_FILE))?)?;
    Ok(result)
}

fn embeddings(path: &Path, g: &Graph) -> CliResult<DenseMatrix> {
    let z = read_embeddings(open(path)?)?;
    if z.rows() != g.node_count() {
        return Err(Error::Input(format!(
            "{} has {} rows but the graph has {} nodes",
            path.display(),
            z.rows(),
            g.node_count()
        ))
        .into());
    }
    Ok(z)
}

fn write_report(report: &EvalReport, out: &Path) -> CliResult<()> {
    report.write_csv(create(&out.join(REPORT_FILE))?)?;
    Ok(())
}

fn method(cfg: &RunConfig) -> &'static str {
    cfg.model.variant.name()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalTask {
    Attack,
    Utility,
    Link,
}

pub fn eval_cmd(cfg: &RunConfig, task: EvalTask, emb: &Path, out: &Path) -> CliResult<EvalReport> {
    let (g, schema) = load_data(cfg)?;
    let z = embeddings(emb, &g)?;
    prepare_out(cfg, out)?;
    let seed = eval_seed(&cfg.model);
    let ecfg = &cfg.eval;
    let mut records = Vec::new();
    for &kind in &ecfg.classifiers {
        let spec = ecfg.spec(kind);
        match task {
            EvalTask::Attack => {
                let privacy = onehot_labels(&g, &schema, &schema.private().name)?;
                records.extend(attack_eval(
                    method(cfg),
                    &z,
                    &privacy,
                    ecfg.fraction,
                    &spec,
                    derive_seed(seed, "privacy"),
                    ecfg.repeats,
                )?);
            }
            EvalTask::Utility => {
                for u in schema.utilities() {
                    let labels = onehot_labels(&g, &schema, &u.name)?;
                    records.extend(utility_attr_eval(
                        method(cfg),
                        &u.name,
                        &z,
                        &labels,
                        ecfg.utility_fraction,
                        &spec,
                        derive_seed(seed, &format!("utility-{}", u.name)),
                        ecfg.repeats,
                    )?);
                }
            }
            EvalTask::Link => {
                let split = edge_split_for(&g, &cfg.model)?.ok_or_else(|| {
                    Error::Config("link evaluation needs model.edge_holdout > 0".into())
                })?;
                records.extend(link_eval(
                    method(cfg),
                    &z,
                    &split,
                    &spec,
                    derive_seed(seed, "link"),
                    ecfg.link_repeats,
                    ecfg.link_pairs,
                )?);
            }
        }
    }
    let report = EvalReport::new(records);
    write_report(&report, out)?;
    Ok(report)
}

pub fn sweep_cmd(cfg: &RunConfig, axis: SweepAxis, out: &Path) -> CliResult<EvalReport> {
    prepare_out(cfg, out)?;
    let (g, schema) = load_data(cfg)?;
    let values = cfg.eval.sweep.for_axis(axis);
    let report = sweep(axis, values, &g, &schema, &cfg.model, &cfg.eval)?;
    write_report(&report, out)?;
    Ok(report)
}

pub fn gradcheck_cmd(tol: f64) -> CliResult<Vec<CheckOutcome>> {
    Ok(run_checks(&registered_checks()?, tol)?)
}

pub fn default_embeddings(out: &Path) -> PathBuf {
    out.join(EMBEDDINGS_FILE)
}
