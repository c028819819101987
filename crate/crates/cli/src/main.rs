use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use privgraph::eval::SweepAxis;
use privgraph::gradsuite::TOLERANCE;
use privgraph::numkit::set_deterministic;
use privgraph_cli::commands::{self, EvalTask};
use privgraph_cli::{exit_code, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "privgraph", version, about = "Privacy-preserving graph embeddings and inference-attack audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run config; defaults apply to anything left out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Embedding CSV; defaults to `<out>/embeddings.csv`.
    #[arg(long)]
    embeddings: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph as edge and attribute files.
    Synth(Common),
    /// Train embeddings and write them with the loss trace.
    Train(Common),
    /// Attribute-inference attack on released embeddings.
    Attack(EvalArgs),
    /// Utility-attribute prediction from embeddings.
    EvalAttr(EvalArgs),
    /// Held-out link prediction from embeddings.
    EvalLink(EvalArgs),
    /// Retrain or re-attack across one hyperparameter axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: SweepAxis,
    },
    /// Compare every analytic gradient with central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = TOLERANCE)]
        tol: f64,
    },
}

fn setup(common: &Common) -> CliResult<(RunConfig, PathBuf)> {
    set_deterministic(common.deterministic);
    let cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = common.out.clone().unwrap_or_else(|| cfg.output.clone());
    Ok((cfg, out))
}

fn eval(args: &EvalArgs, task: EvalTask) -> CliResult<()> {
    let (cfg, out) = setup(&args.common)?;
    let emb = args
        .embeddings
        .clone()
        .unwrap_or_else(|| commands::default_embeddings(&out));
    let report = commands::eval_cmd(&cfg, task, &emb, &out)?;
    for r in &report.records {
        println!(
            "{:<10} {:<18} {:<17} f={:<4} {:<8} {:.4} ± {:.4}",
            r.method, r.task.to_string(), r.classifier.name(), r.fraction, r.metric.to_string(), r.mean, r.std
        );
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Synth(common) => {
            let (cfg, out) = setup(&common)?;
            commands::synth(&cfg, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Train(common) => {
            let (cfg, out) = setup(&common)?;
            let r = commands::train_cmd(&cfg, &out)?;
            let last = r.trace.last().expect("at least one iteration");
            println!(
                "{} trained {} iterations in {:.1}s; final l_link {:.4} l_obf {:.4}",
                cfg.model.variant,
                r.trace.len(),
                r.wall_time.as_secs_f64(),
                last.l_link,
                last.l_obf
            );
        }
        Command::Attack(args) => eval(&args, EvalTask::Attack)?,
        Command::EvalAttr(args) => eval(&args, EvalTask::Utility)?,
        Command::EvalLink(args) => eval(&args, EvalTask::Link)?,
        Command::Sweep { common, axis } => {
            let (cfg, out) = setup(&common)?;
            let report = commands::sweep_cmd(&cfg, axis, &out)?;
            println!("{} blocks, {} rows -> {}", report.methods().len(), report.records.len(), out.display());
        }
        Command::Gradcheck { tol } => {
            let outcomes = commands::gradcheck_cmd(tol)?;
            let mut ok = true;
            for o in &outcomes {
                ok &= o.passed;
                let verdict = if o.passed { "PASS" } else { "FAIL" };
                println!("{verdict}  {:<44} {:.3e}", o.name, o.result.max_rel_error);
            }
            println!("{} of {} checks pass at tolerance {tol:e}", outcomes.iter().filter(|o| o.passed).count(), outcomes.len());
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
