//! `collide`: builds graph families, computes potentials and criterion scans,
//! runs collision simulations and experiments. Every run writes its outputs
//! and a `manifest.json` with digests into `--out`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 1 anything else (I/O).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod plot;

use clap::{Args, Parser, Subcommand};
use collide::experiments::{ExperimentConfig, Output, Overrides, RunManifest, RunOptions};
use collide::graph::DEFAULT_VERTEX_CAP;
use collide::par::Execution;
use collide::Error;
use commands::{BuildConfig, CollideConfig, CriterionConfig, ResistConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "collide",
    version,
    about = "Collision and Green-kernel computations on recurrent graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replicate count; overrides the config.
    #[arg(long, global = true)]
    replicates: Option<u64>,
    /// Worker threads (1 runs sequentially). Never changes numeric output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Largest region or sampled graph, in vertices.
    #[arg(long, global = true, default_value_t = DEFAULT_VERTEX_CAP)]
    cap_vertices: usize,
    /// Log-log slope below which a criterion scan is "bounded-ratio".
    #[arg(long, global = true)]
    slope_bounded: Option<f64>,
    /// Log-log slope above which a criterion scan is "growing-ratio".
    #[arg(long, global = true)]
    slope_growing: Option<f64>,
    /// Write full walk paths to paths.bin.
    #[arg(long, global = true)]
    dump_paths: bool,
    /// Write plot.py, which plots the CSV outputs with matplotlib.
    #[arg(long, global = true)]
    emit_plot_script: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a family (or a region of it) as graph JSON.
    Build { config: PathBuf },
    /// Green kernel and effective resistances of a finite region.
    Resist { config: PathBuf },
    /// Green-ratio criterion scan over growing regions.
    Criterion { config: PathBuf },
    /// Pair or triple collision counts.
    Collide { config: PathBuf },
    /// Run an experiment config.
    Experiment { config: PathBuf },
}

impl Command {
    fn name_and_path(&self) -> (&'static str, &PathBuf) {
        match self {
            Command::Build { config } => ("build", config),
            Command::Resist { config } => ("resist", config),
            Command::Criterion { config } => ("criterion", config),
            Command::Collide { config } => ("collide", config),
            Command::Experiment { config } => ("experiment", config),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config_error() {
        2
    } else if e.is_numerical_failure() {
        3
    } else {
        1
    }
}

fn prepare(
    command: &Command,
    text: &str,
    c: &Common,
) -> collide::Result<(
    serde_json::Value,
    u64,
    Box<dyn FnOnce(&RunOptions) -> collide::Result<Vec<Output>>>,
)> {
    macro_rules! staged {
        ($cfg:expr, $seed:expr) => {{
            let cfg = $cfg;
            let resolved = serde_json::to_value(&cfg)?;
            Ok((
                resolved,
                $seed(&cfg),
                Box::new(move |o: &RunOptions| cfg.run(o)),
            ))
        }};
    }
    match command {
        Command::Build { .. } => staged!(
            serde_json::from_str::<BuildConfig>(text)?.resolve(c.seed),
            |x: &BuildConfig| x.seed.unwrap_or_default()
        ),
        Command::Resist { .. } => staged!(
            serde_json::from_str::<ResistConfig>(text)?.resolve(c.seed),
            |x: &ResistConfig| x.seed.unwrap_or_default()
        ),
        Command::Criterion { .. } => staged!(
            serde_json::from_str::<CriterionConfig>(text)?.resolve(
                c.seed,
                c.slope_bounded,
                c.slope_growing
            ),
            |x: &CriterionConfig| x.seed.unwrap_or_default()
        ),
        Command::Collide { .. } => staged!(
            serde_json::from_str::<CollideConfig>(text)?.resolve(c.seed, c.replicates),
            |x: &CollideConfig| x.seed.unwrap_or_default()
        ),
        Command::Experiment { .. } => staged!(
            ExperimentConfig::from_json(text)?.resolve(Overrides {
                seed: c.seed,
                replicates: c.replicates,
            }),
            |x: &ExperimentConfig| x.seed()
        ),
    }
}

fn run(cli: Cli) -> collide::Result<RunManifest> {
    let (name, path) = cli.command.name_and_path();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidSpec(format!("cannot read config {}: {e}", path.display())))?;
    let c = &cli.common;
    if c.threads == Some(0) {
        return Err(Error::InvalidSpec("--threads must be at least 1".into()));
    }
    let opts = RunOptions {
        exec: Execution::from_threads(c.threads),
        vertex_cap: c.cap_vertices,
        dump_paths: c.dump_paths,
    };
    let (resolved, seed, job) = prepare(&cli.command, &text, c)?;
    let emit = c.emit_plot_script;
    RunManifest::record(name, &text, resolved, seed, &c.out, move || {
        let mut outputs = job(&opts)?;
        if emit {
            let csvs: Vec<&str> = outputs
                .iter()
                .map(|o| o.name.as_str())
                .filter(|n| n.ends_with(".csv"))
                .collect();
            let script = plot::plot_script(&csvs);
            outputs.push(Output::text(plot::SCRIPT_NAME, script));
        }
        Ok(outputs)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.common.out.clone();
    match run(cli) {
        Ok(m) => {
            for o in &m.outputs {
                println!("{}  {}", o.sha256, out.join(&o.path).display());
            }
            println!(
                "manifest: {}",
                out.join(collide::experiments::MANIFEST_FILE).display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
