mod analyze;
mod error;
mod gen;
mod run;
mod solve;
mod transform;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::run::{Run, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "causal-forge", version, about = "Causal-graph planning instances: generate, analyze, transform, solve")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pretty-print reports.
    #[arg(long, global = true)]
    human: bool,
    /// Worker threads for per-component solving.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output directory for generated files and the run manifest.
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate gadgets, graphs and compiled instances.
    #[command(subcommand)]
    Gen(gen::GenCommand),
    /// Report on an instance, a graph or a directory of graphs.
    Analyze(analyze::AnalyzeArgs),
    /// Solve an instance, validate a plan, or cross-check a gadget against SAT.
    Solve(solve::SolveArgs),
    /// Apply a solvability-preserving transformation.
    #[command(subcommand)]
    Transform(transform::TransformCommand),
    /// Re-run the command recorded in a manifest and compare its outputs.
    Replay {
        manifest: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Analyze(_) => "analyze",
            Command::Solve(_) => "solve",
            Command::Transform(_) => "transform",
            Command::Replay { .. } => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Base3,
    Split2,
}

impl From<Variant> for causal_forge::sat::FenceVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Base3 => causal_forge::sat::FenceVariant::Base3,
            Variant::Split2 => causal_forge::sat::FenceVariant::Split2,
        }
    }
}

/// Prints a report: compact JSON, or `human` text (pretty JSON by default).
pub fn emit<T: Serialize>(run: &Run, report: &T, human: Option<String>) {
    if run.human {
        match human {
            Some(text) => println!("{text}"),
            None => println!("{}", serde_json::to_string_pretty(report).expect("serializable")),
        }
    } else {
        println!("{}", serde_json::to_string(report).expect("serializable"));
    }
}

fn execute(args: Vec<String>) -> Result<()> {
    let cli = Cli::try_parse_from(&args).map_err(|e| {
        if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
            let _ = e.print();
            std::process::exit(0);
        }
        CliError::Usage(e.render().to_string())
    })?;
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let name = cli.command.name();
    let mut run = Run::new(cli.seed, cli.human, cli.jobs, cli.out);
    match cli.command {
        Command::Gen(c) => gen::run(&mut run, c)?,
        Command::Analyze(a) => analyze::run(&mut run, a)?,
        Command::Solve(a) => solve::run(&mut run, a)?,
        Command::Transform(c) => transform::run(&mut run, c)?,
        Command::Replay { manifest } => return replay(&mut run, &manifest),
    }
    run.finish(name, args[1..].to_vec())
}

fn replay(run: &mut Run, path: &std::path::Path) -> Result<()> {
    let text = run.read(path)?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| CliError::input(path, e))?;
    let stale = run::changed_files(&manifest.inputs);
    if !stale.is_empty() {
        return Err(CliError::Failure(format!("inputs changed since the recorded run: {}", stale.join(", "))));
    }
    let mut argv = vec!["causal-forge".to_string()];
    argv.extend(manifest.arguments.iter().cloned());
    // the replayed command prints its own report
    execute(argv)?;
    let changed = run::changed_files(&manifest.outputs);
    #[derive(Serialize)]
    struct Replayed {
        reproduced: bool,
        changed: Vec<String>,
    }
    let report = Replayed {
        reproduced: changed.is_empty(),
        changed,
    };
    let human = if report.reproduced {
        "reproduced".to_string()
    } else {
        format!("outputs differ: {}", report.changed.join(", "))
    };
    emit(run, &report, Some(human));
    if report.reproduced {
        Ok(())
    } else {
        Err(CliError::Failure("replay did not reproduce the recorded outputs".into()))
    }
}

fn main() -> ExitCode {
    match execute(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            eprint!("{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(e.exit_code())
        }
    }
}
