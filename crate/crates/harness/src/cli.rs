//! Command-line interface.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use autodrive_core::neat::load_genome;
use clap::{Args, Parser, Subcommand};

use crate::compare::compare;
use crate::config::{Algorithm, ExperimentConfig};
use crate::experiment::{eval_genome, eval_q, run_experiment};
use crate::maps::gen_maps;
use crate::plot::{render_file, PlotKind};

#[derive(Debug, Parser)]
#[command(name = "autodrive", version, about = "Train and compare Q-learning and NEAT drivers on 2D race tracks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed; repeat for several seeds.
    #[arg(long = "seed", global = true)]
    pub seeds: Vec<u64>,
    /// Archetype name or track path prefix.
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "AUTODRIVE_OUT", default_value = "runs")]
    pub out: PathBuf,
    /// Training episodes (Q-learning).
    #[arg(long, global = true)]
    pub episodes: Option<usize>,
    /// Generations (NEAT).
    #[arg(long, global = true)]
    pub generations: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the four archetype tracks as mask and meta pairs.
    GenMaps,
    /// Train and evaluate tabular Q-learning.
    TrainQ,
    /// Evaluate a saved Q-table.
    EvalQ {
        #[arg(long)]
        table: PathBuf,
    },
    /// Evolve NEAT controllers.
    TrainNeat,
    /// Re-drive a saved genome.
    EvalGenome {
        #[arg(long)]
        genome: PathBuf,
    },
    /// Render a CSV as an SVG chart.
    Plot {
        #[arg(long)]
        kind: PlotKind,
        #[arg(long)]
        input: PathBuf,
    },
    /// Compare Q-learning and NEAT run directories.
    Compare {
        #[arg(long = "q", required = true)]
        q_runs: Vec<PathBuf>,
        #[arg(long = "neat", required = true)]
        neat_runs: Vec<PathBuf>,
    },
}

impl clap::ValueEnum for PlotKind {
    fn value_variants<'a>() -> &'a [Self] {
        &PlotKind::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

impl Common {
    /// The config file (or defaults) with command-line overrides applied.
    pub fn experiment(&self, algorithm: Algorithm) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.algorithm = algorithm;
        if let Some(m) = &self.map {
            cfg.map = m.clone();
        }
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds.clone();
        }
        if let Some(e) = self.episodes {
            cfg.q.episodes_train = e;
        }
        if let Some(g) = self.generations {
            cfg.neat.generations = g;
        }
        if self.config.is_none() || cfg.output_dir.is_none() || self.out_given() {
            cfg.output_dir = Some(self.out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_given(&self) -> bool {
        self.out != Path::new("runs")
    }
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs"))
}

fn svg_target(out: &Path, kind: PlotKind) -> PathBuf {
    if out.extension().is_some_and(|e| e == "svg") {
        out.to_path_buf()
    } else {
        out.join(format!("{}.svg", kind.name()))
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    match &cli.command {
        Command::GenMaps => {
            let seed = match c.seeds.as_slice() {
                [] => ExperimentConfig::default().map_seed,
                [s] => *s,
                _ => bail!("gen-maps takes a single --seed"),
            };
            for p in gen_maps(&c.out, seed)? {
                emit(&p.display().to_string());
            }
        }
        Command::TrainQ | Command::TrainNeat => {
            let alg = if matches!(cli.command, Command::TrainQ) { Algorithm::Q } else { Algorithm::Neat };
            let cfg = c.experiment(alg)?;
            let out = out_dir(&cfg);
            let summary = run_experiment(&cfg, &out)?;
            emit(&serde_json::to_string_pretty(&summary)?);
        }
        Command::EvalQ { table } => {
            let cfg = c.experiment(Algorithm::Q)?;
            let stats = eval_q(&cfg, table, &out_dir(&cfg))?;
            emit(&serde_json::to_string_pretty(&stats)?);
        }
        Command::EvalGenome { genome } => {
            let cfg = c.experiment(Algorithm::Neat)?;
            let g = load_genome(genome)?;
            let result = eval_genome(&cfg, &g, &out_dir(&cfg))?;
            emit(&serde_json::to_string_pretty(&result)?);
        }
        Command::Plot { kind, input } => {
            let target = svg_target(&c.out, *kind);
            if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            render_file(*kind, input, &target)?;
            emit(&target.display().to_string());
        }
        Command::Compare { q_runs, neat_runs } => {
            let rows = compare(q_runs, neat_runs, &c.out)?;
            emit(&format!("{} rows written to {}", rows.len(), c.out.join("report.csv").display()));
        }
    }
    Ok(())
}

/// Parses `args` and runs the command. Usage errors exit with 2, runtime
/// errors with 1.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Prints a line to stdout, ignoring a closed pipe.
fn emit(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{line}");
}
