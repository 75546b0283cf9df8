//! Seeded training and evaluation runs for both learners.
//!
//! A run directory holds `summary.json`, `timing.json` and one `seed-<n>/`
//! subdirectory per seed. Everything except `timing.json` is a pure function
//! of the config and seeds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use autodrive_core::neat::{evaluate_genome, run_neat, save_genome, DriveSummary, Genome};
use autodrive_core::par;
use autodrive_core::qlearn::{evaluate, train, EpisodeRecord, QTable};
use autodrive_core::sim::TrackMap;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, ExperimentConfig};
use crate::maps::resolve_map;
use crate::records::{
    block_means, generation_rows, species_rows, write_csv, BLOCK_COLUMNS, EPISODE_COLUMNS, GENERATION_COLUMNS,
    SPECIES_COLUMNS,
};

pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalStats {
    pub mean_reward: f64,
    pub max_reward: f64,
    /// Fraction of episodes that finished at least one lap.
    pub lap_rate: f64,
    /// Fraction of episodes that reached every checkpoint.
    pub all_checkpoints_rate: f64,
}

impl EvalStats {
    pub fn from_records(records: &[EpisodeRecord], checkpoints: usize) -> Self {
        let n = records.len().max(1) as f64;
        let rate = |f: &dyn Fn(&EpisodeRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / n;
        Self {
            mean_reward: records.iter().map(|r| r.total_reward).sum::<f64>() / n,
            max_reward: records.iter().map(|r| r.total_reward).fold(f64::NEG_INFINITY, f64::max),
            lap_rate: rate(&|r| r.laps >= 1),
            all_checkpoints_rate: rate(&|r| r.checkpoints_hit as usize >= checkpoints),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QSeedSummary {
    pub seed: u64,
    #[serde(flatten)]
    pub eval: EvalStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeatSeedSummary {
    pub seed: u64,
    pub best_fitness: f64,
    /// Whether the best genome finishes a lap on its training map.
    pub completes_lap: bool,
    pub best_distance: f64,
    pub best_mean_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum Summary {
    Q { map: String, episodes_train: usize, episodes_eval: usize, seeds: Vec<QSeedSummary> },
    Neat { map: String, generations: usize, population: usize, seeds: Vec<NeatSeedSummary> },
}

impl Summary {
    pub fn map(&self) -> &str {
        match self {
            Summary::Q { map, .. } | Summary::Neat { map, .. } => map,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Summary::Q { .. } => Algorithm::Q,
            Summary::Neat { .. } => Algorithm::Neat,
        }
    }

    /// Reads `summary.json` from a run directory or the file itself.
    pub fn load(path: &Path) -> Result<Self> {
        let file = if path.is_dir() { path.join(SUMMARY_FILE) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&file).with_context(|| format!("reading summary {}", file.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))
    }
}

/// Wall-clock training seconds per seed.
pub type Timing = BTreeMap<u64, f64>;

pub fn load_timing(run_dir: &Path) -> Result<Timing> {
    let file = run_dir.join(TIMING_FILE);
    let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let raw: BTreeMap<String, f64> = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
    raw.into_iter()
        .map(|(k, v)| Ok((k.parse().with_context(|| format!("{}: bad seed key {k:?}", file.display()))?, v)))
        .collect()
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_timing(out: &Path, timing: &Timing) -> Result<()> {
    let raw: BTreeMap<String, f64> = timing.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    write_json(&out.join(TIMING_FILE), &raw)
}

pub fn write_episodes(path: &Path, records: &[EpisodeRecord]) -> Result<()> {
    write_csv(path, &EPISODE_COLUMNS, records)
}

/// Runs the configured learner for every seed and writes the run directory.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Summary> {
    match cfg.algorithm {
        Algorithm::Q => run_q_experiment(cfg, out),
        Algorithm::Neat => run_neat_experiment(cfg, out),
    }
}

fn prepare(cfg: &ExperimentConfig, out: &Path) -> Result<TrackMap> {
    cfg.validate()?;
    let track = resolve_map(&cfg.map, cfg.map_seed)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    Ok(track)
}

pub fn run_q_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Summary> {
    let track = prepare(cfg, out)?;
    let results = par::map(&cfg.seeds, |&seed| -> Result<(QSeedSummary, f64)> {
        let dir = seed_dir(out, seed);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let qcfg = autodrive_core::qlearn::QConfig { seed, ..cfg.q.clone() };
        let started = Instant::now();
        let (table, records) = train(&track, &cfg.env, &qcfg)?;
        let seconds = started.elapsed().as_secs_f64();
        write_episodes(&dir.join("train.csv"), &records)?;
        write_csv(&dir.join("train_avg100.csv"), &BLOCK_COLUMNS, &block_means(&records))?;
        table.save(dir.join("qtable.bin"))?;
        let eval = evaluate(&table, &track, &cfg.env, &qcfg)?;
        write_episodes(&dir.join("eval.csv"), &eval)?;
        let stats = EvalStats::from_records(&eval, track.checkpoints.len());
        Ok((QSeedSummary { seed, eval: stats }, seconds))
    });
    let mut seeds = Vec::new();
    let mut timing = Timing::new();
    for (seed, r) in cfg.seeds.iter().zip(results) {
        let (s, t) = r.with_context(|| format!("seed {seed}"))?;
        seeds.push(s);
        timing.insert(*seed, t);
    }
    let summary = Summary::Q {
        map: track.name.clone(),
        episodes_train: cfg.q.episodes_train,
        episodes_eval: cfg.q.episodes_eval,
        seeds,
    };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    write_timing(out, &timing)?;
    Ok(summary)
}

/// Runs one evaluation of `genome` with a one-lap limit.
pub fn lap_check(genome: &Genome, track: &TrackMap, cfg: &ExperimentConfig) -> Result<DriveSummary> {
    Ok(evaluate_genome(genome, track, &cfg.env, 1)?)
}

pub fn run_neat_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Summary> {
    let track = prepare(cfg, out)?;
    let results = par::map(&cfg.seeds, |&seed| -> Result<(NeatSeedSummary, f64)> {
        let dir = seed_dir(out, seed);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let ncfg = autodrive_core::neat::NeatConfig { seed, ..cfg.neat.clone() };
        let started = Instant::now();
        let run = run_neat(&track, &ncfg, &cfg.env)?;
        let seconds = started.elapsed().as_secs_f64();
        write_csv(&dir.join("generations.csv"), &GENERATION_COLUMNS, &generation_rows(&run.stats))?;
        write_csv(&dir.join("species.csv"), &SPECIES_COLUMNS, &species_rows(&run.stats))?;
        save_genome(&run.best, dir.join("best_genome.json"))?;
        let lap = lap_check(&run.best, &track, cfg)?;
        let full = evaluate_genome(&run.best, &track, &cfg.env, ncfg.lap_limit)?;
        Ok((
            NeatSeedSummary {
                seed,
                best_fitness: run.best.fitness.unwrap_or(0.0),
                completes_lap: lap.laps >= 1,
                best_distance: full.distance,
                best_mean_speed: full.mean_speed,
            },
            seconds,
        ))
    });
    let mut seeds = Vec::new();
    let mut timing = Timing::new();
    for (seed, r) in cfg.seeds.iter().zip(results) {
        let (s, t) = r.with_context(|| format!("seed {seed}"))?;
        seeds.push(s);
        timing.insert(*seed, t);
    }
    let summary = Summary::Neat {
        map: track.name.clone(),
        generations: cfg.neat.generations,
        population: cfg.neat.population,
        seeds,
    };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    write_timing(out, &timing)?;
    Ok(summary)
}

/// Evaluates a saved Q-table and writes `eval.csv` into `out`.
pub fn eval_q(cfg: &ExperimentConfig, table: &Path, out: &Path) -> Result<EvalStats> {
    cfg.validate()?;
    let track = resolve_map(&cfg.map, cfg.map_seed)?;
    let q = QTable::load_expecting(table, cfg.q.buckets, cfg.q.action_set.len())?;
    let seed = cfg.seeds[0];
    let qcfg = autodrive_core::qlearn::QConfig { seed, ..cfg.q.clone() };
    let records = evaluate(&q, &track, &cfg.env, &qcfg)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_episodes(&out.join("eval.csv"), &records)?;
    let stats = EvalStats::from_records(&records, track.checkpoints.len());
    write_json(&out.join("eval_summary.json"), &stats)?;
    Ok(stats)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenomeEval {
    pub map: String,
    pub fitness: f64,
    pub distance: f64,
    pub mean_speed: f64,
    pub steps: u32,
    pub laps: u32,
    pub checkpoints_hit: u32,
    pub crashed: bool,
    pub completes_lap: bool,
}

/// Re-drives a saved genome and writes `genome_eval.json` into `out`.
pub fn eval_genome(cfg: &ExperimentConfig, genome: &Genome, out: &Path) -> Result<GenomeEval> {
    cfg.validate()?;
    let track = resolve_map(&cfg.map, cfg.map_seed)?;
    let full = evaluate_genome(genome, &track, &cfg.env, cfg.neat.lap_limit)?;
    let lap = lap_check(genome, &track, cfg)?;
    let result = GenomeEval {
        map: track.name.clone(),
        fitness: full.fitness(),
        distance: full.distance,
        mean_speed: full.mean_speed,
        steps: full.steps,
        laps: full.laps,
        checkpoints_hit: full.checkpoints_hit,
        crashed: full.crashed,
        completes_lap: lap.laps >= 1,
    };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("genome_eval.json"), &result)?;
    Ok(result)
}

/// Rejects a run directory whose summary was produced by the other learner.
pub fn expect_algorithm(summary: &Summary, algorithm: Algorithm, path: &Path) -> Result<()> {
    if summary.algorithm() != algorithm {
        bail!("{} holds a {:?} summary, expected {:?}", path.display(), summary.algorithm(), algorithm);
    }
    Ok(())
}
