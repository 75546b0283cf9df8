//! Side-by-side report of Q-learning and NEAT run directories.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::config::Algorithm;
use crate::experiment::{expect_algorithm, load_timing, Summary, Timing};
use crate::records::write_csv;

pub const REPORT_COLUMNS: [&str; 9] = [
    "map",
    "algorithm",
    "seed",
    "q_eval_mean_reward",
    "q_lap_rate",
    "q_all_checkpoints_rate",
    "neat_best_fitness",
    "neat_completes_lap",
    "train_seconds",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub map: String,
    pub algorithm: String,
    pub seed: u64,
    pub q_eval_mean_reward: Option<f64>,
    pub q_lap_rate: Option<f64>,
    pub q_all_checkpoints_rate: Option<f64>,
    pub neat_best_fitness: Option<f64>,
    pub neat_completes_lap: Option<bool>,
    pub train_seconds: Option<f64>,
}

struct Run {
    summary: Summary,
    timing: Option<Timing>,
}

fn load_runs(paths: &[PathBuf], algorithm: Algorithm) -> Result<BTreeMap<String, Run>> {
    let mut out = BTreeMap::new();
    for p in paths {
        let summary = Summary::load(p)?;
        expect_algorithm(&summary, algorithm, p)?;
        let dir = if p.is_dir() { p.clone() } else { p.parent().map(Path::to_path_buf).unwrap_or_default() };
        let timing = load_timing(&dir).ok();
        let map = summary.map().to_owned();
        if out.insert(map.clone(), Run { summary, timing }).is_some() {
            bail!("two {algorithm:?} summaries for map {map:?}");
        }
    }
    Ok(out)
}

/// Builds the report rows, one per (map, algorithm, seed), sorted.
pub fn report_rows(q_runs: &[PathBuf], neat_runs: &[PathBuf]) -> Result<Vec<ReportRow>> {
    if q_runs.is_empty() {
        bail!("no Q-learning summary given");
    }
    if neat_runs.is_empty() {
        bail!("no NEAT summary given");
    }
    let q = load_runs(q_runs, Algorithm::Q)?;
    let neat = load_runs(neat_runs, Algorithm::Neat)?;
    let qm: BTreeSet<_> = q.keys().collect();
    let nm: BTreeSet<_> = neat.keys().collect();
    if qm != nm {
        bail!("map sets differ: Q has {qm:?}, NEAT has {nm:?}");
    }
    let mut rows = Vec::new();
    for (map, run) in q.iter().chain(neat.iter()) {
        let secs = |seed: u64| run.timing.as_ref().and_then(|t| t.get(&seed).copied());
        match &run.summary {
            Summary::Q { seeds, .. } => rows.extend(seeds.iter().map(|s| ReportRow {
                map: map.clone(),
                algorithm: "q".into(),
                seed: s.seed,
                q_eval_mean_reward: Some(s.eval.mean_reward),
                q_lap_rate: Some(s.eval.lap_rate),
                q_all_checkpoints_rate: Some(s.eval.all_checkpoints_rate),
                neat_best_fitness: None,
                neat_completes_lap: None,
                train_seconds: secs(s.seed),
            })),
            Summary::Neat { seeds, .. } => rows.extend(seeds.iter().map(|s| ReportRow {
                map: map.clone(),
                algorithm: "neat".into(),
                seed: s.seed,
                q_eval_mean_reward: None,
                q_lap_rate: None,
                q_all_checkpoints_rate: None,
                neat_best_fitness: Some(s.best_fitness),
                neat_completes_lap: Some(s.completes_lap),
                train_seconds: secs(s.seed),
            })),
        }
    }
    rows.sort_by(|a, b| (&a.map, &a.algorithm, a.seed).cmp(&(&b.map, &b.algorithm, b.seed)));
    Ok(rows)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn fmt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

/// Human-readable per-map summary followed by the per-seed breakdown.
pub fn render_text(rows: &[ReportRow]) -> String {
    let maps: BTreeSet<&str> = rows.iter().map(|r| r.map.as_str()).collect();
    let mut s = String::new();
    let _ = writeln!(s, "{:<18} {:>12} {:>8} {:>12} {:>9} {:>10} {:>10}", "map", "q_reward", "q_laps", "neat_fitness", "neat_laps", "q_secs", "neat_secs");
    for map in maps {
        let of = |alg: &'static str| rows.iter().filter(move |r| r.map == map && r.algorithm == alg);
        let line = format!(
            "{:<18} {:>12} {:>8} {:>12} {:>9} {:>10} {:>10}",
            map,
            fmt(mean(of("q").filter_map(|r| r.q_eval_mean_reward))),
            fmt(mean(of("q").filter_map(|r| r.q_lap_rate))),
            fmt(mean(of("neat").filter_map(|r| r.neat_best_fitness))),
            fmt(mean(of("neat").filter_map(|r| r.neat_completes_lap.map(|b| b as u8 as f64)))),
            fmt(mean(of("q").filter_map(|r| r.train_seconds))),
            fmt(mean(of("neat").filter_map(|r| r.train_seconds))),
        );
        let _ = writeln!(s, "{line}");
    }
    let _ = writeln!(s, "\nper seed:");
    for r in rows {
        let detail = match r.algorithm.as_str() {
            "q" => format!(
                "eval_mean_reward={} lap_rate={} all_checkpoints_rate={}",
                fmt(r.q_eval_mean_reward),
                fmt(r.q_lap_rate),
                fmt(r.q_all_checkpoints_rate)
            ),
            _ => format!(
                "best_fitness={} completes_lap={}",
                fmt(r.neat_best_fitness),
                r.neat_completes_lap.map_or("-".into(), |b| b.to_string())
            ),
        };
        let _ = writeln!(s, "  {} {} seed={} {} train_seconds={}", r.map, r.algorithm, r.seed, detail, fmt(r.train_seconds));
    }
    s
}

/// Writes `report.csv` and `report.txt` into `out`.
pub fn compare(q_runs: &[PathBuf], neat_runs: &[PathBuf], out: &Path) -> Result<Vec<ReportRow>> {
    let rows = report_rows(q_runs, neat_runs)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(&out.join("report.csv"), &REPORT_COLUMNS, &rows)?;
    let txt = out.join("report.txt");
    std::fs::write(&txt, render_text(&rows)).with_context(|| format!("writing {}", txt.display()))?;
    Ok(rows)
}
