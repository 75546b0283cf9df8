//! CSV files written by the experiment runs and read back by the plotter.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use autodrive_core::neat::GenerationStats;
use autodrive_core::qlearn::EpisodeRecord;
use serde::{Deserialize, Serialize};

pub const EPISODE_COLUMNS: [&str; 9] =
    ["episode", "total_reward", "steps", "distance", "checkpoints_hit", "laps", "epsilon", "lr", "terminal"];
pub const BLOCK_COLUMNS: [&str; 4] = ["block", "first_episode", "last_episode", "mean_reward"];
pub const GENERATION_COLUMNS: [&str; 4] = ["generation", "best_fitness", "mean_fitness", "species_count"];
pub const SPECIES_COLUMNS: [&str; 5] = ["generation", "species_id", "size", "best_fitness", "stagnation"];

/// Episodes per averaged block.
pub const BLOCK: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub block: usize,
    pub first_episode: usize,
    pub last_episode: usize,
    pub mean_reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub species_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRow {
    pub generation: usize,
    pub species_id: u64,
    pub size: usize,
    pub best_fitness: f64,
    pub stagnation: usize,
}

/// Means of consecutive, non-overlapping blocks of `BLOCK` episodes. A
/// trailing partial block is dropped.
pub fn block_means(records: &[EpisodeRecord]) -> Vec<BlockRow> {
    records
        .chunks_exact(BLOCK)
        .enumerate()
        .map(|(block, chunk)| BlockRow {
            block,
            first_episode: chunk[0].episode,
            last_episode: chunk[BLOCK - 1].episode,
            mean_reward: chunk.iter().map(|r| r.total_reward).sum::<f64>() / BLOCK as f64,
        })
        .collect()
}

pub fn generation_rows(stats: &[GenerationStats]) -> Vec<GenerationRow> {
    stats
        .iter()
        .map(|s| GenerationRow {
            generation: s.generation,
            best_fitness: s.best_fitness,
            mean_fitness: s.mean_fitness,
            species_count: s.species_count,
        })
        .collect()
}

pub fn species_rows(stats: &[GenerationStats]) -> Vec<SpeciesRow> {
    stats
        .iter()
        .flat_map(|s| {
            s.species.iter().map(move |sp| SpeciesRow {
                generation: s.generation,
                species_id: sp.species_id,
                size: sp.size,
                best_fitness: sp.best_fitness,
                stagnation: sp.stagnation,
            })
        })
        .collect()
}

/// Writes `rows` with the given header; the header is written even when
/// there are no rows.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    drop(w);
    // Re-read to make sure what went out matches the schema.
    let table = Table::read(path)?;
    if table.headers != header {
        bail!("{}: wrote columns {:?}, expected {:?}", path.display(), table.headers, header);
    }
    if table.len() != rows.len() {
        bail!("{}: wrote {} rows, expected {}", path.display(), table.len(), rows.len());
    }
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

/// A CSV file as raw string columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let headers = r.headers()?.iter().map(str::to_owned).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_owned).collect()))
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("parsing {}", path.display()))?;
        Ok(Self { headers, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("missing column {name:?}"))
    }

    /// A column parsed as numbers.
    pub fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(n, r)| {
                r[i].parse::<f64>()
                    .with_context(|| format!("row {}: column {name:?} is not a number: {:?}", n + 1, r[i]))
            })
            .collect()
    }

    /// `value` grouped by `key`, each group in file order.
    pub fn grouped(&self, key: &str, x: &str, value: &str) -> Result<BTreeMap<u64, Vec<(f64, f64)>>> {
        let (ks, xs, vs) = (self.numbers(key)?, self.numbers(x)?, self.numbers(value)?);
        let mut out: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
        for ((k, x), v) in ks.into_iter().zip(xs).zip(vs) {
            out.entry(k as u64).or_default().push((x, v));
        }
        Ok(out)
    }
}
