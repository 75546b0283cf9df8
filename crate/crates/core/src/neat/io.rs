use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::NeatConfig;
use super::genome::{ConnectionGene, Genome, NodeGene};
use crate::error::{Error, Result};

/// On-disk genome layout: gene arrays sorted by key and innovation.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenomeFile {
    key: u64,
    fitness: Option<f64>,
    nodes: Vec<NodeGene>,
    connections: Vec<ConnectionGene>,
}

pub fn genome_to_json(g: &Genome) -> String {
    let file = GenomeFile {
        key: g.key,
        fitness: g.fitness,
        nodes: g.nodes.values().cloned().collect(),
        connections: g.connections.values().cloned().collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("genome serializes");
    s.push('\n');
    s
}

/// Parses and validates a genome; `path` only labels errors.
pub fn genome_from_json(text: &str, path: &Path) -> Result<Genome> {
    let file: GenomeFile = serde_json::from_str(text).map_err(|e| Error::malformed(path, e.to_string()))?;
    let mut g = Genome { key: file.key, nodes: Default::default(), connections: Default::default(), fitness: file.fitness };
    for n in file.nodes {
        if g.nodes.insert(n.key, n).is_some() {
            return Err(Error::malformed(path, "duplicate node key"));
        }
    }
    for c in file.connections {
        let innov = c.innovation;
        if g.connections.insert(innov, c).is_some() {
            return Err(Error::malformed(path, format!("duplicate innovation {innov}")));
        }
    }
    g.validate()?;
    Ok(g)
}

pub fn save_genome(g: &Genome, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, genome_to_json(g)).map_err(|e| Error::io(path, e))
}

pub fn load_genome(path: impl AsRef<Path>) -> Result<Genome> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    genome_from_json(&text, path)
}

/// Reads a NEAT config; absent fields take defaults, unknown fields are rejected.
pub fn load_neat_config(path: impl AsRef<Path>) -> Result<NeatConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg: NeatConfig = serde_json::from_str(&text).map_err(|e| Error::malformed(path, e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
