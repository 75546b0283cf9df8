use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::config::{Activation, NeatConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub key: u64,
    pub kind: NodeKind,
    pub bias: f64,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub in_node: u64,
    pub out_node: u64,
    pub weight: f64,
    pub enabled: bool,
    pub innovation: u64,
}

/// Node genes keyed by node key, connection genes keyed by innovation number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub key: u64,
    pub nodes: BTreeMap<u64, NodeGene>,
    pub connections: BTreeMap<u64, ConnectionGene>,
    pub fitness: Option<f64>,
}

impl Genome {
    /// Input and output nodes only, no connections.
    pub fn bare(key: u64, cfg: &NeatConfig) -> Self {
        let mut nodes = BTreeMap::new();
        for k in 0..cfg.num_inputs as u64 {
            nodes.insert(
                k,
                NodeGene { key: k, kind: NodeKind::Input, bias: 0.0, activation: cfg.activation },
            );
        }
        for i in 0..cfg.num_outputs as u64 {
            let k = cfg.first_output_key() + i;
            nodes.insert(
                k,
                NodeGene { key: k, kind: NodeKind::Output, bias: 0.0, activation: cfg.activation },
            );
        }
        Self { key, nodes, connections: BTreeMap::new(), fitness: None }
    }

    pub fn add_connection(&mut self, in_node: u64, out_node: u64, weight: f64, innovation: u64) {
        self.connections.insert(
            innovation,
            ConnectionGene { in_node, out_node, weight, enabled: true, innovation },
        );
    }

    pub fn input_keys(&self) -> Vec<u64> {
        self.keys_of(NodeKind::Input)
    }

    pub fn output_keys(&self) -> Vec<u64> {
        self.keys_of(NodeKind::Output)
    }

    pub fn hidden_keys(&self) -> Vec<u64> {
        self.keys_of(NodeKind::Hidden)
    }

    fn keys_of(&self, kind: NodeKind) -> Vec<u64> {
        self.nodes.values().filter(|n| n.kind == kind).map(|n| n.key).collect()
    }

    pub fn has_edge(&self, in_node: u64, out_node: u64) -> bool {
        self.connections
            .values()
            .any(|c| c.in_node == in_node && c.out_node == out_node)
    }

    pub fn enabled_count(&self) -> usize {
        self.connections.values().filter(|c| c.enabled).count()
    }

    /// Whether adding the enabled edge `from -> to` would close a cycle.
    pub fn creates_cycle(&self, from: u64, to: u64) -> bool {
        if from == to {
            return true;
        }
        let mut adj: HashMap<u64, Vec<u64>> = HashMap::new();
        for c in self.connections.values().filter(|c| c.enabled) {
            adj.entry(c.in_node).or_default().push(c.out_node);
        }
        reaches(&adj, to, from)
    }

    /// Disables enabled connections, in innovation order, that would close a cycle.
    pub(crate) fn break_cycles(&mut self) {
        let mut adj: HashMap<u64, Vec<u64>> = HashMap::new();
        for c in self.connections.values_mut() {
            if !c.enabled {
                continue;
            }
            if c.in_node == c.out_node || reaches(&adj, c.out_node, c.in_node) {
                c.enabled = false;
            } else {
                adj.entry(c.in_node).or_default().push(c.out_node);
            }
        }
    }

    /// Checks referential integrity, unique endpoints and acyclicity.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (&innov, c) in &self.connections {
            if innov != c.innovation {
                return Err(Error::InvalidInput(format!(
                    "genome {}: connection stored under {innov} carries innovation {}",
                    self.key, c.innovation
                )));
            }
            for n in [c.in_node, c.out_node] {
                if !self.nodes.contains_key(&n) {
                    return Err(Error::DanglingNode { genome: self.key, node: n });
                }
            }
            if c.in_node == c.out_node {
                return Err(Error::Cycle(self.key));
            }
            if self.nodes[&c.out_node].kind == NodeKind::Input {
                return Err(Error::InvalidInput(format!(
                    "genome {}: connection {innov} targets input node {}",
                    self.key, c.out_node
                )));
            }
            if !seen.insert((c.in_node, c.out_node)) {
                return Err(Error::InvalidInput(format!(
                    "genome {}: duplicate connection {} -> {}",
                    self.key, c.in_node, c.out_node
                )));
            }
        }
        for (&k, n) in &self.nodes {
            if k != n.key {
                return Err(Error::InvalidInput(format!(
                    "genome {}: node stored under {k} carries key {}",
                    self.key, n.key
                )));
            }
        }
        if !is_acyclic(self) {
            return Err(Error::Cycle(self.key));
        }
        Ok(())
    }
}

fn reaches(adj: &HashMap<u64, Vec<u64>>, from: u64, target: u64) -> bool {
    let mut stack = vec![from];
    let mut seen = HashSet::new();
    while let Some(n) = stack.pop() {
        if n == target {
            return true;
        }
        if seen.insert(n) {
            if let Some(next) = adj.get(&n) {
                stack.extend(next.iter().copied());
            }
        }
    }
    false
}

/// Kahn's algorithm over enabled connections.
pub(crate) fn is_acyclic(g: &Genome) -> bool {
    let mut indeg: HashMap<u64, usize> = g.nodes.keys().map(|&k| (k, 0)).collect();
    let mut adj: HashMap<u64, Vec<u64>> = HashMap::new();
    for c in g.connections.values().filter(|c| c.enabled) {
        *indeg.entry(c.out_node).or_default() += 1;
        indeg.entry(c.in_node).or_default();
        adj.entry(c.in_node).or_default().push(c.out_node);
    }
    let mut ready: Vec<u64> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&k, _)| k).collect();
    let mut visited = 0;
    while let Some(n) = ready.pop() {
        visited += 1;
        for &m in adj.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(&m).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(m);
            }
        }
    }
    visited == indeg.len()
}
