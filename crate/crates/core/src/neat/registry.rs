use std::collections::HashMap;

use super::genome::Genome;

/// Result of splitting a connection: the new node and its two connections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub node: u64,
    pub in_innovation: u64,
    pub out_innovation: u64,
}

/// Hands out innovation numbers and hidden-node keys.
///
/// The signature caches are per generation; counters only ever grow.
#[derive(Debug, Clone)]
pub struct InnovationRegistry {
    next_innovation: u64,
    next_node: u64,
    connections: HashMap<(u64, u64), u64>,
    splits: HashMap<u64, Split>,
}

impl InnovationRegistry {
    pub fn new(first_hidden_key: u64) -> Self {
        Self {
            next_innovation: 1,
            next_node: first_hidden_key,
            connections: HashMap::new(),
            splits: HashMap::new(),
        }
    }

    /// A registry whose counters continue past every marker used by `genomes`.
    pub fn resume<'a>(first_hidden_key: u64, genomes: impl IntoIterator<Item = &'a Genome>) -> Self {
        let mut r = Self::new(first_hidden_key);
        for g in genomes {
            if let Some(&k) = g.nodes.keys().next_back() {
                r.next_node = r.next_node.max(k + 1);
            }
            if let Some(&i) = g.connections.keys().next_back() {
                r.next_innovation = r.next_innovation.max(i + 1);
            }
        }
        r
    }

    /// Innovation number for the connection signature `in_node -> out_node`.
    pub fn connection(&mut self, in_node: u64, out_node: u64) -> u64 {
        if let Some(&i) = self.connections.get(&(in_node, out_node)) {
            return i;
        }
        let i = self.fresh_innovation();
        self.connections.insert((in_node, out_node), i);
        i
    }

    /// Node and innovations for splitting connection `innovation` (`in_node -> out_node`).
    pub fn split(&mut self, innovation: u64, in_node: u64, out_node: u64) -> Split {
        if let Some(&s) = self.splits.get(&innovation) {
            return s;
        }
        let s = self.fresh_split(in_node, out_node);
        self.splits.insert(innovation, s);
        s
    }

    /// Uncached split, for genomes that already hold the cached node.
    pub fn fresh_split(&mut self, in_node: u64, out_node: u64) -> Split {
        let node = self.next_node;
        self.next_node += 1;
        let in_innovation = self.fresh_innovation();
        let out_innovation = self.fresh_innovation();
        self.connections.insert((in_node, node), in_innovation);
        self.connections.insert((node, out_node), out_innovation);
        Split { node, in_innovation, out_innovation }
    }

    fn fresh_innovation(&mut self) -> u64 {
        let i = self.next_innovation;
        self.next_innovation += 1;
        i
    }

    /// Forgets this generation's signatures.
    pub fn new_generation(&mut self) {
        self.connections.clear();
        self.splits.clear();
    }

    pub fn next_innovation(&self) -> u64 {
        self.next_innovation
    }

    pub fn next_node(&self) -> u64 {
        self.next_node
    }
}
