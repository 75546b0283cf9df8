use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::NeatConfig;
use super::genome::{Genome, NodeGene, NodeKind};
use super::registry::InnovationRegistry;

/// Probability that a gene disabled in either parent stays disabled.
pub const REDISABLE_PROB: f64 = 0.75;

/// Attempts made by [`mutate_add_connection`] before giving up.
pub const ADD_CONNECTION_ATTEMPTS: usize = 20;

/// Child of `fitter` and `other`, keyed `child_key`.
///
/// Matching genes come from either parent with equal odds, disjoint and
/// excess genes from `fitter` only. Node genes follow the same rule and are
/// then completed so every connection endpoint exists.
pub fn crossover<R: Rng + ?Sized>(fitter: &Genome, other: &Genome, child_key: u64, rng: &mut R) -> Genome {
    let mut connections = BTreeMap::new();
    for (&innov, a) in &fitter.connections {
        let mut gene = match other.connections.get(&innov) {
            Some(b) => {
                let mut g = if rng.random_bool(0.5) { a.clone() } else { b.clone() };
                if !a.enabled || !b.enabled {
                    g.enabled = !rng.random_bool(REDISABLE_PROB);
                }
                g
            }
            None => a.clone(),
        };
        gene.innovation = innov;
        connections.insert(innov, gene);
    }

    let mut nodes = BTreeMap::new();
    for (&k, a) in &fitter.nodes {
        let gene = match other.nodes.get(&k) {
            Some(b) if rng.random_bool(0.5) => b.clone(),
            _ => a.clone(),
        };
        nodes.insert(k, gene);
    }
    for c in connections.values() {
        for n in [c.in_node, c.out_node] {
            if let (Entry::Vacant(slot), Some(g)) = (nodes.entry(n), other.nodes.get(&n)) {
                slot.insert(g.clone());
            }
        }
    }

    let mut child = Genome { key: child_key, nodes, connections, fitness: None };
    // Parents can split the same connection through different nodes, so a
    // mixed child may close a loop that neither parent had.
    child.break_cycles();
    child
}

/// Splits a random enabled connection `u -> v` into `u -> n -> v`.
pub fn mutate_add_node<R: Rng + ?Sized>(
    g: &mut Genome,
    cfg: &NeatConfig,
    rng: &mut R,
    registry: &mut InnovationRegistry,
) {
    let enabled: Vec<u64> = g.connections.values().filter(|c| c.enabled).map(|c| c.innovation).collect();
    let Some(&innov) = enabled.choose(rng) else {
        return;
    };
    let conn = g.connections.get_mut(&innov).unwrap();
    conn.enabled = false;
    let (u, v, w) = (conn.in_node, conn.out_node, conn.weight);

    let mut split = registry.split(innov, u, v);
    if g.nodes.contains_key(&split.node)
        || g.connections.contains_key(&split.in_innovation)
        || g.connections.contains_key(&split.out_innovation)
    {
        split = registry.fresh_split(u, v);
    }
    g.nodes.insert(
        split.node,
        NodeGene { key: split.node, kind: NodeKind::Hidden, bias: 0.0, activation: cfg.activation },
    );
    g.add_connection(u, split.node, 1.0, split.in_innovation);
    g.add_connection(split.node, v, w, split.out_innovation);
}

/// Removes a random hidden node together with its connections.
pub fn mutate_delete_node<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R) {
    let hidden = g.hidden_keys();
    let Some(&n) = hidden.choose(rng) else {
        return;
    };
    g.nodes.remove(&n);
    g.connections.retain(|_, c| c.in_node != n && c.out_node != n);
}

/// Adds a connection between a random node pair that keeps the graph acyclic.
pub fn mutate_add_connection<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R, registry: &mut InnovationRegistry) {
    let sources: Vec<u64> = g.nodes.keys().copied().collect();
    let targets: Vec<u64> = g.nodes.values().filter(|n| n.kind != NodeKind::Input).map(|n| n.key).collect();
    if targets.is_empty() {
        return;
    }
    for _ in 0..ADD_CONNECTION_ATTEMPTS {
        let u = *sources.choose(rng).unwrap();
        let v = *targets.choose(rng).unwrap();
        if u == v || g.has_edge(u, v) || g.creates_cycle(u, v) {
            continue;
        }
        let innov = registry.connection(u, v);
        if g.connections.contains_key(&innov) {
            continue;
        }
        g.add_connection(u, v, rng.random_range(-1.0..=1.0), innov);
        return;
    }
}

/// Removes a uniformly chosen connection gene.
pub fn mutate_delete_connection<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R) {
    let keys: Vec<u64> = g.connections.keys().copied().collect();
    if let Some(k) = keys.choose(rng) {
        g.connections.remove(k);
    }
}

fn mutate_value<R: Rng + ?Sized>(v: &mut f64, cfg: &NeatConfig, noise: &Normal<f64>, rng: &mut R) {
    if !rng.random_bool(cfg.weight_mutate_rate) {
        return;
    }
    if rng.random_bool(cfg.weight_replace_rate) {
        *v = rng.random_range(-1.0..=1.0);
    } else {
        *v += noise.sample(rng);
    }
}

/// Perturbs weights and non-input biases and resamples activations.
pub fn mutate_weights_and_activation<R: Rng + ?Sized>(g: &mut Genome, cfg: &NeatConfig, rng: &mut R) {
    let noise = Normal::new(0.0, cfg.weight_perturb_power).expect("validated perturb power");
    for c in g.connections.values_mut() {
        mutate_value(&mut c.weight, cfg, &noise, rng);
    }
    for n in g.nodes.values_mut().filter(|n| n.kind != NodeKind::Input) {
        mutate_value(&mut n.bias, cfg, &noise, rng);
        if rng.random_bool(cfg.activation_mutate_rate) {
            n.activation = *cfg.activation_options.choose(rng).unwrap();
        }
    }
}

/// One round of every mutation, each structural one at its configured rate.
pub fn mutate<R: Rng + ?Sized>(g: &mut Genome, cfg: &NeatConfig, rng: &mut R, registry: &mut InnovationRegistry) {
    if rng.random_bool(cfg.node_add_prob) {
        mutate_add_node(g, cfg, rng, registry);
    }
    if rng.random_bool(cfg.node_delete_prob) {
        mutate_delete_node(g, rng);
    }
    if rng.random_bool(cfg.conn_add_prob) {
        mutate_add_connection(g, rng, registry);
    }
    if rng.random_bool(cfg.conn_delete_prob) {
        mutate_delete_connection(g, rng);
    }
    mutate_weights_and_activation(g, cfg, rng);
}

