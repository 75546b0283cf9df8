use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::config::Activation;
use super::genome::{Genome, NodeKind};
use crate::error::{Error, Result};
use crate::sim::Action;

/// Action chosen by each network output, in output-key order.
pub const OUTPUT_ACTIONS: [Action; 4] = [Action::TurnLeft, Action::TurnRight, Action::SpeedUp, Action::SlowDown];

#[derive(Debug, Clone, PartialEq)]
struct NodeEval {
    slot: usize,
    bias: f64,
    activation: Activation,
    incoming: Vec<(usize, f64)>,
}

/// Feed-forward network compiled from a genome's enabled connections.
#[derive(Debug, Clone, PartialEq)]
pub struct Phenotype {
    inputs: Vec<u64>,
    outputs: Vec<u64>,
    output_slots: Vec<usize>,
    plan: Vec<NodeEval>,
    slots: usize,
}

/// Compiles `g` into an evaluation plan.
///
/// Only nodes that feed an output are evaluated. Outputs with no incoming
/// path still emit `activation(bias)`.
pub fn build_phenotype(g: &Genome) -> Result<Phenotype> {
    let inputs = g.input_keys();
    let outputs = g.output_keys();
    let enabled: Vec<_> = g
        .connections
        .values()
        .filter(|c| c.enabled && g.nodes.contains_key(&c.in_node) && g.nodes.contains_key(&c.out_node))
        .collect();

    // Walk backwards from the outputs to find the nodes that matter.
    let mut required: BTreeSet<u64> = outputs.iter().copied().collect();
    let mut frontier: Vec<u64> = outputs.clone();
    while let Some(n) = frontier.pop() {
        for c in enabled.iter().filter(|c| c.out_node == n) {
            if g.nodes[&c.in_node].kind != NodeKind::Input && required.insert(c.in_node) {
                frontier.push(c.in_node);
            }
        }
    }

    let mut slot_of: BTreeMap<u64, usize> = BTreeMap::new();
    for &k in &inputs {
        let s = slot_of.len();
        slot_of.insert(k, s);
    }

    let mut done: HashSet<u64> = inputs.iter().copied().collect();
    let mut pending: Vec<u64> = required.iter().copied().collect();
    let mut plan = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let (ready, rest): (Vec<u64>, Vec<u64>) = pending.iter().partition(|&&n| {
            enabled.iter().filter(|c| c.out_node == n).all(|c| done.contains(&c.in_node))
        });
        if ready.is_empty() {
            return Err(Error::Cycle(g.key));
        }
        for n in ready {
            let s = slot_of.len();
            slot_of.insert(n, s);
            done.insert(n);
            let node = &g.nodes[&n];
            let incoming = enabled
                .iter()
                .filter(|c| c.out_node == n)
                .filter_map(|c| slot_of.get(&c.in_node).map(|&src| (src, c.weight)))
                .collect();
            plan.push(NodeEval { slot: s, bias: node.bias, activation: node.activation, incoming });
        }
        pending = rest;
    }

    let output_slots = outputs.iter().map(|k| slot_of[k]).collect();
    Ok(Phenotype { slots: slot_of.len(), inputs, outputs, output_slots, plan })
}

impl Phenotype {
    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_keys(&self) -> &[u64] {
        &self.outputs
    }

    /// Number of non-input nodes evaluated per activation.
    pub fn plan_len(&self) -> usize {
        self.plan.len()
    }

    pub fn activate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::ShapeMismatch(format!(
                "network takes {} inputs, got {}",
                self.inputs.len(),
                inputs.len()
            )));
        }
        let mut values = vec![0.0; self.slots];
        values[..inputs.len()].copy_from_slice(inputs);
        for n in &self.plan {
            let sum: f64 = n.incoming.iter().map(|&(s, w)| values[s] * w).sum();
            values[n.slot] = n.activation.apply(n.bias + sum);
        }
        Ok(self.output_slots.iter().map(|&s| values[s]).collect())
    }
}

/// Argmax over the four outputs; ties go to the lowest index.
pub fn action_from_outputs(outputs: &[f64]) -> Result<Action> {
    if outputs.len() != OUTPUT_ACTIONS.len() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} outputs, got {}",
            OUTPUT_ACTIONS.len(),
            outputs.len()
        )));
    }
    let mut best = 0;
    for (i, &v) in outputs.iter().enumerate().skip(1) {
        if v > outputs[best] {
            best = i;
        }
    }
    Ok(OUTPUT_ACTIONS[best])
}
