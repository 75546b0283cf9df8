use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitnessCriterion {
    Max,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeatConfig {
    pub population: usize,
    pub generations: usize,
    pub num_inputs: usize,
    pub num_outputs: usize,
    /// Activation given to new nodes.
    pub activation: Activation,
    /// Activations a node may switch to when its activation mutates.
    pub activation_options: Vec<Activation>,
    pub activation_mutate_rate: f64,
    pub node_add_prob: f64,
    pub node_delete_prob: f64,
    pub conn_add_prob: f64,
    pub conn_delete_prob: f64,
    pub weight_mutate_rate: f64,
    pub weight_perturb_power: f64,
    /// Share of weight mutations that redraw the weight instead of perturbing it.
    pub weight_replace_rate: f64,
    pub compat_threshold: f64,
    pub compat_coeff_disjoint: f64,
    pub compat_coeff_weight: f64,
    pub max_stagnation: usize,
    pub species_elitism: usize,
    pub population_elitism: usize,
    /// Fraction of each species, best first, eligible as parents.
    pub survival_threshold: f64,
    pub fitness_criterion: FitnessCriterion,
    pub species_fitness_criterion: FitnessCriterion,
    /// Laps after which a fitness evaluation stops early.
    pub lap_limit: u32,
    pub seed: u64,
}

impl Default for NeatConfig {
    fn default() -> Self {
        Self {
            population: 200,
            generations: 100,
            num_inputs: 5,
            num_outputs: 4,
            activation: Activation::Tanh,
            activation_options: vec![Activation::Tanh],
            activation_mutate_rate: 0.02,
            node_add_prob: 0.2,
            node_delete_prob: 0.2,
            conn_add_prob: 0.5,
            conn_delete_prob: 0.5,
            weight_mutate_rate: 0.8,
            weight_perturb_power: 0.5,
            weight_replace_rate: 0.1,
            compat_threshold: 3.0,
            compat_coeff_disjoint: 1.0,
            compat_coeff_weight: 0.5,
            max_stagnation: 10,
            species_elitism: 1,
            population_elitism: 2,
            survival_threshold: 0.2,
            fitness_criterion: FitnessCriterion::Max,
            species_fitness_criterion: FitnessCriterion::Max,
            lap_limit: 3,
            seed: 0,
        }
    }
}

impl NeatConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(Error::InvalidConfig(msg)) };
        for (name, p) in [
            ("activation_mutate_rate", self.activation_mutate_rate),
            ("node_add_prob", self.node_add_prob),
            ("node_delete_prob", self.node_delete_prob),
            ("conn_add_prob", self.conn_add_prob),
            ("conn_delete_prob", self.conn_delete_prob),
            ("weight_mutate_rate", self.weight_mutate_rate),
            ("weight_replace_rate", self.weight_replace_rate),
        ] {
            check((0.0..=1.0).contains(&p), format!("{name} must be a probability, got {p}"))?;
        }
        check(
            self.survival_threshold > 0.0 && self.survival_threshold <= 1.0,
            "survival_threshold must be in (0, 1]".into(),
        )?;
        check(self.num_inputs >= 1 && self.num_outputs >= 1, "need at least one input and one output".into())?;
        check(
            self.population >= 2 * self.population_elitism && self.population >= 1,
            format!(
                "population {} must be at least twice population_elitism {}",
                self.population, self.population_elitism
            ),
        )?;
        check(
            self.weight_perturb_power >= 0.0 && self.weight_perturb_power.is_finite(),
            "weight_perturb_power must be non-negative".into(),
        )?;
        check(self.compat_threshold > 0.0, "compat_threshold must be positive".into())?;
        check(!self.activation_options.is_empty(), "activation_options must not be empty".into())?;
        check(
            self.fitness_criterion == FitnessCriterion::Max,
            "fitness_criterion must be max: the run keeps the single fittest genome".into(),
        )?;
        Ok(())
    }

    /// Key of the first output node; inputs use keys `0..num_inputs`.
    pub fn first_output_key(&self) -> u64 {
        self.num_inputs as u64
    }

    pub fn first_hidden_key(&self) -> u64 {
        (self.num_inputs + self.num_outputs) as u64
    }
}
