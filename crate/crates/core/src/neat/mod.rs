//! NEAT: evolving feed-forward car controllers.
//!
//! Genes carry global historical markers. Connection genes get an innovation
//! number from the [`InnovationRegistry`] and hidden nodes a node key, so that
//! crossover can align genes of structurally different parents. Within one
//! generation identical structural mutations receive identical markers.

mod config;
mod distance;
mod evaluate;
mod genome;
mod io;
mod mutation;
mod phenotype;
mod population;
mod registry;
mod species;

pub use config::{Activation, FitnessCriterion, NeatConfig};
pub use distance::genomic_distance;
pub use evaluate::{
    drive_episode, evaluate_genome, evaluate_population, evaluate_population_seq, fitness, genome_fitness, DriveSummary,
    FITNESS_SCALE,
};
pub use genome::{ConnectionGene, Genome, NodeGene, NodeKind};
pub use io::{genome_from_json, genome_to_json, load_genome, load_neat_config, save_genome};
pub use mutation::{
    crossover, mutate, mutate_add_connection, mutate_add_node, mutate_delete_connection, mutate_delete_node,
    mutate_weights_and_activation,
};
pub use phenotype::{action_from_outputs, build_phenotype, Phenotype, OUTPUT_ACTIONS};
pub use population::{
    advance_generation, init_population, run_neat, run_neat_with, GenerationStats, NeatRun, NeatState, SpeciesStats,
};
pub use registry::InnovationRegistry;
pub use species::{speciate, Species};
