use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::NeatConfig;
use super::evaluate::evaluate_population;
use super::genome::Genome;
use super::mutation::{crossover, mutate};
use super::registry::InnovationRegistry;
use super::species::{speciate, Species};
use crate::error::{Error, Result};
use crate::sim::{EnvConfig, TrackMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesStats {
    pub species_id: u64,
    pub size: usize,
    pub best_fitness: f64,
    pub stagnation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub species_count: usize,
    pub species: Vec<SpeciesStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeatRun {
    /// Fittest genome seen over the whole run.
    pub best: Genome,
    pub stats: Vec<GenerationStats>,
}

/// `cfg.population` fully connected input-to-output genomes, keyed `0..n`.
pub fn init_population<R: Rng + ?Sized>(
    cfg: &NeatConfig,
    rng: &mut R,
    registry: &mut InnovationRegistry,
) -> Vec<Genome> {
    (0..cfg.population as u64)
        .map(|key| {
            let mut g = Genome::bare(key, cfg);
            for i in g.input_keys() {
                for o in g.output_keys() {
                    let innov = registry.connection(i, o);
                    g.add_connection(i, o, rng.random_range(-1.0..=1.0), innov);
                }
            }
            g
        })
        .collect()
}

/// Evolution state between evaluation waves.
#[derive(Debug, Clone)]
pub struct NeatState {
    pub generation: usize,
    pub population: Vec<Genome>,
    pub species: Vec<Species>,
    pub registry: InnovationRegistry,
    rng: ChaCha8Rng,
    next_genome_key: u64,
    next_species_id: u64,
}

impl NeatState {
    pub fn new(cfg: &NeatConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut registry = InnovationRegistry::new(cfg.first_hidden_key());
        let population = init_population(cfg, &mut rng, &mut registry);
        let mut next_species_id = 1;
        let species = speciate(&population, &[], cfg, 0, &mut next_species_id);
        Ok(Self {
            generation: 0,
            next_genome_key: population.len() as u64,
            population,
            species,
            registry,
            rng,
            next_species_id,
        })
    }

    /// Updates species improvement records and summarizes the evaluated generation.
    pub fn record(&mut self, cfg: &NeatConfig) -> GenerationStats {
        let lookup: HashMap<u64, &Genome> = self.population.iter().map(|g| (g.key, g)).collect();
        let mut species = Vec::with_capacity(self.species.len());
        for s in &mut self.species {
            let f = s.fitness(&lookup, cfg.species_fitness_criterion).unwrap_or(f64::NEG_INFINITY);
            if f > s.best_fitness_ever {
                s.best_fitness_ever = f;
                s.last_improved_generation = self.generation;
            }
            let best = s.fitness(&lookup, super::config::FitnessCriterion::Max).unwrap_or(0.0);
            species.push(SpeciesStats {
                species_id: s.id,
                size: s.members.len(),
                best_fitness: best,
                stagnation: s.stagnation(self.generation),
            });
        }
        let fits: Vec<f64> = self.population.iter().map(|g| g.fitness.unwrap_or(0.0)).collect();
        GenerationStats {
            generation: self.generation,
            best_fitness: fits.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_fitness: fits.iter().sum::<f64>() / fits.len().max(1) as f64,
            species_count: self.species.len(),
            species,
        }
    }

    pub fn best(&self) -> Option<&Genome> {
        fittest(&self.population)
    }
}

fn fitness_of(g: &Genome) -> f64 {
    g.fitness.unwrap_or(f64::NEG_INFINITY)
}

/// Fittest first, ties by ascending key.
fn by_fitness(a: &Genome, b: &Genome) -> std::cmp::Ordering {
    fitness_of(b).total_cmp(&fitness_of(a)).then(a.key.cmp(&b.key))
}

fn fittest(pop: &[Genome]) -> Option<&Genome> {
    pop.iter().min_by(|a, b| by_fitness(a, b))
}

/// Splits `total` proportionally to `weights`, at least one each while
/// `total` allows, with remainders going to the largest fractional parts.
fn allocate(weights: &[f64], total: usize) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    if total < n {
        // Not enough room for every species: the first `total` get one each.
        return (0..n).map(|i| usize::from(i < total)).collect();
    }
    let mut out = vec![1; n];
    let spare = total - n;
    let sum: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    let shares: Vec<f64> = if sum > 0.0 {
        weights.iter().map(|w| w.max(0.0) / sum * spare as f64).collect()
    } else {
        vec![spare as f64 / n as f64; n]
    };
    let mut given = 0;
    for (o, s) in out.iter_mut().zip(&shares) {
        let whole = s.floor() as usize;
        *o += whole;
        given += whole;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| (shares[b] - shares[b].floor()).total_cmp(&(shares[a] - shares[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().cycle().take(spare - given) {
        out[i] += 1;
    }
    out
}

/// Replaces the evaluated population in `state` with its offspring.
///
/// Stagnant species are dropped (the best `species_elitism` are kept
/// regardless), the best `population_elitism` genomes are copied unchanged,
/// and the remaining slots are shared among species by mean fitness. Parents
/// come from the top `survival_threshold` of each species.
pub fn advance_generation(state: &mut NeatState, cfg: &NeatConfig) -> Result<()> {
    let lookup: HashMap<u64, &Genome> = state.population.iter().map(|g| (g.key, g)).collect();
    let generation = state.generation;

    let mut ranked: Vec<(f64, &Species)> = state
        .species
        .iter()
        .map(|s| (s.fitness(&lookup, cfg.species_fitness_criterion).unwrap_or(f64::NEG_INFINITY), s))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.id.cmp(&b.1.id)));
    let survivors: Vec<&Species> = ranked
        .iter()
        .enumerate()
        .filter(|(rank, (_, s))| *rank < cfg.species_elitism || s.stagnation(generation) < cfg.max_stagnation)
        .map(|(_, (_, s))| *s)
        .collect();

    let mut sorted: Vec<&Genome> = state.population.iter().collect();
    sorted.sort_by(|a, b| by_fitness(a, b));
    let elites: Vec<Genome> = sorted.iter().take(cfg.population_elitism).map(|g| (*g).clone()).collect();

    let quota = cfg.population.saturating_sub(elites.len());
    if survivors.is_empty() && quota > 0 {
        return Err(Error::EmptyPopulation);
    }
    let means: Vec<f64> = survivors
        .iter()
        .map(|s| s.members.iter().map(|k| fitness_of(lookup[k]).max(0.0)).sum::<f64>() / s.members.len() as f64)
        .collect();
    let counts = allocate(&means, quota);

    state.registry.new_generation();
    let mut next: Vec<Genome> = elites;
    for (s, &count) in survivors.iter().zip(&counts) {
        let mut members: Vec<&Genome> = s.members.iter().map(|k| lookup[k]).collect();
        members.sort_by(|a, b| by_fitness(a, b));
        let keep = ((members.len() as f64 * cfg.survival_threshold).ceil() as usize).clamp(1, members.len());
        let pool = &members[..keep];
        for _ in 0..count {
            let key = state.next_genome_key;
            state.next_genome_key += 1;
            let mut child = if pool.len() == 1 {
                let mut c = pool[0].clone();
                c.key = key;
                c.fitness = None;
                c
            } else {
                let a = *pool.choose(&mut state.rng).unwrap();
                let b = *pool.choose(&mut state.rng).unwrap();
                let (fit, other) = if by_fitness(a, b).is_le() { (a, b) } else { (b, a) };
                crossover(fit, other, key, &mut state.rng)
            };
            mutate(&mut child, cfg, &mut state.rng, &mut state.registry);
            next.push(child);
        }
    }

    let previous: Vec<Species> = survivors.into_iter().cloned().collect();
    state.generation += 1;
    state.species = speciate(&next, &previous, cfg, state.generation, &mut state.next_species_id);
    state.population = next;
    Ok(())
}

/// Evolves controllers on `track` for `cfg.generations` generations.
///
/// With zero generations the initial population is still evaluated once so
/// a best genome exists.
pub fn run_neat(track: &TrackMap, cfg: &NeatConfig, env_cfg: &EnvConfig) -> Result<NeatRun> {
    run_neat_with(track, cfg, env_cfg, |_| {})
}

/// [`run_neat`] with a callback after every evaluated generation.
pub fn run_neat_with<F>(track: &TrackMap, cfg: &NeatConfig, env_cfg: &EnvConfig, mut on_generation: F) -> Result<NeatRun>
where
    F: FnMut(&GenerationStats),
{
    env_cfg.validate()?;
    let mut state = NeatState::new(cfg)?;
    let mut stats = Vec::with_capacity(cfg.generations);
    let mut best: Option<Genome> = None;
    let waves = cfg.generations.max(1);
    for wave in 0..waves {
        evaluate_population(&mut state.population, track, env_cfg, cfg.lap_limit)?;
        let champion = state.best().ok_or(Error::EmptyPopulation)?;
        if best.as_ref().is_none_or(|b| fitness_of(champion) > fitness_of(b)) {
            best = Some(champion.clone());
        }
        if cfg.generations == 0 {
            break;
        }
        let s = state.record(cfg);
        on_generation(&s);
        stats.push(s);
        if wave + 1 < waves {
            advance_generation(&mut state, cfg)?;
        }
    }
    Ok(NeatRun { best: best.ok_or(Error::EmptyPopulation)?, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_sums_to_total() {
        assert_eq!(allocate(&[1.0, 1.0, 2.0], 10), vec![3, 3, 4]);
        assert_eq!(allocate(&[0.0, 0.0], 5).iter().sum::<usize>(), 5);
        assert_eq!(allocate(&[5.0, 0.0, 0.0], 2), vec![1, 1, 0]);
        assert_eq!(allocate(&[3.0, 1.0], 6), vec![4, 2]);
    }
}
