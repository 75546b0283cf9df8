use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::config::{FitnessCriterion, NeatConfig};
use super::distance::genomic_distance;
use super::genome::Genome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub id: u64,
    pub representative: Genome,
    /// Keys of the member genomes, in population order.
    pub members: Vec<u64>,
    pub best_fitness_ever: f64,
    pub last_improved_generation: usize,
    pub created_generation: usize,
}

impl Species {
    /// Species fitness under `criterion`, `None` while members are unevaluated.
    pub fn fitness(&self, lookup: &HashMap<u64, &Genome>, criterion: FitnessCriterion) -> Option<f64> {
        let fits: Option<Vec<f64>> = self.members.iter().map(|k| lookup.get(k).and_then(|g| g.fitness)).collect();
        let fits = fits?;
        if fits.is_empty() {
            return None;
        }
        Some(match criterion {
            FitnessCriterion::Max => fits.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            FitnessCriterion::Mean => fits.iter().sum::<f64>() / fits.len() as f64,
        })
    }

    pub fn stagnation(&self, generation: usize) -> usize {
        generation.saturating_sub(self.last_improved_generation)
    }
}

/// Partitions `population` into species.
///
/// Each surviving species first claims the unassigned genome closest to its
/// old representative as its new representative. Remaining genomes join the
/// first species whose representative is within `compat_threshold`, or found
/// a new species. Species left without members disappear.
pub fn speciate(
    population: &[Genome],
    previous: &[Species],
    cfg: &NeatConfig,
    generation: usize,
    next_species_id: &mut u64,
) -> Vec<Species> {
    let mut assigned = vec![false; population.len()];
    let mut out: Vec<Species> = Vec::new();

    let mut prev: Vec<&Species> = previous.iter().collect();
    prev.sort_by_key(|s| s.id);
    for old in prev {
        let closest = population
            .iter()
            .enumerate()
            .filter(|(i, _)| !assigned[*i])
            .map(|(i, g)| (i, genomic_distance(&old.representative, g, cfg)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, _)) = closest {
            assigned[i] = true;
            out.push(Species {
                representative: population[i].clone(),
                members: vec![population[i].key],
                ..old.clone()
            });
        }
    }

    let mut member_idx: Vec<Vec<usize>> = Vec::new();
    for (i, g) in population.iter().enumerate() {
        if assigned[i] {
            continue;
        }
        match out
            .iter()
            .position(|s| genomic_distance(&s.representative, g, cfg) < cfg.compat_threshold)
        {
            Some(si) => {
                if member_idx.len() <= si {
                    member_idx.resize(si + 1, Vec::new());
                }
                member_idx[si].push(i);
            }
            None => {
                out.push(Species {
                    id: *next_species_id,
                    representative: g.clone(),
                    members: vec![g.key],
                    best_fitness_ever: f64::NEG_INFINITY,
                    last_improved_generation: generation,
                    created_generation: generation,
                });
                *next_species_id += 1;
            }
        }
    }
    for (si, idx) in member_idx.into_iter().enumerate() {
        out[si].members.extend(idx.into_iter().map(|i| population[i].key));
    }

    // members in population order
    let order: HashMap<u64, usize> = population.iter().enumerate().map(|(i, g)| (g.key, i)).collect();
    for s in &mut out {
        s.members.sort_by_key(|k| order[k]);
    }
    out
}
