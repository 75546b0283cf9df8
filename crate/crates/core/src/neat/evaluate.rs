use serde::{Deserialize, Serialize};

use super::genome::Genome;
use super::phenotype::{action_from_outputs, build_phenotype};
use crate::error::Result;
use crate::par;
use crate::sim::{reset, step, Action, EnvConfig, RadarReading, TrackMap};

/// Scale applied to `distance * mean_speed`.
pub const FITNESS_SCALE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DriveSummary {
    pub distance: f64,
    /// Mean of the post-step speed over all steps taken.
    pub mean_speed: f64,
    pub steps: u32,
    pub laps: u32,
    pub checkpoints_hit: u32,
    pub crashed: bool,
    pub truncated: bool,
}

impl DriveSummary {
    pub fn fitness(&self) -> f64 {
        fitness(self.distance, self.mean_speed)
    }
}

pub fn fitness(distance: f64, mean_speed: f64) -> f64 {
    distance * mean_speed * FITNESS_SCALE
}

/// Drives one episode from the start pose with `policy`.
///
/// Stops on a crash, at the step limit, or once `lap_limit` laps are done
/// (`0` disables the lap limit).
pub fn drive_episode<F>(track: &TrackMap, env_cfg: &EnvConfig, lap_limit: u32, mut policy: F) -> Result<DriveSummary>
where
    F: FnMut(&RadarReading) -> Result<Action>,
{
    let (mut radar, mut car) = reset(track, env_cfg);
    let mut speed_sum = 0.0;
    let mut summary = DriveSummary::default();
    loop {
        let action = policy(&radar)?;
        let out = step(track, &car, env_cfg, action)?;
        speed_sum += out.car.speed;
        radar = out.radar;
        car = out.car;
        summary.crashed = out.events.crashed;
        summary.truncated = out.events.truncated;
        if out.events.is_done() || (lap_limit > 0 && car.laps_completed >= lap_limit) {
            break;
        }
    }
    summary.distance = car.distance;
    summary.steps = car.steps;
    summary.laps = car.laps_completed;
    summary.checkpoints_hit = car.checkpoints_hit;
    summary.mean_speed = if car.steps > 0 { speed_sum / car.steps as f64 } else { 0.0 };
    Ok(summary)
}

/// Drives `g`'s network, feeding radar distances scaled to `[0, 1]`.
pub fn evaluate_genome(g: &Genome, track: &TrackMap, env_cfg: &EnvConfig, lap_limit: u32) -> Result<DriveSummary> {
    let net = build_phenotype(g)?;
    let r_max = env_cfg.radar_max;
    drive_episode(track, env_cfg, lap_limit, |radar| {
        action_from_outputs(&net.activate(&radar.normalized(r_max))?)
    })
}

/// Evaluates `g`, stores its fitness and returns it.
pub fn genome_fitness(g: &mut Genome, track: &TrackMap, env_cfg: &EnvConfig, lap_limit: u32) -> Result<f64> {
    let f = evaluate_genome(g, track, env_cfg, lap_limit)?.fitness();
    g.fitness = Some(f);
    Ok(f)
}

/// Evaluates every genome, in parallel when enabled, and stores the fitness values.
pub fn evaluate_population(
    population: &mut [Genome],
    track: &TrackMap,
    env_cfg: &EnvConfig,
    lap_limit: u32,
) -> Result<Vec<DriveSummary>> {
    let summaries: Vec<Result<DriveSummary>> =
        par::map(population, |g| evaluate_genome(g, track, env_cfg, lap_limit));
    let summaries: Vec<DriveSummary> = summaries.into_iter().collect::<Result<_>>()?;
    for (g, s) in population.iter_mut().zip(&summaries) {
        g.fitness = Some(s.fitness());
    }
    Ok(summaries)
}

/// Sequential variant of [`evaluate_population`], regardless of features.
pub fn evaluate_population_seq(
    population: &mut [Genome],
    track: &TrackMap,
    env_cfg: &EnvConfig,
    lap_limit: u32,
) -> Result<Vec<DriveSummary>> {
    let summaries: Vec<DriveSummary> = par::map_seq(population, |g| evaluate_genome(g, track, env_cfg, lap_limit))
        .into_iter()
        .collect::<Result<_>>()?;
    for (g, s) in population.iter_mut().zip(&summaries) {
        g.fitness = Some(s.fitness());
    }
    Ok(summaries)
}
