use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ActionSet, QConfig};
use super::table::{discretize, select_action, update_q, QTable, StateIndex};
use crate::error::Result;
use crate::par;
use crate::sim::{Action, CarState, Env, EnvConfig, StepEvents, TrackMap};

/// Exploration rate used when evaluating a trained table.
pub const EVAL_EPSILON: f64 = 0.01;

pub const CHECKPOINT_REWARD: f64 = 10.0;
pub const FINISH_BONUS: f64 = 50.0;
pub const CRASH_PENALTY: f64 = -1000.0;

/// Reward for one transition.
///
/// Each checkpoint is worth 10. The finish line counts as a checkpoint and
/// adds a 50 point bonus on top. A crash scores `-1000 + distance / 10`,
/// added to whatever the same step earned.
pub fn step_reward(events: &StepEvents, car: &CarState) -> f64 {
    let mut r = 0.0;
    if events.crossed_checkpoint {
        r += CHECKPOINT_REWARD;
    }
    if events.crossed_finish {
        r += CHECKPOINT_REWARD + FINISH_BONUS;
    }
    if events.crashed {
        r += CRASH_PENALTY + car.distance / 10.0;
    }
    r
}

/// `max(value * factor, floor)`.
pub fn decay(value: f64, factor: f64, floor: f64) -> f64 {
    (value * factor).max(floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    Crashed,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub total_reward: f64,
    pub steps: u32,
    pub distance: f64,
    pub checkpoints_hit: u32,
    pub laps: u32,
    pub epsilon: f64,
    pub lr: f64,
    pub terminal: Terminal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Progress {
    pub distance: f64,
    pub checkpoints_hit: u32,
    pub laps: u32,
    pub steps: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next: StateIndex,
    pub reward: f64,
    /// The episode ended in an absorbing state (no bootstrap).
    pub terminal: bool,
    /// The episode was cut off by the step limit.
    pub truncated: bool,
}

/// Episodic environment with a discrete state space.
pub trait TabularEnv {
    fn action_count(&self) -> usize;
    fn reset(&mut self) -> Result<StateIndex>;
    fn step(&mut self, action: usize) -> Result<Transition>;
    fn progress(&self) -> Progress;
}

/// The driving simulator seen through the bucketed radar.
pub struct DrivingEnv<'a> {
    env: Env<'a>,
    actions: &'static [Action],
    buckets: usize,
}

impl<'a> DrivingEnv<'a> {
    pub fn new(track: &'a TrackMap, env_cfg: &EnvConfig, cfg: &QConfig) -> Result<Self> {
        let env_cfg = EnvConfig {
            max_steps: cfg.max_steps,
            ..env_cfg.clone()
        };
        Ok(Self {
            env: Env::new(track, env_cfg)?,
            actions: cfg.action_set.actions(),
            buckets: cfg.buckets,
        })
    }

    pub fn car(&self) -> &CarState {
        self.env.car()
    }

    pub fn action_set(&self) -> Option<ActionSet> {
        ActionSet::from_len(self.actions.len())
    }
}

impl TabularEnv for DrivingEnv<'_> {
    fn action_count(&self) -> usize {
        self.actions.len()
    }

    fn reset(&mut self) -> Result<StateIndex> {
        let radar = self.env.reset();
        discretize(&radar, self.env.config().radar_max, self.buckets)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        let (radar, events) = self.env.step(self.actions[action])?;
        Ok(Transition {
            next: discretize(&radar, self.env.config().radar_max, self.buckets)?,
            reward: step_reward(&events, self.env.car()),
            terminal: events.crashed,
            truncated: events.truncated,
        })
    }

    fn progress(&self) -> Progress {
        let car = self.env.car();
        Progress {
            distance: car.distance,
            checkpoints_hit: car.checkpoints_hit,
            laps: car.laps_completed,
            steps: car.steps,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_episode<E: TabularEnv>(
    env: &mut E,
    q: &mut QTable,
    episode: usize,
    epsilon: f64,
    lr: f64,
    gamma: f64,
    learn: bool,
    rng: &mut ChaCha8Rng,
) -> Result<EpisodeRecord> {
    let mut s = env.reset()?;
    let mut total = 0.0;
    let terminal = loop {
        let a = select_action(q, &s, epsilon, rng);
        let t = env.step(a)?;
        total += t.reward;
        if learn {
            update_q(q, &s, a, t.reward, &t.next, lr, gamma, t.terminal)?;
        }
        s = t.next;
        if t.terminal {
            break Terminal::Crashed;
        }
        if t.truncated {
            break Terminal::Truncated;
        }
    };
    let p = env.progress();
    Ok(EpisodeRecord {
        episode,
        total_reward: total,
        steps: p.steps,
        distance: p.distance,
        checkpoints_hit: p.checkpoints_hit,
        laps: p.laps,
        epsilon,
        lr,
        terminal,
    })
}

/// Trains a fresh table on any tabular environment.
pub fn train_env<E: TabularEnv>(env: &mut E, cfg: &QConfig) -> Result<(QTable, Vec<EpisodeRecord>)> {
    cfg.validate()?;
    let mut q = QTable::new(cfg.buckets, env.action_count(), cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut epsilon, mut lr) = (cfg.epsilon0, cfg.lr0);
    let mut records = Vec::with_capacity(cfg.episodes_train);
    for episode in 0..cfg.episodes_train {
        records.push(run_episode(env, &mut q, episode, epsilon, lr, cfg.gamma, true, &mut rng)?);
        epsilon = decay(epsilon, cfg.epsilon_decay, cfg.epsilon_min);
        lr = decay(lr, cfg.lr_decay, cfg.lr_min);
    }
    Ok((q, records))
}

pub fn train(track: &TrackMap, env_cfg: &EnvConfig, cfg: &QConfig) -> Result<(QTable, Vec<EpisodeRecord>)> {
    let mut env = DrivingEnv::new(track, env_cfg, cfg)?;
    train_env(&mut env, cfg)
}

fn eval_rng(seed: u64, episode: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode as u64 + 1);
    rng
}

/// Runs greedy episodes with `EVAL_EPSILON` exploration and no learning.
pub fn evaluate_env<E: TabularEnv>(q: &QTable, env: &mut E, cfg: &QConfig) -> Result<Vec<EpisodeRecord>> {
    let mut scratch = q.clone();
    (0..cfg.episodes_eval)
        .map(|ep| run_episode(env, &mut scratch, ep, EVAL_EPSILON, 0.0, cfg.gamma, false, &mut eval_rng(cfg.seed, ep)))
        .collect()
}

/// Evaluates a frozen table on a track. Episodes are independent and run in
/// parallel with the `parallel` feature; each has its own RNG stream.
pub fn evaluate(q: &QTable, track: &TrackMap, env_cfg: &EnvConfig, cfg: &QConfig) -> Result<Vec<EpisodeRecord>> {
    cfg.validate()?;
    par::map_range(cfg.episodes_eval, |ep| {
        let mut env = DrivingEnv::new(track, env_cfg, cfg)?;
        let mut scratch = q.clone();
        run_episode(&mut env, &mut scratch, ep, EVAL_EPSILON, 0.0, cfg.gamma, false, &mut eval_rng(cfg.seed, ep))
    })
    .into_iter()
    .collect()
}
