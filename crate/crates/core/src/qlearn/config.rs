use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Action;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionSet {
    /// Every action the car supports.
    Six,
    /// `TurnLeft`, `TurnRight`, `SpeedUp`.
    Three,
}

impl ActionSet {
    pub fn actions(self) -> &'static [Action] {
        const THREE: [Action; 3] = [Action::TurnLeft, Action::TurnRight, Action::SpeedUp];
        match self {
            ActionSet::Six => &Action::ALL,
            ActionSet::Three => &THREE,
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        self.actions().len()
    }

    pub fn from_len(n: usize) -> Option<Self> {
        match n {
            6 => Some(ActionSet::Six),
            3 => Some(ActionSet::Three),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QConfig {
    pub episodes_train: usize,
    pub episodes_eval: usize,
    pub max_steps: u32,
    pub epsilon0: f64,
    pub epsilon_min: f64,
    pub lr0: f64,
    pub lr_min: f64,
    pub gamma: f64,
    /// Per-episode multiplier applied to epsilon.
    pub epsilon_decay: f64,
    /// Per-episode multiplier applied to the learning rate.
    pub lr_decay: f64,
    pub buckets: usize,
    pub action_set: ActionSet,
    pub seed: u64,
}

impl Default for QConfig {
    fn default() -> Self {
        Self {
            episodes_train: 30_000,
            episodes_eval: 100,
            max_steps: 2000,
            epsilon0: 0.8,
            epsilon_min: 0.001,
            lr0: 0.8,
            lr_min: 0.4,
            gamma: 0.99,
            epsilon_decay: 0.9995,
            lr_decay: 0.99985,
            buckets: 11,
            action_set: ActionSet::Six,
            seed: 0,
        }
    }
}

impl QConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::InvalidConfig(msg.into())) };
        check(
            0.0 <= self.epsilon_min && self.epsilon_min <= self.epsilon0 && self.epsilon0 <= 1.0,
            "need 0 <= epsilon_min <= epsilon0 <= 1",
        )?;
        check(
            0.0 < self.lr_min && self.lr_min <= self.lr0 && self.lr0 <= 1.0,
            "need 0 < lr_min <= lr0 <= 1",
        )?;
        check((0.0..=1.0).contains(&self.gamma), "gamma must be in [0, 1]")?;
        check(
            self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0,
            "epsilon_decay must be in (0, 1]",
        )?;
        check(self.lr_decay > 0.0 && self.lr_decay <= 1.0, "lr_decay must be in (0, 1]")?;
        check(self.buckets >= 2, "buckets must be at least 2")?;
        check(self.buckets <= 255, "buckets must fit in a byte")?;
        check(self.max_steps > 0, "max_steps must be positive")?;
        Ok(())
    }
}
