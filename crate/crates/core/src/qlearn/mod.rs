//! Tabular Q-learning over bucketed radar readings.

mod agent;
mod config;
mod table;

pub use agent::{
    decay, evaluate, evaluate_env, step_reward, train, train_env, DrivingEnv, EpisodeRecord, Progress,
    TabularEnv, Terminal, Transition, EVAL_EPSILON,
};
pub use config::{ActionSet, QConfig};
pub use table::{discretize, select_action, update_q, QTable, StateIndex};
