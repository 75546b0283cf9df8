//! Headless, deterministic 2D driving benchmark.
//!
//! The crate is split into three layers:
//!
//! - [`sim`]: occupancy-grid race tracks, procedural track generation, the
//!   discrete car kinematics, ray-cast radar, collision and checkpoint logic,
//!   and an episodic `reset`/`step` environment.
//! - [`qlearn`]: a tabular Q-learner over bucketed radar readings.
//! - [`neat`]: a NEAT engine evolving feed-forward controllers for the car.
//!
//! Everything is a pure function of its inputs and seed. Population evaluation
//! and independent evaluation episodes fan out over rayon when the `parallel`
//! feature is enabled (the default); results are always merged in index order,
//! so the sequential and parallel builds produce identical outputs.

pub mod error;
pub mod neat;
pub mod par;
pub mod qlearn;
pub mod sim;

pub use error::{Error, Result};
