//! Deterministic headless driving environment.

mod car;
mod env;
mod grid;
mod radar;
mod track;
pub mod trackgen;
pub mod trackio;

pub use car::{apply_action, heading_vector, Action, CarState, EnvConfig, Pose};
pub use env::{collided, reset, step, Env, StepEvents, StepOutcome};
pub use grid::OccupancyGrid;
pub use radar::{cast_ray, sense, RadarReading, RADAR_OFFSETS, SENSOR_COUNT};
pub use track::{Checkpoint, FinishLine, TrackMap};
pub use trackgen::{generate_map, Archetype, GenParams};
pub use trackio::{decode_pgm, encode_meta, encode_pgm, load_track, load_track_pair, pair_paths, save_track, save_track_pair};
