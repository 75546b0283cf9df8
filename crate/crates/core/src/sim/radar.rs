use serde::{Deserialize, Serialize};

use super::car::{heading_vector, CarState, EnvConfig};
use super::track::TrackMap;

pub const SENSOR_COUNT: usize = 5;

/// Sensor headings relative to the car heading, in degrees.
pub const RADAR_OFFSETS: [i32; SENSOR_COUNT] = [-90, -45, 0, 45, 90];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarReading {
    pub distances: [f64; SENSOR_COUNT],
}

impl RadarReading {
    /// Readings scaled to `[0, 1]` by the radar range.
    pub fn normalized(&self, r_max: f64) -> [f64; SENSOR_COUNT] {
        self.distances.map(|d| d / r_max)
    }
}

/// Distance from `origin` to the first wall cell along the world `angle`,
/// sampled every pixel and capped at `r_max`.
pub fn cast_ray(track: &TrackMap, origin: (f64, f64), angle: f64, r_max: f64) -> f64 {
    let grid = &track.grid;
    let (sx, sy) = heading_vector(angle);
    let steps = r_max.floor() as u32;
    for d in 0..=steps {
        let t = d as f64;
        if !grid.is_drivable_at(origin.0 + sx * t, origin.1 + sy * t) {
            return t;
        }
    }
    r_max
}

pub fn sense(track: &TrackMap, car: &CarState, cfg: &EnvConfig) -> RadarReading {
    let origin = (car.pose.x, car.pose.y);
    let heading = car.pose.angle as f64;
    RadarReading {
        distances: RADAR_OFFSETS.map(|off| cast_ray(track, origin, heading + off as f64, cfg.radar_max)),
    }
}
