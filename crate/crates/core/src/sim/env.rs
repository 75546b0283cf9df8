use serde::{Deserialize, Serialize};

use super::car::{apply_action, heading_vector, Action, CarState, EnvConfig};
use super::radar::{sense, RadarReading};
use super::track::{FinishLine, TrackMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEvents {
    pub crossed_checkpoint: bool,
    pub crossed_finish: bool,
    pub crashed: bool,
    pub truncated: bool,
}

impl StepEvents {
    pub fn is_done(&self) -> bool {
        self.crashed || self.truncated
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub radar: RadarReading,
    pub car: CarState,
    pub events: StepEvents,
}

/// True iff a corner of the car's rotated footprint is off-track or outside the grid.
pub fn collided(track: &TrackMap, car: &CarState, cfg: &EnvConfig) -> bool {
    let (fx, fy) = heading_vector(car.pose.angle as f64);
    // perpendicular to the heading
    let (px, py) = (-fy, fx);
    let (hl, hw) = (cfg.car_half_length, cfg.car_half_width);
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .any(|(a, b)| {
            let x = car.pose.x + a * hl * fx + b * hw * px;
            let y = car.pose.y + a * hl * fy + b * hw * py;
            !track.grid.is_drivable_at(x, y)
        })
}

pub fn reset(track: &TrackMap, cfg: &EnvConfig) -> (RadarReading, CarState) {
    let car = CarState::at(track.start, cfg);
    (sense(track, &car, cfg), car)
}

/// Advances one step. Stepping a crashed or truncated episode is an error.
pub fn step(track: &TrackMap, car: &CarState, cfg: &EnvConfig, action: Action) -> Result<StepOutcome> {
    if !car.alive {
        return Err(Error::EpisodeOver("car crashed"));
    }
    if car.steps >= cfg.max_steps {
        return Err(Error::EpisodeOver("step limit reached"));
    }

    let mut next = apply_action(car, action, cfg, track.bounds());
    let mut events = StepEvents::default();

    if collided(track, &next, cfg) {
        next.alive = false;
        events.crashed = true;
    }

    let from = (car.pose.x, car.pose.y);
    let to = (next.pose.x, next.pose.y);

    if let Some(cp) = track.checkpoints.get(next.next_checkpoint) {
        if segment_point_distance(from, to, (cp.x, cp.y)) <= cp.radius {
            events.crossed_checkpoint = true;
            next.next_checkpoint += 1;
            next.checkpoints_hit += 1;
        }
    }

    if next.next_checkpoint == track.checkpoints.len() && crosses_finish(from, to, &track.finish) {
        events.crossed_finish = true;
        next.laps_completed += 1;
        next.next_checkpoint = 0;
    }

    if !events.crashed && next.steps >= cfg.max_steps {
        events.truncated = true;
    }

    Ok(StepOutcome {
        radar: sense(track, &next, cfg),
        car: next,
        events,
    })
}

fn segment_point_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Proper or touching intersection of the movement segment with the finish line.
/// A zero-length movement never crosses.
fn crosses_finish(a: (f64, f64), b: (f64, f64), f: &FinishLine) -> bool {
    if a == b {
        return false;
    }
    let (c, d) = ((f.x1, f.y1), (f.x2, f.y2));
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    // A segment that starts on the line does not count, one that ends on it does.
    d1 * d2 <= 0.0 && d1 != 0.0 && d3 * d4 <= 0.0
}

/// Single-episode environment bound to one track.
#[derive(Debug, Clone)]
pub struct Env<'a> {
    track: &'a TrackMap,
    cfg: EnvConfig,
    car: CarState,
}

impl<'a> Env<'a> {
    pub fn new(track: &'a TrackMap, cfg: EnvConfig) -> Result<Self> {
        cfg.validate()?;
        let car = CarState::at(track.start, &cfg);
        Ok(Self { track, cfg, car })
    }

    pub fn reset(&mut self) -> RadarReading {
        let (radar, car) = reset(self.track, &self.cfg);
        self.car = car;
        radar
    }

    pub fn step(&mut self, action: Action) -> Result<(RadarReading, StepEvents)> {
        let out = step(self.track, &self.car, &self.cfg, action)?;
        self.car = out.car;
        Ok((out.radar, out.events))
    }

    pub fn car(&self) -> &CarState {
        &self.car
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn track(&self) -> &'a TrackMap {
        self.track
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finish_crossing_geometry() {
        let f = FinishLine { x1: 0.0, y1: 10.0, x2: 20.0, y2: 10.0 };
        assert!(crosses_finish((5.0, 5.0), (5.0, 15.0), &f));
        assert!(crosses_finish((5.0, 15.0), (5.0, 5.0), &f));
        assert!(!crosses_finish((5.0, 5.0), (5.0, 9.0), &f));
        assert!(!crosses_finish((25.0, 5.0), (25.0, 15.0), &f));
        // starting on the line and leaving it counts, arriving onto it also counts
        assert!(crosses_finish((5.0, 5.0), (5.0, 10.0), &f));
        assert!(!crosses_finish((5.0, 10.0), (5.0, 15.0), &f));
        assert!(!crosses_finish((5.0, 10.0), (5.0, 10.0), &f));
    }

    #[test]
    fn point_segment_distance() {
        assert_eq!(segment_point_distance((0.0, 0.0), (10.0, 0.0), (5.0, 3.0)), 3.0);
        assert_eq!(segment_point_distance((0.0, 0.0), (10.0, 0.0), (13.0, 4.0)), 5.0);
        assert_eq!(segment_point_distance((1.0, 1.0), (1.0, 1.0), (4.0, 5.0)), 5.0);
    }
}
