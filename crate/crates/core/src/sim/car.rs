use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position in pixels and heading in whole degrees, always a multiple of the
/// turn step and normalized to `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub angle: i32,
}

impl Pose {
    pub fn new(x: f64, y: f64, angle: i32) -> Self {
        Self {
            x,
            y,
            angle: normalize_angle(angle),
        }
    }
}

pub(crate) fn normalize_angle(angle: i32) -> i32 {
    angle.rem_euclid(360)
}

/// Unit displacement for a heading: `(sin r, cos r)` with `r = radians(360 - angle)`.
///
/// Angle 0 moves towards +y (down in raster coordinates), angle 90 towards -x.
#[inline]
pub fn heading_vector(angle_deg: f64) -> (f64, f64) {
    let r = (360.0 - angle_deg).to_radians();
    (r.sin(), r.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    SpeedUp,
    TurnLeft,
    TurnRight,
    SlowDown,
    LeftSpeedUp,
    RightSpeedUp,
}

impl Action {
    pub const ALL: [Action; 6] = [
        Action::SpeedUp,
        Action::TurnLeft,
        Action::TurnRight,
        Action::SlowDown,
        Action::LeftSpeedUp,
        Action::RightSpeedUp,
    ];

    /// Pure turns rotate in place and cover no distance.
    pub fn is_pure_turn(self) -> bool {
        matches!(self, Action::TurnLeft | Action::TurnRight)
    }

    /// Signed heading change in units of the turn step.
    fn turn_sign(self) -> i32 {
        match self {
            Action::TurnLeft | Action::LeftSpeedUp => 1,
            Action::TurnRight | Action::RightSpeedUp => -1,
            Action::SpeedUp | Action::SlowDown => 0,
        }
    }

    fn speeds_up(self) -> bool {
        matches!(
            self,
            Action::SpeedUp | Action::LeftSpeedUp | Action::RightSpeedUp
        )
    }
}

/// Environment constants shared by every episode on a track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub max_steps: u32,
    /// Degrees per turn; must be a positive multiple of 15.
    pub turn_step: i32,
    pub speed_step: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub radar_max: f64,
    pub car_half_length: f64,
    pub car_half_width: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            max_steps: 2000,
            turn_step: 15,
            speed_step: 2.0,
            speed_min: 10.0,
            speed_max: 20.0,
            radar_max: 300.0,
            car_half_length: 10.0,
            car_half_width: 5.0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        if self.turn_step <= 0 || self.turn_step % 15 != 0 {
            return bad(format!(
                "turn_step must be a positive multiple of 15, got {}",
                self.turn_step
            ));
        }
        if !(self.speed_step > 0.0 && self.speed_step.is_finite()) {
            return bad(format!("speed_step must be positive, got {}", self.speed_step));
        }
        if !(self.speed_min > 0.0 && self.speed_min < self.speed_max && self.speed_max.is_finite()) {
            return bad(format!(
                "need 0 < speed_min < speed_max, got {} and {}",
                self.speed_min, self.speed_max
            ));
        }
        if !(self.radar_max > 0.0 && self.radar_max.is_finite()) {
            return bad(format!("radar_max must be positive, got {}", self.radar_max));
        }
        if !(self.car_half_length > 0.0 && self.car_half_width > 0.0) {
            return bad("car half extents must be positive".into());
        }
        Ok(())
    }

    pub fn car_width(&self) -> f64 {
        2.0 * self.car_half_width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarState {
    pub pose: Pose,
    pub speed: f64,
    pub distance: f64,
    pub alive: bool,
    /// Index of the checkpoint to hit next; equals the checkpoint count once
    /// every checkpoint of the current lap has been visited.
    pub next_checkpoint: usize,
    pub laps_completed: u32,
    /// Checkpoints hit over the whole episode, across laps.
    pub checkpoints_hit: u32,
    pub steps: u32,
}

impl CarState {
    pub fn at(pose: Pose, cfg: &EnvConfig) -> Self {
        Self {
            pose,
            speed: cfg.speed_min,
            distance: 0.0,
            alive: true,
            next_checkpoint: 0,
            laps_completed: 0,
            checkpoints_hit: 0,
            steps: 0,
        }
    }
}

/// Applies one discrete action: heading and speed first, then displacement at
/// the updated heading and speed, then clamping to `bounds` (width, height).
pub fn apply_action(car: &CarState, action: Action, cfg: &EnvConfig, bounds: (u32, u32)) -> CarState {
    let mut next = car.clone();
    next.pose.angle = normalize_angle(car.pose.angle + action.turn_sign() * cfg.turn_step);

    if action.speeds_up() {
        next.speed = (car.speed + cfg.speed_step).min(cfg.speed_max);
    } else if action == Action::SlowDown && car.speed > cfg.speed_min {
        next.speed = (car.speed - cfg.speed_step).max(cfg.speed_min);
    }

    if !action.is_pure_turn() {
        let (sx, sy) = heading_vector(next.pose.angle as f64);
        let max_x = (bounds.0 as f64 - 1.0).max(0.0);
        let max_y = (bounds.1 as f64 - 1.0).max(0.0);
        next.pose.x = (car.pose.x + sx * next.speed).clamp(0.0, max_x);
        next.pose.y = (car.pose.y + sy * next.speed).clamp(0.0, max_y);
        next.distance += next.speed;
    }
    next.steps += 1;
    next
}
