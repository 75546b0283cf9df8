use serde::{Deserialize, Serialize};

use super::car::Pose;
use super::grid::OccupancyGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinishLine {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

/// Immutable track: drivable mask, start pose, ordered checkpoints and the
/// finish line. Safe to share across concurrently running episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackMap {
    pub name: String,
    pub grid: OccupancyGrid,
    pub start: Pose,
    pub checkpoints: Vec<Checkpoint>,
    pub finish: FinishLine,
}

impl TrackMap {
    pub fn new(
        name: impl Into<String>,
        grid: OccupancyGrid,
        start: Pose,
        checkpoints: Vec<Checkpoint>,
        finish: FinishLine,
    ) -> Result<Self> {
        let track = Self {
            name: name.into(),
            grid,
            start,
            checkpoints,
            finish,
        };
        track.validate()?;
        Ok(track)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if self.start.angle % 15 != 0 || !(0..360).contains(&self.start.angle) {
            return Err(Error::InvalidTrack(format!(
                "start angle {} is not a normalized multiple of 15",
                self.start.angle
            )));
        }
        if !g.contains(self.start.x, self.start.y) || !g.is_drivable_at(self.start.x, self.start.y) {
            return Err(Error::InvalidTrack(format!(
                "start ({}, {}) is not on a drivable cell",
                self.start.x, self.start.y
            )));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::InvalidTrack("track has no checkpoints".into()));
        }
        for (i, cp) in self.checkpoints.iter().enumerate() {
            if cp.index != i {
                return Err(Error::InvalidTrack(format!(
                    "checkpoint at position {i} has index {}",
                    cp.index
                )));
            }
            if !(cp.radius > 0.0 && cp.radius.is_finite()) {
                return Err(Error::InvalidTrack(format!("checkpoint {i} radius must be positive")));
            }
            if !g.is_drivable_at(cp.x, cp.y) {
                return Err(Error::InvalidTrack(format!(
                    "checkpoint {i} center ({}, {}) is not drivable",
                    cp.x, cp.y
                )));
            }
        }
        let (w, h) = (g.width() as f64, g.height() as f64);
        let f = &self.finish;
        for (x, y) in [(f.x1, f.y1), (f.x2, f.y2)] {
            if !(0.0..=w).contains(&x) || !(0.0..=h).contains(&y) {
                return Err(Error::InvalidTrack(format!(
                    "finish endpoint ({x}, {y}) lies outside the {w}x{h} grid"
                )));
            }
        }
        Ok(())
    }

    pub fn bounds(&self) -> (u32, u32) {
        (self.grid.width(), self.grid.height())
    }
}
