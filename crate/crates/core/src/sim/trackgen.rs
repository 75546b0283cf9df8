//! Procedural closed-loop tracks.
//!
//! Every archetype starts from a closed centerline curve around the grid
//! center. The drivable corridor is every cell whose center lies within half
//! the track width of the densely resampled centerline. Checkpoints sit at
//! equal arc-length intervals after the start, which is also where the finish
//! line is drawn.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::car::{normalize_angle, Pose};
use super::grid::OccupancyGrid;
use super::track::{Checkpoint, FinishLine, TrackMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Archetype {
    SimpleLoop,
    CurvedLoop,
    SharpTurns,
    ConstantTwists,
}

impl Archetype {
    pub const ALL: [Archetype; 4] = [
        Archetype::SimpleLoop,
        Archetype::CurvedLoop,
        Archetype::SharpTurns,
        Archetype::ConstantTwists,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Archetype::SimpleLoop => "simple-loop",
            Archetype::CurvedLoop => "curved-loop",
            Archetype::SharpTurns => "sharp-turns",
            Archetype::ConstantTwists => "constant-twists",
        }
    }

    /// 1-based map number in increasing difficulty.
    pub fn map_number(self) -> usize {
        Archetype::ALL.iter().position(|&a| a == self).unwrap() + 1
    }

    fn salt(self) -> u64 {
        0x9E37_79B9_7F4A_7C15u64.wrapping_mul(self.map_number() as u64)
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Archetype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "simple-loop" | "simpleloop" | "map1" => Ok(Archetype::SimpleLoop),
            "curved-loop" | "curvedloop" | "map2" => Ok(Archetype::CurvedLoop),
            "sharp-turns" | "sharpturns" | "map3" => Ok(Archetype::SharpTurns),
            "constant-twists" | "constanttwists" | "map4" => Ok(Archetype::ConstantTwists),
            _ => Err(Error::InvalidInput(format!("unknown track archetype {s:?}"))),
        }
    }
}

/// Generator knobs. `scale` sets the total loop length, `turns` the number of
/// turn sections, `sharpness` how hard they bend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub width: u32,
    pub height: u32,
    pub track_width: f64,
    pub checkpoints: usize,
    pub sharpness: f64,
    /// Fraction of the grid the loop spans, in `(0, 1]`.
    pub scale: f64,
    pub turns: u32,
    /// Car width the corridor must accommodate (at least three times over).
    pub car_width: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self::for_archetype(Archetype::SimpleLoop)
    }
}

impl GenParams {
    pub fn for_archetype(archetype: Archetype) -> Self {
        let base = GenParams {
            width: 1920,
            height: 1080,
            track_width: 110.0,
            checkpoints: 8,
            sharpness: 1.0,
            scale: 1.0,
            turns: 0,
            car_width: 10.0,
        };
        match archetype {
            Archetype::SimpleLoop => GenParams {
                checkpoints: 4,
                sharpness: 0.0,
                ..base
            },
            Archetype::CurvedLoop => GenParams {
                track_width: 90.0,
                turns: 3,
                ..base
            },
            Archetype::SharpTurns => GenParams {
                track_width: 80.0,
                turns: 7,
                ..base
            },
            Archetype::ConstantTwists => GenParams {
                track_width: 50.0,
                turns: 11,
                ..base
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.checkpoints < 1 {
            return Err(Error::Generation("at least one checkpoint is required".into()));
        }
        if self.track_width.is_nan() || self.track_width < 3.0 * self.car_width {
            return Err(Error::Generation(format!(
                "track width {} is narrower than three car widths ({})",
                self.track_width,
                3.0 * self.car_width
            )));
        }
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(Error::Generation(format!("scale must be in (0, 1], got {}", self.scale)));
        }
        if !(self.sharpness >= 0.0 && self.sharpness.is_finite()) {
            return Err(Error::Generation("sharpness must be non-negative".into()));
        }
        let margin = self.margin();
        if self.width as f64 <= 2.0 * margin + 40.0 || self.height as f64 <= 2.0 * margin + 40.0 {
            return Err(Error::Generation(format!(
                "{}x{} grid is too small for track width {}",
                self.width, self.height, self.track_width
            )));
        }
        Ok(())
    }

    fn margin(&self) -> f64 {
        self.track_width / 2.0 + 6.0
    }
}

/// Generates a closed-loop track. Deterministic for fixed inputs.
pub fn generate_map(archetype: Archetype, params: &GenParams, seed: u64) -> Result<TrackMap> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ archetype.salt());

    let center = (params.width as f64 / 2.0, params.height as f64 / 2.0);
    let semi_x = params.scale * (center.0 - params.margin());
    let semi_y = params.scale * (center.1 - params.margin());
    let start_theta = PI / 2.0;

    let outline = match archetype {
        Archetype::SimpleLoop => {
            let squash = 1.0 - 0.05 * rng.random::<f64>();
            radial_curve(center, (semi_x, semi_y * squash), start_theta, |_| 1.0)
        }
        Archetype::CurvedLoop | Archetype::ConstantTwists => {
            let amp = match archetype {
                Archetype::CurvedLoop => 0.25,
                _ => 0.2,
            } * params.sharpness;
            let amp = amp.min(0.6);
            let phase = rng.random::<f64>() * TAU;
            let k = params.turns.max(1) as f64;
            radial_curve(center, (semi_x, semi_y), start_theta, |t| {
                1.0 - amp * (1.0 + (k * t + phase).sin()) / 2.0
            })
        }
        Archetype::SharpTurns => {
            let n = params.turns.max(3) as usize;
            let spacing = TAU / n as f64;
            let pull = (0.35 * params.sharpness).min(0.6);
            let vertices: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let jitter = (rng.random::<f64>() - 0.5) * 0.3 * spacing;
                    let t = start_theta + spacing * (i as f64 + 0.5) + jitter;
                    // alternate deep and shallow corners so consecutive turns bend both ways
                    let depth = if i % 2 == 0 { 0.4 + 0.6 * rng.random::<f64>() } else { 0.3 * rng.random::<f64>() };
                    let f = 1.0 - pull * depth;
                    (center.0 + f * semi_x * t.cos(), center.1 + f * semi_y * t.sin())
                })
                .collect();
            let dense = densify_closed(&vertices, 0.5);
            rotate_to_angle(dense, center, start_theta)
        }
    };

    let samples = resample_closed(&outline, 1.0);
    if samples.len() < 8 * (params.checkpoints + 1) {
        return Err(Error::Generation("centerline too short for the checkpoint count".into()));
    }
    let grid = rasterize_corridor(params.width, params.height, &samples, params.track_width / 2.0)?;

    let start_pt = samples[0];
    let ahead = samples[8.min(samples.len() - 1)];
    let (tx, ty) = unit((ahead.0 - start_pt.0, ahead.1 - start_pt.1));
    let start = Pose::new(start_pt.0, start_pt.1, heading_degrees((tx, ty)));

    let n = samples.len();
    let radius = params.track_width / 2.0;
    let checkpoints = (0..params.checkpoints)
        .map(|i| {
            let idx = ((i + 1) * n / (params.checkpoints + 1)).min(n - 1);
            let (x, y) = samples[idx];
            Checkpoint { x, y, radius, index: i }
        })
        .collect();

    let half = params.track_width / 2.0 + 2.0;
    let (nx, ny) = (-ty, tx);
    let (w, h) = (params.width as f64, params.height as f64);
    let finish = FinishLine {
        x1: (start_pt.0 + nx * half).clamp(0.0, w),
        y1: (start_pt.1 + ny * half).clamp(0.0, h),
        x2: (start_pt.0 - nx * half).clamp(0.0, w),
        y2: (start_pt.1 - ny * half).clamp(0.0, h),
    };

    TrackMap::new(archetype.name(), grid, start, checkpoints, finish)
        .map_err(|e| Error::Generation(e.to_string()))
}

/// Heading (multiple of 15 degrees) whose displacement best matches the direction.
fn heading_degrees(dir: (f64, f64)) -> i32 {
    // displacement is (-sin a, cos a)
    let a = (-dir.0).atan2(dir.1).to_degrees();
    normalize_angle(((a / 15.0).round() as i32) * 15)
}

fn unit(v: (f64, f64)) -> (f64, f64) {
    let n = (v.0 * v.0 + v.1 * v.1).sqrt();
    if n == 0.0 {
        (1.0, 0.0)
    } else {
        (v.0 / n, v.1 / n)
    }
}

fn radial_curve(
    center: (f64, f64),
    semi: (f64, f64),
    start_theta: f64,
    factor: impl Fn(f64) -> f64,
) -> Vec<(f64, f64)> {
    const N: usize = 8192;
    (0..N)
        .map(|i| {
            let t = start_theta + TAU * i as f64 / N as f64;
            let f = factor(t);
            (center.0 + f * semi.0 * t.cos(), center.1 + f * semi.1 * t.sin())
        })
        .collect()
}

fn densify_closed(vertices: &[(f64, f64)], step: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (i, &a) in vertices.iter().enumerate() {
        let b = vertices[(i + 1) % vertices.len()];
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let n = (len / step).ceil().max(1.0) as usize;
        for j in 0..n {
            let t = j as f64 / n as f64;
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}

/// Rotates a closed polyline so it starts at the point whose polar angle
/// around `center` is closest to `theta`.
fn rotate_to_angle(mut pts: Vec<(f64, f64)>, center: (f64, f64), theta: f64) -> Vec<(f64, f64)> {
    let dist = |p: &(f64, f64)| {
        let a = (p.1 - center.1).atan2(p.0 - center.0);
        let d = (a - theta).rem_euclid(TAU);
        d.min(TAU - d)
    };
    let best = (0..pts.len())
        .min_by(|&i, &j| dist(&pts[i]).total_cmp(&dist(&pts[j])))
        .unwrap_or(0);
    pts.rotate_left(best);
    pts
}

/// Resamples a closed polyline at (approximately) uniform arc-length spacing.
fn resample_closed(pts: &[(f64, f64)], spacing: f64) -> Vec<(f64, f64)> {
    let n = pts.len();
    let seg_len: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt()
        })
        .collect();
    let total: f64 = seg_len.iter().sum();
    let count = (total / spacing).round().max(1.0) as usize;
    let step = total / count as f64;

    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for k in 0..count {
        let s = k as f64 * step;
        while seg + 1 < n && seg_start + seg_len[seg] < s {
            seg_start += seg_len[seg];
            seg += 1;
        }
        let (a, b) = (pts[seg], pts[(seg + 1) % n]);
        let t = if seg_len[seg] > 0.0 {
            ((s - seg_start) / seg_len[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
    }
    out
}

fn rasterize_corridor(width: u32, height: u32, centerline: &[(f64, f64)], half: f64) -> Result<OccupancyGrid> {
    let (w, h) = (width as i64, height as i64);
    let mut mask = vec![false; width as usize * height as usize];
    let r2 = half * half;
    for &(px, py) in centerline {
        let x0 = ((px - half).floor() as i64).max(0);
        let x1 = ((px + half).ceil() as i64).min(w - 1);
        let y0 = ((py - half).floor() as i64).max(0);
        let y1 = ((py + half).ceil() as i64).min(h - 1);
        for y in y0..=y1 {
            let dy = y as f64 + 0.5 - py;
            let row = y as usize * width as usize;
            for x in x0..=x1 {
                let dx = x as f64 + 0.5 - px;
                if dx * dx + dy * dy <= r2 {
                    mask[row + x as usize] = true;
                }
            }
        }
    }
    OccupancyGrid::new(width, height, mask)
}
