use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{RadarReading, SENSOR_COUNT};

/// Bucket index per radar sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateIndex(pub [usize; SENSOR_COUNT]);

/// Maps each reading to `floor(d / r_max * buckets)`, clamped to the last bucket.
pub fn discretize(radar: &RadarReading, r_max: f64, buckets: usize) -> Result<StateIndex> {
    let mut out = [0usize; SENSOR_COUNT];
    for (slot, &d) in out.iter_mut().zip(&radar.distances) {
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidInput(format!("radar distance {d} is not a finite non-negative value")));
        }
        let b = (d / r_max * buckets as f64).floor();
        *slot = (b as usize).min(buckets - 1);
    }
    Ok(StateIndex(out))
}

/// Dense value table of shape `buckets^5 x actions`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    buckets: usize,
    actions: usize,
    seed: u64,
    values: Vec<f64>,
}

const MAGIC: &[u8; 8] = b"AQTABLE1";
const HEADER_LEN: usize = 8 + 4 + 4 + 4 + 8 + 8;

impl QTable {
    pub fn new(buckets: usize, actions: usize, seed: u64) -> Self {
        assert!(buckets >= 1 && actions >= 1);
        let states = buckets.pow(SENSOR_COUNT as u32);
        Self {
            buckets,
            actions,
            seed,
            values: vec![0.0; states * actions],
        }
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn row_start(&self, s: &StateIndex) -> usize {
        let flat = s.0.iter().fold(0usize, |acc, &b| {
            debug_assert!(b < self.buckets);
            acc * self.buckets + b
        });
        flat * self.actions
    }

    pub fn row(&self, s: &StateIndex) -> &[f64] {
        let i = self.row_start(s);
        &self.values[i..i + self.actions]
    }

    pub fn get(&self, s: &StateIndex, a: usize) -> f64 {
        self.row(s)[a]
    }

    pub fn set(&mut self, s: &StateIndex, a: usize, v: f64) {
        let i = self.row_start(s) + a;
        self.values[i] = v;
    }

    /// Greedy action, ties to the lowest index.
    pub fn argmax(&self, s: &StateIndex) -> usize {
        let row = self.row(s);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_value(&self, s: &StateIndex) -> f64 {
        self.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.values.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.buckets as u32).to_le_bytes());
        out.extend_from_slice(&(SENSOR_COUNT as u32).to_le_bytes());
        out.extend_from_slice(&(self.actions as u32).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |why: String| Error::malformed(path, why);
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("file is {} bytes, shorter than the header", bytes.len())));
        }
        if &bytes[..8] != MAGIC {
            return Err(bad("not a Q-table file".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let buckets = u32_at(8);
        let sensors = u32_at(12);
        let actions = u32_at(16);
        let seed = u64_at(20);
        let count = u64_at(28) as usize;
        if sensors != SENSOR_COUNT {
            return Err(Error::ShapeMismatch(format!("table has {sensors} sensor dimensions, expected {SENSOR_COUNT}")));
        }
        if buckets < 1 || actions < 1 || buckets > 255 {
            return Err(bad(format!("invalid shape {buckets} buckets x {actions} actions")));
        }
        let expected = buckets.pow(SENSOR_COUNT as u32) * actions;
        if count != expected {
            return Err(Error::ShapeMismatch(format!("header declares {count} values, shape implies {expected}")));
        }
        let body = &bytes[HEADER_LEN..];
        if body.len() != count * 8 {
            return Err(bad(format!("expected {} value bytes, found {}", count * 8, body.len())));
        }
        let values: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("table holds non-finite values".into()));
        }
        Ok(Self { buckets, actions, seed, values })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }

    /// Loads and checks the table shape against what the caller will index with.
    pub fn load_expecting(path: impl AsRef<Path>, buckets: usize, actions: usize) -> Result<Self> {
        let t = Self::load(path)?;
        if t.buckets != buckets || t.actions != actions {
            return Err(Error::ShapeMismatch(format!(
                "table is {} buckets x {} actions, expected {buckets} x {actions}",
                t.buckets, t.actions
            )));
        }
        Ok(t)
    }
}

/// Epsilon-greedy choice over the table's actions.
pub fn select_action<R: Rng + ?Sized>(q: &QTable, s: &StateIndex, epsilon: f64, rng: &mut R) -> usize {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        rng.random_range(0..q.action_count())
    } else {
        q.argmax(s)
    }
}

/// One-step Q-learning update. A terminal transition does not bootstrap.
#[allow(clippy::too_many_arguments)]
pub fn update_q(
    q: &mut QTable,
    s: &StateIndex,
    a: usize,
    r: f64,
    s_next: &StateIndex,
    alpha: f64,
    gamma: f64,
    terminal: bool,
) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::InvalidInput(format!("reward {r} is not finite")));
    }
    let bootstrap = if terminal { 0.0 } else { q.max_value(s_next) };
    let old = q.get(s, a);
    q.set(s, a, old + alpha * (r + gamma * bootstrap - old));
    Ok(())
}
