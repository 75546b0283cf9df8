//! Track files: a binary PGM (P5) mask, 255 = drivable and 0 = wall, plus a
//! JSON sidecar carrying the name, start pose, checkpoints and finish line.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::car::Pose;
use super::grid::OccupancyGrid;
use super::track::{Checkpoint, FinishLine, TrackMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackMeta {
    name: String,
    width: u32,
    height: u32,
    start: Pose,
    checkpoints: Vec<MetaCheckpoint>,
    finish: FinishLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaCheckpoint {
    x: f64,
    y: f64,
    radius: f64,
}

pub fn encode_pgm(grid: &OccupancyGrid) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", grid.width(), grid.height());
    let mut out = Vec::with_capacity(header.len() + grid.cells().len());
    out.extend_from_slice(header.as_bytes());
    out.extend(grid.cells().iter().map(|&d| if d { 255u8 } else { 0 }));
    out
}

/// Parses a P5 PGM; any non-zero pixel is drivable.
pub fn decode_pgm(bytes: &[u8], path: &Path) -> Result<OccupancyGrid> {
    let bad = |why: &str| Error::malformed(path, why);
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let begin = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if begin == pos {
            return Err(bad("truncated PGM header"));
        }
        fields.push(std::str::from_utf8(&bytes[begin..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("not a binary PGM (expected magic P5)"));
    }
    let parse = |s: &str, what: &str| s.parse::<u32>().map_err(|_| bad(&format!("bad {what} {s:?}")));
    let width = parse(fields[1], "width")?;
    let height = parse(fields[2], "height")?;
    let maxval = parse(fields[3], "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit PGM masks are supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let n = width as usize * height as usize;
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() != n {
        return Err(bad(&format!(
            "raster holds {} bytes, header declares {width}x{height}",
            raster.len()
        )));
    }
    OccupancyGrid::new(width, height, raster.iter().map(|&b| b != 0).collect())
}

pub fn encode_meta(track: &TrackMap) -> Result<Vec<u8>> {
    let meta = TrackMeta {
        name: track.name.clone(),
        width: track.grid.width(),
        height: track.grid.height(),
        start: track.start,
        checkpoints: track
            .checkpoints
            .iter()
            .map(|c| MetaCheckpoint { x: c.x, y: c.y, radius: c.radius })
            .collect(),
        finish: track.finish,
    };
    let mut out = serde_json::to_vec_pretty(&meta)?;
    out.push(b'\n');
    Ok(out)
}

pub fn save_track(track: &TrackMap, mask_path: impl AsRef<Path>, meta_path: impl AsRef<Path>) -> Result<()> {
    let (mask_path, meta_path) = (mask_path.as_ref(), meta_path.as_ref());
    fs::write(mask_path, encode_pgm(&track.grid)).map_err(|e| Error::io(mask_path, e))?;
    fs::write(meta_path, encode_meta(track)?).map_err(|e| Error::io(meta_path, e))?;
    Ok(())
}

pub fn load_track(mask_path: impl AsRef<Path>, meta_path: impl AsRef<Path>) -> Result<TrackMap> {
    let (mask_path, meta_path) = (mask_path.as_ref(), meta_path.as_ref());
    let bytes = fs::read(mask_path).map_err(|e| Error::io(mask_path, e))?;
    let grid = decode_pgm(&bytes, mask_path)?;
    let text = fs::read(meta_path).map_err(|e| Error::io(meta_path, e))?;
    let meta: TrackMeta =
        serde_json::from_slice(&text).map_err(|e| Error::malformed(meta_path, e.to_string()))?;
    if meta.width != grid.width() || meta.height != grid.height() {
        return Err(Error::malformed(
            meta_path,
            format!(
                "meta declares {}x{} but mask is {}x{}",
                meta.width,
                meta.height,
                grid.width(),
                grid.height()
            ),
        ));
    }
    if meta.start.angle.rem_euclid(360) != meta.start.angle {
        return Err(Error::malformed(meta_path, "start angle must be in [0, 360)"));
    }
    let checkpoints = meta
        .checkpoints
        .iter()
        .enumerate()
        .map(|(index, c)| Checkpoint { x: c.x, y: c.y, radius: c.radius, index })
        .collect();
    TrackMap::new(meta.name, grid, meta.start, checkpoints, meta.finish)
}

/// `<prefix>.pgm` and `<prefix>.json`.
pub fn pair_paths(prefix: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let p = prefix.as_ref();
    let with = |ext: &str| {
        let mut s = p.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".pgm"), with(".json"))
}

pub fn save_track_pair(track: &TrackMap, prefix: impl AsRef<Path>) -> Result<()> {
    let (mask, meta) = pair_paths(prefix);
    save_track(track, mask, meta)
}

pub fn load_track_pair(prefix: impl AsRef<Path>) -> Result<TrackMap> {
    let (mask, meta) = pair_paths(prefix);
    load_track(mask, meta)
}
