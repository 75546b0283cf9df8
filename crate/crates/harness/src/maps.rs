use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use autodrive_core::sim::{generate_map, load_track_pair, pair_paths, save_track_pair, Archetype, GenParams, TrackMap};

/// A track named on the command line: a file pair on disk wins over an
/// archetype of the same name.
pub fn resolve_map(spec: &str, map_seed: u64) -> Result<TrackMap> {
    let (mask, meta) = pair_paths(spec);
    if mask.exists() || meta.exists() {
        return load_track_pair(spec).with_context(|| format!("loading track {spec}"));
    }
    match spec.parse::<Archetype>() {
        Ok(arch) => Ok(generate(arch, map_seed)?),
        Err(_) => bail!("{spec:?} is neither a track file prefix ({} / {}) nor a known archetype", mask.display(), meta.display()),
    }
}

pub fn generate(arch: Archetype, seed: u64) -> Result<TrackMap> {
    Ok(generate_map(arch, &GenParams::for_archetype(arch), seed)?)
}

/// Writes `map1` .. `map4` (mask and meta) into `dir` and returns the prefixes.
pub fn gen_maps(dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut out = Vec::new();
    for arch in Archetype::ALL {
        let track = generate(arch, seed)?;
        let prefix = dir.join(format!("map{}", arch.map_number()));
        save_track_pair(&track, &prefix)?;
        out.push(prefix);
    }
    Ok(out)
}
