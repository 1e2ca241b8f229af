//! Noisy-map corpus: copies of a base map with a few extra obstacles
//! dropped near the base map's optimal path.
//!
//! On disk:
//!
//! ```text
//! <dir>/manifest.toml
//! <dir>/train/000.map ...
//! <dir>/test/000.map ...
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::astar;
use crate::error::{Error, Result};
use crate::gridworld::{read_map, write_map, CellKind, GridMap, Position};

#[derive(Clone, Debug)]
pub struct NoiseCorpusSpec {
    pub base_map: GridMap,
    pub count: usize,
    pub min_new_obstacles: usize,
    pub max_new_obstacles: usize,
    /// Maps assigned to the training split; the rest form the test split.
    pub train_count: usize,
    /// Chebyshev radius around the base A* path where obstacles may land.
    pub placement_band: i32,
    pub seed: u64,
    /// Candidate maps drawn per corpus entry before giving up.
    pub max_retries: usize,
}

impl NoiseCorpusSpec {
    pub fn new(base_map: GridMap, seed: u64) -> Self {
        NoiseCorpusSpec {
            base_map,
            count: 300,
            min_new_obstacles: 1,
            max_new_obstacles: 5,
            train_count: 100,
            placement_band: 1,
            seed,
            max_retries: 1_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.min_new_obstacles == 0 || self.min_new_obstacles > self.max_new_obstacles {
            return Err(Error::Config(
                "need 1 <= min_new_obstacles <= max_new_obstacles".into(),
            ));
        }
        if self.train_count > self.count {
            return Err(Error::Config("train_count exceeds count".into()));
        }
        if self.placement_band < 0 {
            return Err(Error::Config("placement_band must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseCorpus {
    pub train: Vec<GridMap>,
    pub test: Vec<GridMap>,
}

/// Record of how a corpus was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub count: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub min_new_obstacles: usize,
    pub max_new_obstacles: usize,
    pub placement_band: i32,
    pub seed: u64,
    pub max_retries: usize,
    /// SHA-256 of the base map file text.
    pub base_map_sha256: String,
}

impl CorpusManifest {
    pub fn for_spec(spec: &NoiseCorpusSpec) -> Self {
        CorpusManifest {
            count: spec.count,
            train_count: spec.train_count,
            test_count: spec.count - spec.train_count,
            min_new_obstacles: spec.min_new_obstacles,
            max_new_obstacles: spec.max_new_obstacles,
            placement_band: spec.placement_band,
            seed: spec.seed,
            max_retries: spec.max_retries,
            base_map_sha256: crate::cli::sha256_hex(
                crate::gridworld::render_map(&spec.base_map).as_bytes(),
            ),
        }
    }
}

/// Cells that may receive a new obstacle: plain free cells within the
/// placement band of the base map's optimal path.
pub fn placement_candidates(map: &GridMap, band: i32) -> Result<Vec<Position>> {
    let path = astar(map, map.start())?.path;
    Ok(map
        .cells()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == CellKind::Free)
        .map(|(i, _)| map.position_of(i))
        .filter(|p| path.iter().any(|q| q.chebyshev(*p) <= band))
        .collect())
}

pub fn generate_noise_corpus(spec: &NoiseCorpusSpec) -> Result<NoiseCorpus> {
    spec.validate()?;
    let base = &spec.base_map;
    let candidates = placement_candidates(base, spec.placement_band)?;
    if candidates.len() < spec.max_new_obstacles {
        return Err(Error::Corpus(format!(
            "only {} candidate cells near the path, need {}",
            candidates.len(),
            spec.max_new_obstacles
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen: HashSet<Vec<Position>> = HashSet::new();
    let mut maps = Vec::with_capacity(spec.count);
    for n in 0..spec.count {
        let mut accepted = None;
        for _ in 0..spec.max_retries {
            let k = rng.gen_range(spec.min_new_obstacles..=spec.max_new_obstacles);
            let mut added: Vec<Position> = sample(&mut rng, candidates.len(), k)
                .into_iter()
                .map(|i| candidates[i])
                .collect();
            added.sort();
            if seen.contains(&added) {
                continue;
            }
            let mut map = base.clone();
            for &p in &added {
                map.set_obstacle(p)?;
            }
            if astar(&map, map.start()).is_ok() {
                seen.insert(added);
                accepted = Some(map);
                break;
            }
        }
        let map = accepted.ok_or_else(|| {
            Error::Corpus(format!(
                "map {n}: no new solvable layout after {} attempts",
                spec.max_retries
            ))
        })?;
        maps.push(map);
    }
    let test = maps.split_off(spec.train_count);
    Ok(NoiseCorpus { train: maps, test })
}

pub fn write_corpus(
    dir: impl AsRef<Path>,
    corpus: &NoiseCorpus,
    manifest: &CorpusManifest,
) -> Result<()> {
    let dir = dir.as_ref();
    for (split, maps) in [("train", &corpus.train), ("test", &corpus.test)] {
        let sub = dir.join(split);
        fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        for (i, map) in maps.iter().enumerate() {
            write_map(sub.join(format!("{i:03}.map")), map)?;
        }
    }
    let path = dir.join("manifest.toml");
    let text = toml::to_string(manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Loads a corpus directory; maps are read in file-name order.
pub fn read_corpus(dir: impl AsRef<Path>) -> Result<(NoiseCorpus, CorpusManifest)> {
    let dir = dir.as_ref();
    let path = dir.join("manifest.toml");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: CorpusManifest =
        toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let load = |split: &str| -> Result<Vec<GridMap>> {
        let sub = dir.join(split);
        let mut files: Vec<_> = fs::read_dir(&sub)
            .map_err(|e| Error::io(&sub, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "map"))
            .collect();
        files.sort();
        files.iter().map(read_map).collect()
    };
    let corpus = NoiseCorpus {
        train: load("train")?,
        test: load("test")?,
    };
    Ok((corpus, manifest))
}
