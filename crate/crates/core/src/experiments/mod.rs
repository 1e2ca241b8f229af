//! Evaluation drivers and the noisy-map corpus experiment.

mod corpus;

use serde::{Deserialize, Serialize};

use crate::agent::{rollout_policy, train_on_maps, EpisodeRecord, TrainConfig, TrainingRun};
use crate::baselines::astar;
use crate::error::Result;
use crate::gridworld::{GridMap, Position};
use crate::neuralnet::NetworkParams;

pub use corpus::{
    generate_noise_corpus, read_corpus, write_corpus, CorpusManifest, NoiseCorpus, NoiseCorpusSpec,
};

/// Step cap for greedy evaluation rollouts.
pub const DEFAULT_EVAL_STEP_CAP: usize = 200;

/// Environment steps for the corpus experiment.
pub const CORPUS_TRAIN_STEPS: u64 = 150_000;

/// Training setup for the noisy-map corpus: the default configuration with
/// a larger step budget, a replay buffer that holds experience from many
/// maps at once, and a slower target-network sync.
pub fn corpus_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        seed,
        total_train_steps: CORPUS_TRAIN_STEPS,
        replay_capacity: 50_000,
        target_sync_period: 2_000,
        ..TrainConfig::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub split: String,
    pub attempted: usize,
    pub succeeded: usize,
    pub success_rate: f64,
    /// Mean of (learned path length / A* optimum) over successful rollouts;
    /// absent when nothing succeeded.
    pub mean_path_ratio: Option<f64>,
}

impl EvalSummary {
    fn from_outcomes(split: &str, outcomes: &[Option<f64>]) -> Self {
        let ratios: Vec<f64> = outcomes.iter().flatten().copied().collect();
        let attempted = outcomes.len();
        EvalSummary {
            split: split.to_string(),
            attempted,
            succeeded: ratios.len(),
            success_rate: if attempted == 0 {
                0.0
            } else {
                ratios.len() as f64 / attempted as f64
            },
            mean_path_ratio: (!ratios.is_empty())
                .then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        }
    }
}

/// Greedy rollout from `start`; on success returns the ratio of its length
/// to the A* optimum.
fn rollout_ratio(
    map: &GridMap,
    params: &NetworkParams,
    start: Position,
    step_cap: usize,
) -> Result<(EpisodeRecord, Option<f64>)> {
    let record = rollout_policy(map, params, start, step_cap)?;
    let ratio = if record.succeeded() {
        Some(record.path_length() / astar(map, start)?.length)
    } else {
        None
    };
    Ok((record, ratio))
}

/// Single greedy rollout from the designated start.
pub fn eval_fixed_start(
    map: &GridMap,
    params: &NetworkParams,
    step_cap: usize,
) -> Result<(EvalSummary, EpisodeRecord)> {
    let (record, ratio) = rollout_ratio(map, params, map.start(), step_cap)?;
    Ok((EvalSummary::from_outcomes("fixed", &[ratio]), record))
}

/// Greedy rollout from every free cell that can reach the end.
pub fn eval_all_starts(
    map: &GridMap,
    params: &NetworkParams,
    step_cap: usize,
) -> Result<EvalSummary> {
    let outcomes = map
        .reachable_positions()
        .into_iter()
        .map(|start| rollout_ratio(map, params, start, step_cap).map(|(_, r)| r))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalSummary::from_outcomes("all-starts", &outcomes))
}

/// Greedy rollout from each map's designated start.
pub fn eval_maps(
    split: &str,
    maps: &[GridMap],
    params: &NetworkParams,
    step_cap: usize,
) -> Result<EvalSummary> {
    let outcomes = maps
        .iter()
        .map(|m| rollout_ratio(m, params, m.start(), step_cap).map(|(_, r)| r))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalSummary::from_outcomes(split, &outcomes))
}

#[derive(Clone, Debug)]
pub struct NoiseExperiment {
    pub run: TrainingRun,
    pub train: EvalSummary,
    pub test: EvalSummary,
}

/// Trains one model over the corpus' training maps and evaluates it on
/// both splits.
pub fn run_noise_experiment(corpus: &NoiseCorpus, config: &TrainConfig) -> Result<NoiseExperiment> {
    let run = train_on_maps(corpus.train.clone(), config, |_| {})?;
    let train = eval_maps("train", &corpus.train, &run.params, DEFAULT_EVAL_STEP_CAP)?;
    let test = eval_maps("test", &corpus.test, &run.params, DEFAULT_EVAL_STEP_CAP)?;
    Ok(NoiseExperiment { run, train, test })
}

/// Writes summaries as CSV with header
/// `split,attempted,succeeded,success_rate,mean_path_ratio`.
pub fn write_summary_csv<W: std::io::Write>(out: W, rows: &[EvalSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "split",
        "attempted",
        "succeeded",
        "success_rate",
        "mean_path_ratio",
    ])?;
    for r in rows {
        w.write_record([
            r.split.clone(),
            r.attempted.to_string(),
            r.succeeded.to_string(),
            r.success_rate.to_string(),
            r.mean_path_ratio.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()
        .map_err(|e| crate::error::Error::io("<summary csv>", e))?;
    Ok(())
}
