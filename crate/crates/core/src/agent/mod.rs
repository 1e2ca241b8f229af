//! Double DQN learner: exploration, targets, replay and the training loop.

mod config;
mod history;
mod learner;
mod replay;
mod rollout;
mod train;
mod world;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gridworld::{Action, GridMap, Position, StepStatus};
use crate::neuralnet::{argmax, NetworkParams, QValues};

pub use config::TrainConfig;
pub use history::{read_episode_csv, write_episode_csv, EpisodeRow};
pub use learner::{Learner, TrainStep};
pub use replay::{ReplayBuffer, Transition};
pub use rollout::{rollout_policy, rollout_with_rewards};
pub use train::{run_training, train_on_maps, TrainingRun};
pub use world::TrainingWorld;

/// ε-greedy choice: a uniformly random action with probability `epsilon`,
/// otherwise the greedy one (lowest index on ties).
pub fn select_action<R: Rng>(q: &QValues, epsilon: f64, rng: &mut R) -> Action {
    if rng.gen::<f64>() < epsilon {
        Action::from_slot(rng.gen_range(0..Action::COUNT))
    } else {
        argmax(q)
    }
}

/// Double DQN target for one transition: the online network picks the
/// bootstrap action, the target network values it.
pub fn compute_target(
    online: &NetworkParams,
    target: &NetworkParams,
    map: &GridMap,
    transition: &Transition,
    gamma: f64,
) -> Result<f64> {
    if transition.terminal {
        return Ok(transition.reward);
    }
    let next = map.encode_state(transition.next_state)?;
    let chosen = argmax(&online.forward(&next)?);
    Ok(transition.reward + gamma * target.forward(&next)?[chosen.slot()])
}

/// Where the next episode begins.
pub fn reset_episode<R: Rng>(map: &GridMap, config: &TrainConfig, rng: &mut R) -> Position {
    reset_from(map.start(), &map.free_positions(), config, rng)
}

pub(crate) fn reset_from<R: Rng>(
    start: Position,
    free: &[Position],
    config: &TrainConfig,
    rng: &mut R,
) -> Position {
    if !config.use_random_init || rng.gen::<f64>() < config.p_r {
        start
    } else {
        free[rng.gen_range(0..free.len())]
    }
}

/// Why an episode or rollout stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeEnd {
    ReachedEnd,
    HitObstacle,
    OffGrid,
    /// Step cap hit.
    StepCap,
    /// Greedy rollout returned to a cell it had already visited.
    Revisit,
    /// The run's step budget ran out mid-episode.
    Truncated,
}

impl EpisodeEnd {
    pub fn from_status(status: StepStatus) -> Option<Self> {
        match status {
            StepStatus::Moving => None,
            StepStatus::ReachedEnd => Some(EpisodeEnd::ReachedEnd),
            StepStatus::HitObstacle => Some(EpisodeEnd::HitObstacle),
            StepStatus::OffGrid => Some(EpisodeEnd::OffGrid),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EpisodeEnd::ReachedEnd => "reached_end",
            EpisodeEnd::HitObstacle => "hit_obstacle",
            EpisodeEnd::OffGrid => "off_grid",
            EpisodeEnd::StepCap => "step_cap",
            EpisodeEnd::Revisit => "revisit",
            EpisodeEnd::Truncated => "truncated",
        }
    }

    pub fn is_success(self) -> bool {
        self == EpisodeEnd::ReachedEnd
    }
}

impl fmt::Display for EpisodeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EpisodeEnd {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            EpisodeEnd::ReachedEnd,
            EpisodeEnd::HitObstacle,
            EpisodeEnd::OffGrid,
            EpisodeEnd::StepCap,
            EpisodeEnd::Revisit,
            EpisodeEnd::Truncated,
        ]
        .into_iter()
        .find(|e| e.as_str() == s)
        .ok_or_else(|| format!("unknown termination {s:?}"))
    }
}

/// Trace of one training episode or evaluation rollout.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub initial: Position,
    /// Index of the map within the training set.
    pub map: usize,
    pub steps: usize,
    pub total_reward: f64,
    pub average_reward_per_step: f64,
    pub termination: EpisodeEnd,
    /// Cells the robot stood on, starting with `initial`; ends with the end
    /// cell on success.
    pub path: Vec<Position>,
    /// Exploration rate when the episode began.
    pub epsilon: f64,
}

impl EpisodeRecord {
    pub fn succeeded(&self) -> bool {
        self.termination.is_success()
    }

    /// Sum of Euclidean step lengths along `path`.
    pub fn path_length(&self) -> f64 {
        path_length(&self.path)
    }
}

pub fn path_length(path: &[Position]) -> f64 {
    path.windows(2).map(|w| w[0].distance(w[1])).sum()
}
