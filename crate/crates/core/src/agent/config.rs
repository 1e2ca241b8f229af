use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neuralnet::{NetworkArch, OptimizerConfig};
use crate::reward::RewardParams;

/// Every knob of a training run. Defaults reproduce the improved
/// configuration; [`TrainConfig::baseline`] switches off both
/// improvements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub gamma: f64,
    pub batch_size: usize,
    /// Probability of restarting at the designated start when random
    /// initialization is on.
    pub p_r: f64,
    /// Gradient updates between target-network syncs.
    pub target_sync_period: u64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: u64,
    pub max_episode_steps: usize,
    pub replay_capacity: usize,
    pub min_replay_before_training: usize,
    /// Environment steps in the whole run.
    pub total_train_steps: u64,
    pub seed: u64,
    pub use_random_init: bool,
    pub use_shaped_reward: bool,
    pub reward: RewardParams,
    pub optimizer: OptimizerConfig,
    /// Input dimensions are taken from the map at run time.
    pub network: NetworkArch,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            gamma: 0.95,
            batch_size: 32,
            p_r: 0.5,
            target_sync_period: 500,
            epsilon_start: 1.0,
            epsilon_end: 0.1,
            epsilon_decay_steps: 10_000,
            max_episode_steps: 200,
            replay_capacity: 10_000,
            min_replay_before_training: 500,
            total_train_steps: 50_000,
            seed: 0,
            use_random_init: true,
            use_shaped_reward: true,
            reward: RewardParams::default(),
            optimizer: OptimizerConfig::default(),
            network: NetworkArch::default(),
        }
    }
}

impl TrainConfig {
    /// Plain Double DQN: always restart at the start, flat zero reward on
    /// free moves.
    pub fn baseline() -> Self {
        TrainConfig::default().into_baseline()
    }

    pub fn into_baseline(mut self) -> Self {
        self.use_random_init = false;
        self.use_shaped_reward = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return fail(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.p_r) {
            return fail(format!("p_r must lie in [0, 1], got {}", self.p_r));
        }
        if !(0.0..=1.0).contains(&self.epsilon_start)
            || !(0.0..=1.0).contains(&self.epsilon_end)
            || self.epsilon_end > self.epsilon_start
        {
            return fail("epsilon_end <= epsilon_start, both in [0, 1]".into());
        }
        if self.batch_size == 0 || self.replay_capacity == 0 || self.max_episode_steps == 0 {
            return fail(
                "batch_size, replay_capacity and max_episode_steps must be positive".into(),
            );
        }
        if self.target_sync_period == 0 {
            return fail("target_sync_period must be positive".into());
        }
        if self.min_replay_before_training > self.replay_capacity {
            return fail("min_replay_before_training exceeds replay_capacity".into());
        }
        let r = &self.reward;
        if r.alpha < 0.0
            || r.beta < 0.0
            || !r.reward_end.is_finite()
            || !r.reward_obstacle.is_finite()
        {
            return fail("reward weights must be non-negative and finite".into());
        }
        self.optimizer.validate()
    }

    /// Linearly annealed exploration rate after `step` environment steps.
    pub fn epsilon_at(&self, step: u64) -> f64 {
        if self.epsilon_decay_steps == 0 {
            return self.epsilon_end;
        }
        let slope = (self.epsilon_start - self.epsilon_end) / self.epsilon_decay_steps as f64;
        (self.epsilon_start - step as f64 * slope).max(self.epsilon_end)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: TrainConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
