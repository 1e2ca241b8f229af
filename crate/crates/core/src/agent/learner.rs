use rand::Rng;

use super::{ReplayBuffer, TrainConfig, TrainingWorld, Transition};
use crate::error::Result;
use crate::neuralnet::{adam_step, BatchGradient, DeltaEval, DeltaForward, NetworkParams};

/// Online and target networks plus the replay buffer feeding them.
#[derive(Clone, Debug)]
pub struct Learner {
    pub online: NetworkParams,
    pub target: NetworkParams,
    pub buffer: ReplayBuffer,
    updates: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrainStep {
    /// Not enough experience stored yet.
    Skipped,
    Updated {
        /// Mean squared TD error over the batch, before the update.
        loss: f64,
        /// Whether the target network was refreshed after this update.
        synced: bool,
    },
}

impl Learner {
    pub fn new(online: NetworkParams, replay_capacity: usize) -> Self {
        Learner {
            target: online.target_copy(),
            online,
            buffer: ReplayBuffer::new(replay_capacity),
            updates: 0,
        }
    }

    /// Number of gradient updates applied so far.
    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn remember(&mut self, t: Transition) {
        self.buffer.push(t);
    }

    /// One mini-batch update: sample with replacement, build Double DQN
    /// targets, average the squared-error gradients, take an Adam step and
    /// sync the target network on period boundaries.
    pub fn train_step<R: Rng>(
        &mut self,
        world: &TrainingWorld,
        config: &TrainConfig,
        rng: &mut R,
    ) -> Result<TrainStep> {
        if self.buffer.is_empty() || self.buffer.len() < config.min_replay_before_training {
            return Ok(TrainStep::Skipped);
        }
        let reference = world.reference();
        let scale = 1.0 / config.batch_size as f64;
        let mut overrides = Vec::new();
        let mut eval = DeltaEval::default();
        let mut loss = 0.0;

        let grads = {
            let online = DeltaForward::new(&self.online, reference)?;
            let target = DeltaForward::new(&self.target, reference)?;
            let mut batch = BatchGradient::new(&online);
            for _ in 0..config.batch_size {
                let t = *self.buffer.sample(rng).expect("buffer is non-empty");
                let y = if t.terminal {
                    t.reward
                } else {
                    world.overrides(t.map, t.next_state, &mut overrides);
                    online.eval_into(&overrides, &mut eval);
                    let chosen = eval.argmax();
                    target.eval_into(&overrides, &mut eval);
                    t.reward + config.gamma * eval.q[chosen.slot()]
                };
                world.overrides(t.map, t.state, &mut overrides);
                online.eval_into(&overrides, &mut eval);
                let residual = y - eval.q[t.action.slot()];
                loss += residual * residual * scale;
                batch.add(&eval, t.action, y, scale);
            }
            batch.finish()
        };

        adam_step(&mut self.online, &grads, &config.optimizer);
        self.updates += 1;
        let synced = self.updates.is_multiple_of(config.target_sync_period);
        if synced {
            self.target.sync_from(&self.online);
        }
        Ok(TrainStep::Updated { loss, synced })
    }
}
