use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    reset_from, select_action, EpisodeEnd, EpisodeRecord, Learner, TrainConfig, TrainingWorld,
    Transition,
};
use crate::error::Result;
use crate::gridworld::{GridMap, StepStatus};
use crate::neuralnet::{DeltaEval, DeltaForward, NetworkParams};
use crate::reward::step_reward;

/// RNG streams derived from the run seed. Parameter initialization uses
/// stream 0 of the same seed.
const STREAM_EXPERIENCE: u64 = 1;
const STREAM_MAP_CHOICE: u64 = 2;

#[derive(Clone, Debug)]
pub struct TrainingRun {
    /// Final online network, including optimizer state.
    pub params: NetworkParams,
    pub episodes: Vec<EpisodeRecord>,
    pub gradient_updates: u64,
}

/// Trains on a single map.
pub fn run_training(map: &GridMap, config: &TrainConfig) -> Result<TrainingRun> {
    train_on_maps(vec![map.clone()], config, |_| {})
}

/// Trains one network across `maps`, choosing a map uniformly at random for
/// every episode. `on_episode` sees each record as it completes.
pub fn train_on_maps(
    maps: Vec<GridMap>,
    config: &TrainConfig,
    mut on_episode: impl FnMut(&EpisodeRecord),
) -> Result<TrainingRun> {
    config.validate()?;
    let world = TrainingWorld::new(maps)?;
    let arch = world.arch(&config.network);
    let mut learner = Learner::new(
        NetworkParams::init(arch, config.seed)?,
        config.replay_capacity,
    );

    let mut rng = stream(config.seed, STREAM_EXPERIENCE);
    let mut map_rng = stream(config.seed, STREAM_MAP_CHOICE);
    let mut episodes = Vec::new();
    let mut overrides = Vec::new();
    let mut eval = DeltaEval::default();

    let mut env_steps = 0u64;
    while env_steps < config.total_train_steps {
        let map_index = if world.len() > 1 {
            map_rng.gen_range(0..world.len())
        } else {
            0
        };
        let map = world.map(map_index);
        let initial = reset_from(
            map.start(),
            world.free_positions(map_index),
            config,
            &mut rng,
        );
        let mut episode = EpisodeRecord {
            initial,
            map: map_index,
            steps: 0,
            total_reward: 0.0,
            average_reward_per_step: 0.0,
            termination: EpisodeEnd::Truncated,
            path: vec![initial],
            epsilon: config.epsilon_at(env_steps),
        };

        let mut pos = initial;
        loop {
            let epsilon = config.epsilon_at(env_steps);
            world.overrides(map_index, pos, &mut overrides);
            let q = {
                let fw = DeltaForward::new(&learner.online, world.reference())?;
                fw.eval_into(&overrides, &mut eval);
                eval.q
            };
            let action = select_action(&q, epsilon, &mut rng);
            let outcome = map.apply_action(pos, action)?;
            let reward = if config.use_shaped_reward || outcome.status.is_terminal() {
                step_reward(&config.reward, map.start(), map.end(), pos, &outcome)
            } else {
                0.0
            };
            let terminal = outcome.status.is_terminal();
            learner.remember(Transition {
                map: map_index,
                state: pos,
                action,
                reward,
                next_state: outcome.next,
                terminal,
            });
            env_steps += 1;
            learner.train_step(&world, config, &mut rng)?;

            episode.steps += 1;
            episode.total_reward += reward;
            if matches!(outcome.status, StepStatus::Moving | StepStatus::ReachedEnd) {
                episode.path.push(outcome.next);
            }
            if let Some(end) = EpisodeEnd::from_status(outcome.status) {
                episode.termination = end;
                break;
            }
            if episode.steps >= config.max_episode_steps {
                episode.termination = EpisodeEnd::StepCap;
                break;
            }
            if env_steps >= config.total_train_steps {
                break;
            }
            pos = outcome.next;
        }
        episode.average_reward_per_step = episode.total_reward / episode.steps as f64;
        on_episode(&episode);
        episodes.push(episode);
    }

    Ok(TrainingRun {
        gradient_updates: learner.updates(),
        params: learner.online,
        episodes,
    })
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
