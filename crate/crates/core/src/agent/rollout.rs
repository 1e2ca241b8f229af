use super::{EpisodeEnd, EpisodeRecord};
use crate::error::{Error, Result};
use crate::gridworld::{CellKind, GridMap, Position, StepStatus};
use crate::neuralnet::{DeltaForward, NetworkParams};
use crate::reward::{step_reward, RewardParams};

/// Greedy rollout from `start` with default reward weights.
pub fn rollout_policy(
    map: &GridMap,
    params: &NetworkParams,
    start: Position,
    step_cap: usize,
) -> Result<EpisodeRecord> {
    rollout_with_rewards(map, params, start, step_cap, &RewardParams::default())
}

/// Greedy (ε = 0) rollout. Stops on reaching the end, hitting an obstacle,
/// leaving the map, the step cap, or stepping back onto a visited cell.
pub fn rollout_with_rewards(
    map: &GridMap,
    params: &NetworkParams,
    start: Position,
    step_cap: usize,
    rewards: &RewardParams,
) -> Result<EpisodeRecord> {
    if !matches!(map.cell(start), Some(CellKind::Free | CellKind::Start)) {
        return Err(Error::InvalidPosition(start));
    }
    let background = map.encode_background();
    let net = DeltaForward::new(params, &background)?;
    let mut visited = vec![false; map.cells().len()];
    visited[map.index_of(start).unwrap()] = true;

    let mut record = EpisodeRecord {
        initial: start,
        map: 0,
        steps: 0,
        total_reward: 0.0,
        average_reward_per_step: 0.0,
        termination: EpisodeEnd::StepCap,
        path: vec![start],
        epsilon: 0.0,
    };
    let mut pos = start;
    while record.steps < step_cap {
        let cell = map.index_of(pos).unwrap();
        let action = net.eval(&[(cell, crate::gridworld::ENCODE_ROBOT)]).argmax();
        let outcome = map.apply_action(pos, action)?;
        record.steps += 1;
        record.total_reward += step_reward(rewards, map.start(), map.end(), pos, &outcome);
        match outcome.status {
            StepStatus::Moving => {
                let next = map.index_of(outcome.next).unwrap();
                if visited[next] {
                    record.termination = EpisodeEnd::Revisit;
                    break;
                }
                visited[next] = true;
                record.path.push(outcome.next);
                pos = outcome.next;
            }
            StepStatus::ReachedEnd => {
                record.path.push(outcome.next);
                record.termination = EpisodeEnd::ReachedEnd;
                break;
            }
            other => {
                record.termination = EpisodeEnd::from_status(other).unwrap();
                break;
            }
        }
    }
    if record.steps > 0 {
        record.average_reward_per_step = record.total_reward / record.steps as f64;
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuralnet::NetworkArch;

    #[test]
    fn zero_network_walks_east_off_the_map() {
        let map = GridMap::empty(20, 20, Position::new(2, 10), Position::new(0, 0)).unwrap();
        let net = NetworkParams::zeros(NetworkArch::default()).unwrap();
        let r = rollout_policy(&map, &net, map.start(), 100).unwrap();
        assert_eq!(r.termination, EpisodeEnd::OffGrid);
        assert_eq!(r.steps, 18);
        assert!(r.path.iter().all(|p| p.y == 10));
        assert_eq!(r.path.last().unwrap().x, 19);
    }

    #[test]
    fn east_policy_adjacent_to_end_succeeds() {
        let map = GridMap::empty(20, 20, Position::new(4, 4), Position::new(5, 4)).unwrap();
        let net = NetworkParams::zeros(NetworkArch::default()).unwrap();
        let r = rollout_policy(&map, &net, map.start(), 10).unwrap();
        assert_eq!(r.termination, EpisodeEnd::ReachedEnd);
        assert_eq!(r.path_length(), 1.0);
        assert_eq!(r.total_reward, 10.0);
    }

    #[test]
    fn step_cap_and_revisit() {
        let map = GridMap::empty(20, 20, Position::new(2, 10), Position::new(0, 0)).unwrap();
        let net = NetworkParams::zeros(NetworkArch::default()).unwrap();
        let r = rollout_policy(&map, &net, map.start(), 3).unwrap();
        assert_eq!(r.termination, EpisodeEnd::StepCap);
        assert_eq!(r.steps, 3);

        // One filter reading only its top-left tap fires when the robot sits
        // on an even-even cell; there the policy turns west, elsewhere east.
        let map = GridMap::empty(20, 20, Position::new(5, 4), Position::new(19, 19)).unwrap();
        let arch = NetworkArch {
            conv_filters: 1,
            ..NetworkArch::default()
        };
        let mut net = NetworkParams::zeros(arch).unwrap();
        net.weights.conv_w[0] = 1.0;
        let n = arch.hidden_size();
        let west = crate::gridworld::Action::WEST.slot();
        net.weights.fc_w[west * n..(west + 1) * n].fill(1.0);
        net.weights.fc_b[crate::gridworld::Action::EAST.slot()] = 0.25;
        let r = rollout_policy(&map, &net, map.start(), 50).unwrap();
        assert_eq!(r.termination, EpisodeEnd::Revisit);
        assert_eq!(r.steps, 2);
        assert_eq!(r.path, vec![Position::new(5, 4), Position::new(6, 4)]);
    }

    #[test]
    fn rejects_blocked_start() {
        let mut map = GridMap::empty(20, 20, Position::new(2, 10), Position::new(0, 0)).unwrap();
        map.set_obstacle(Position::new(3, 3)).unwrap();
        let net = NetworkParams::zeros(NetworkArch::default()).unwrap();
        assert!(rollout_policy(&map, &net, Position::new(3, 3), 10).is_err());
        assert!(rollout_policy(&map, &net, map.end(), 10).is_err());
    }
}
