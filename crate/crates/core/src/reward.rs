//! Terminal rewards and the distance-shaped reward for free moves.
//!
//! A free move from `prev` to `curr` earns
//!
//! ```text
//! alpha * (d(prev, end) - d(curr, end))
//!   + beta * (d(start, curr) - d(start, prev) - d(prev, curr))
//! ```
//!
//! with Euclidean distances. The first term pays for progress toward the
//! end; the second is never positive and vanishes exactly when `prev`
//! lies on the straight segment from `start` to `curr`, so summed over a
//! path it charges the detour relative to a straight line from the start.

use serde::{Deserialize, Serialize};

use crate::gridworld::{Position, StepOutcome, StepStatus};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardParams {
    /// Weight of the goal-progress term.
    pub alpha: f64,
    /// Weight of the path-straightness term.
    pub beta: f64,
    pub reward_end: f64,
    pub reward_obstacle: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            alpha: 0.6,
            beta: 0.4,
            reward_end: 10.0,
            reward_obstacle: -10.0,
        }
    }
}

/// Distances feeding the shaped reward for one move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardTerms {
    pub d_re_prev: f64,
    pub d_re_curr: f64,
    pub d_rs_prev: f64,
    pub d_rs_curr: f64,
    pub d_step: f64,
}

impl RewardTerms {
    pub fn new(start: Position, end: Position, prev: Position, curr: Position) -> Self {
        RewardTerms {
            d_re_prev: prev.distance(end),
            d_re_curr: curr.distance(end),
            d_rs_prev: start.distance(prev),
            d_rs_curr: start.distance(curr),
            d_step: prev.distance(curr),
        }
    }

    /// Unweighted goal-progress term.
    pub fn progress(&self) -> f64 {
        self.d_re_prev - self.d_re_curr
    }

    /// Unweighted straightness term; `<= 0` up to rounding.
    pub fn straightness(&self) -> f64 {
        self.d_rs_curr - self.d_rs_prev - self.d_step
    }
}

pub fn shaped_reward(
    params: &RewardParams,
    start: Position,
    end: Position,
    prev: Position,
    curr: Position,
) -> f64 {
    let terms = RewardTerms::new(start, end, prev, curr);
    params.alpha * terms.progress() + params.beta * terms.straightness()
}

/// Reward for one environment step. Terminal outcomes replace the shaped
/// reward rather than adding to it.
pub fn step_reward(
    params: &RewardParams,
    start: Position,
    end: Position,
    prev: Position,
    outcome: &StepOutcome,
) -> f64 {
    match outcome.status {
        StepStatus::ReachedEnd => params.reward_end,
        StepStatus::HitObstacle | StepStatus::OffGrid => params.reward_obstacle,
        StepStatus::Moving => shaped_reward(params, start, end, prev, outcome.next),
    }
}
