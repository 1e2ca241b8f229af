//! Grid path planning with an improved Double DQN.
//!
//! The learner combines two changes to plain Double DQN: episodes restart
//! either at the designated start or at a uniformly random free cell, and
//! free moves earn a distance-shaped reward built from the distances to the
//! start and to the end. A*, Dijkstra and a grid RRT run on the same
//! 8-connected dynamics for comparison.

pub mod agent;
pub mod baselines;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod gridworld;
pub mod neuralnet;
pub mod reward;

pub use error::{Error, Result};
pub use gridworld::{Action, CellKind, GridMap, Position, StepOutcome, StepStatus};
