//! Classical planners over the same 8-connected, destination-only
//! collision dynamics as the learner.

mod rrt;
mod search;

use std::fmt::Write as _;

use crate::gridworld::{GridMap, Position};

pub use rrt::rrt_plan;
pub use search::{astar, dijkstra};

#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult {
    /// Query start through the end, inclusive.
    pub path: Vec<Position>,
    /// Sum of Euclidean step lengths.
    pub length: f64,
    /// Nodes expanded (search) or samples drawn (RRT).
    pub expanded: usize,
}

impl PlanResult {
    /// Text form: one `x,y` line per cell, then `length=<real> expanded=<int>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.path {
            writeln!(out, "{},{}", p.x, p.y).unwrap();
        }
        writeln!(out, "length={} expanded={}", self.length, self.expanded).unwrap();
        out
    }

    /// Checks the path is 8-connected, obstacle-free, starts at `start` and
    /// ends at the map's end.
    pub fn is_valid_for(&self, map: &GridMap, start: Position) -> bool {
        self.path.first() == Some(&start)
            && self.path.last() == Some(&map.end())
            && self.path.iter().all(|&p| map.is_passable(p))
            && self.path.windows(2).all(|w| w[0].is_adjacent(w[1]))
    }
}

/// Parses the text produced by [`PlanResult::to_text`]. The summary line
/// is optional; `length` is recomputed from the cells when absent.
pub fn parse_path_text(text: &str) -> Result<Vec<Position>, String> {
    let mut path = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("length=") {
            continue;
        }
        let (x, y) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected `x,y`", i + 1))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<i32>()
                .map_err(|e| format!("line {}: {e}", i + 1))
        };
        path.push(Position::new(parse(x)?, parse(y)?));
    }
    Ok(path)
}
