use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::PlanResult;
use crate::agent::path_length;
use crate::error::{Error, Result};
use crate::gridworld::{CellKind, GridMap, Position};

/// Optimal plan with the Euclidean-distance heuristic. Ties in `f` go to
/// the larger `g`, then the lowest `(y, x)`.
pub fn astar(map: &GridMap, start: Position) -> Result<PlanResult> {
    let end = map.end();
    best_first(map, start, |p| p.distance(end))
}

/// Uniform-cost search; the optimality oracle for [`astar`].
pub fn dijkstra(map: &GridMap, start: Position) -> Result<PlanResult> {
    best_first(map, start, |_| 0.0)
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    f: f64,
    g: f64,
    pos: Position,
}

impl Ord for Entry {
    // BinaryHeap is a max-heap: "greater" pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| (other.pos.y, other.pos.x).cmp(&(self.pos.y, self.pos.x)))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

fn best_first(map: &GridMap, start: Position, h: impl Fn(Position) -> f64) -> Result<PlanResult> {
    if !matches!(map.cell(start), Some(CellKind::Free | CellKind::Start)) {
        return Err(Error::InvalidPosition(start));
    }
    let n = map.cells().len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let s = map.index_of(start).unwrap();
    let goal = map.index_of(map.end()).unwrap();
    g[s] = 0.0;
    heap.push(Entry {
        f: h(start),
        g: 0.0,
        pos: start,
    });
    let mut expanded = 0;

    while let Some(Entry { g: gc, pos, .. }) = heap.pop() {
        let i = map.index_of(pos).unwrap();
        if closed[i] || gc > g[i] {
            continue;
        }
        closed[i] = true;
        expanded += 1;
        if i == goal {
            let mut path = vec![pos];
            let mut cur = i;
            while cur != s {
                cur = parent[cur];
                path.push(map.position_of(cur));
            }
            path.reverse();
            return Ok(PlanResult {
                length: path_length(&path),
                path,
                expanded,
            });
        }
        for (action, next) in map.passable_neighbors(pos) {
            let j = map.index_of(next).unwrap();
            if closed[j] {
                continue;
            }
            let cand = gc + action.step_length();
            if cand < g[j] {
                g[j] = cand;
                parent[j] = i;
                heap.push(Entry {
                    f: cand + h(next),
                    g: cand,
                    pos: next,
                });
            }
        }
    }
    Err(Error::NoPath(start))
}
