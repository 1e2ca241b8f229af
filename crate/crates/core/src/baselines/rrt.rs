use rand::Rng;

use super::PlanResult;
use crate::agent::path_length;
use crate::error::{Error, Result};
use crate::gridworld::{CellKind, GridMap, Position};

/// Grid RRT: grow a tree from `start` by sampling passable cells and taking
/// one king move from the nearest tree node toward each sample. The tree
/// never revisits a cell. Returns the tree path to the end, which is
/// generally not the shortest.
pub fn rrt_plan<R: Rng>(
    map: &GridMap,
    start: Position,
    max_samples: usize,
    rng: &mut R,
) -> Result<PlanResult> {
    if !matches!(map.cell(start), Some(CellKind::Free | CellKind::Start)) {
        return Err(Error::InvalidPosition(start));
    }
    let pool: Vec<Position> = map
        .cells()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_passable())
        .map(|(i, _)| map.position_of(i))
        .collect();
    let mut nodes = vec![start];
    let mut parent = vec![usize::MAX];
    let mut in_tree = vec![false; map.cells().len()];
    in_tree[map.index_of(start).unwrap()] = true;

    for sample_no in 1..=max_samples {
        let sample = pool[rng.gen_range(0..pool.len())];
        let (nearest, _) = nodes
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.distance(sample)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let from = nodes[nearest];
        let (dx, dy) = ((sample.x - from.x).signum(), (sample.y - from.y).signum());
        if (dx, dy) == (0, 0) {
            continue;
        }
        let next = from.offset(dx, dy);
        let Some(j) = map.index_of(next) else {
            continue;
        };
        if in_tree[j] || !map.cells()[j].is_passable() {
            continue;
        }
        in_tree[j] = true;
        nodes.push(next);
        parent.push(nearest);
        if next == map.end() {
            let mut path = Vec::new();
            let mut cur = nodes.len() - 1;
            while cur != usize::MAX {
                path.push(nodes[cur]);
                cur = parent[cur];
            }
            path.reverse();
            return Ok(PlanResult {
                length: path_length(&path),
                path,
                expanded: sample_no,
            });
        }
    }
    Err(Error::SampleBudgetExhausted(max_samples))
}
