#![allow(dead_code)]

use gridnav::baselines::astar;
use gridnav::{CellKind, GridMap};
use rand::Rng;

/// Random map with obstacles at `density`, distinct random start and end,
/// redrawn until A* finds a path.
pub fn random_solvable_map<R: Rng>(
    rng: &mut R,
    width: usize,
    height: usize,
    density: f64,
) -> GridMap {
    loop {
        let mut cells: Vec<CellKind> = (0..width * height)
            .map(|_| {
                if rng.gen::<f64>() < density {
                    CellKind::Obstacle
                } else {
                    CellKind::Free
                }
            })
            .collect();
        let s = rng.gen_range(0..cells.len());
        let e = rng.gen_range(0..cells.len());
        if s == e {
            continue;
        }
        cells[s] = CellKind::Start;
        cells[e] = CellKind::End;
        let map = GridMap::new(width, height, cells).unwrap();
        if astar(&map, map.start()).is_ok() {
            return map;
        }
    }
}
