//! Static grid environment: cell types, the 8-connected action model,
//! transition dynamics and the network input encoding.
//!
//! Coordinates: `x` is the column (increasing rightward), `y` the row
//! (increasing upward). Cells are stored row-major with row `y = 0` first.

mod io;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{parse_map, read_map, render_map, write_map, MapMetadata};

/// Encoded value of a free (or vacated start) cell.
pub const ENCODE_FREE: f64 = 0.0;
/// Encoded value of an obstacle cell.
pub const ENCODE_OBSTACLE: f64 = -1.0;
/// Encoded value of the end cell.
pub const ENCODE_END: f64 = 1.0;
/// Encoded value of the cell the robot stands on.
pub const ENCODE_ROBOT: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub x: i32,
    pub y: i32,
}

impl Position {
    pub const fn new(x: i32, y: i32) -> Self {
        Position { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Position::new(self.x + dx, self.y + dy)
    }

    pub fn distance(self, other: Position) -> f64 {
        let dx = f64::from(self.x - other.x);
        let dy = f64::from(self.y - other.y);
        dx.hypot(dy)
    }

    /// Max-norm distance.
    pub fn chebyshev(self, other: Position) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn is_adjacent(self, other: Position) -> bool {
        self.chebyshev(other) == 1
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Free,
    Obstacle,
    Start,
    End,
}

impl CellKind {
    /// Whether the robot may stand on the cell.
    pub fn is_passable(self) -> bool {
        !matches!(self, CellKind::Obstacle)
    }

    pub fn symbol(self) -> char {
        match self {
            CellKind::Free => '.',
            CellKind::Obstacle => '#',
            CellKind::Start => 'S',
            CellKind::End => 'E',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '.' => Some(CellKind::Free),
            '#' => Some(CellKind::Obstacle),
            'S' => Some(CellKind::Start),
            'E' => Some(CellKind::End),
            _ => None,
        }
    }
}

/// One of the eight king moves. Indices run 1..=8 in the order
/// E, NE, N, NW, W, SW, S, SE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(u8);

impl Action {
    pub const COUNT: usize = 8;

    pub const EAST: Action = Action(1);
    pub const NORTH_EAST: Action = Action(2);
    pub const NORTH: Action = Action(3);
    pub const NORTH_WEST: Action = Action(4);
    pub const WEST: Action = Action(5);
    pub const SOUTH_WEST: Action = Action(6);
    pub const SOUTH: Action = Action(7);
    pub const SOUTH_EAST: Action = Action(8);

    const DISPLACEMENTS: [(i32, i32); 8] = [
        (1, 0),
        (1, 1),
        (0, 1),
        (-1, 1),
        (-1, 0),
        (-1, -1),
        (0, -1),
        (1, -1),
    ];

    /// Builds an action from its 1-based index.
    pub fn new(index: u8) -> Option<Self> {
        (1..=8).contains(&index).then_some(Action(index))
    }

    /// Builds an action from a 0-based output slot.
    pub fn from_slot(slot: usize) -> Self {
        assert!(slot < Self::COUNT, "action slot {slot} out of range");
        Action(slot as u8 + 1)
    }

    pub fn all() -> impl Iterator<Item = Action> {
        (1..=8).map(Action)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// 0-based position in a Q-value vector.
    pub fn slot(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn displacement(self) -> (i32, i32) {
        Self::DISPLACEMENTS[self.slot()]
    }

    pub fn step_length(self) -> f64 {
        let (dx, dy) = self.displacement();
        if dx != 0 && dy != 0 {
            std::f64::consts::SQRT_2
        } else {
            1.0
        }
    }

    /// The action moving `from` onto the adjacent cell `to`.
    pub fn between(from: Position, to: Position) -> Option<Action> {
        let d = (to.x - from.x, to.y - from.y);
        Self::DISPLACEMENTS
            .iter()
            .position(|&disp| disp == d)
            .map(Action::from_slot)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepStatus {
    Moving,
    ReachedEnd,
    HitObstacle,
    OffGrid,
}

impl StepStatus {
    pub fn is_terminal(self) -> bool {
        self != StepStatus::Moving
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    /// The attempted cell; for obstacle and off-grid endings this is where
    /// the round ended, not a cell the robot can stand on.
    pub next: Position,
    pub status: StepStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridMap {
    width: usize,
    height: usize,
    cells: Vec<CellKind>,
    start: Position,
    end: Position,
}

impl GridMap {
    /// Validates and builds a map from row-major cells (row `y = 0` first).
    pub fn new(width: usize, height: usize, cells: Vec<CellKind>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMap("map must have at least one cell".into()));
        }
        if width > i32::MAX as usize || height > i32::MAX as usize {
            return Err(Error::InvalidMap("map dimensions too large".into()));
        }
        if cells.len() != width * height {
            return Err(Error::InvalidMap(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        let locate = |kind: CellKind| -> Result<Position> {
            let mut found = cells.iter().enumerate().filter(|(_, &c)| c == kind);
            match (found.next(), found.next()) {
                (Some((i, _)), None) => Ok(Position::new((i % width) as i32, (i / width) as i32)),
                (None, _) => Err(Error::InvalidMap(format!("no {kind:?} cell"))),
                (Some(_), Some(_)) => {
                    Err(Error::InvalidMap(format!("more than one {kind:?} cell")))
                }
            }
        };
        let start = locate(CellKind::Start)?;
        let end = locate(CellKind::End)?;
        Ok(GridMap {
            width,
            height,
            cells,
            start,
            end,
        })
    }

    /// An obstacle-free map with the given start and end.
    pub fn empty(width: usize, height: usize, start: Position, end: Position) -> Result<Self> {
        let mut cells = vec![CellKind::Free; width * height];
        for (pos, kind) in [(start, CellKind::Start), (end, CellKind::End)] {
            if pos.x < 0 || pos.y < 0 || pos.x as usize >= width || pos.y as usize >= height {
                return Err(Error::InvalidPosition(pos));
            }
            cells[pos.y as usize * width + pos.x as usize] = kind;
        }
        GridMap::new(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Position {
        self.start
    }

    pub fn end(&self) -> Position {
        self.end
    }

    pub fn cells(&self) -> &[CellKind] {
        &self.cells
    }

    pub fn contains(&self, pos: Position) -> bool {
        pos.x >= 0 && pos.y >= 0 && (pos.x as usize) < self.width && (pos.y as usize) < self.height
    }

    /// Row-major index of an on-map position.
    pub fn index_of(&self, pos: Position) -> Option<usize> {
        self.contains(pos)
            .then(|| pos.y as usize * self.width + pos.x as usize)
    }

    pub fn position_of(&self, index: usize) -> Position {
        Position::new((index % self.width) as i32, (index / self.width) as i32)
    }

    pub fn cell(&self, pos: Position) -> Option<CellKind> {
        self.index_of(pos).map(|i| self.cells[i])
    }

    pub fn is_passable(&self, pos: Position) -> bool {
        self.cell(pos).is_some_and(CellKind::is_passable)
    }

    pub fn obstacle_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|&&c| c == CellKind::Obstacle)
            .count()
    }

    /// Turns a free cell into an obstacle. Start and end cannot be blocked.
    pub fn set_obstacle(&mut self, pos: Position) -> Result<()> {
        match self.index_of(pos) {
            Some(i) if self.cells[i] == CellKind::Free => {
                self.cells[i] = CellKind::Obstacle;
                Ok(())
            }
            _ => Err(Error::InvalidPosition(pos)),
        }
    }

    /// On-map, passable 8-neighbours of `pos`.
    pub fn passable_neighbors(
        &self,
        pos: Position,
    ) -> impl Iterator<Item = (Action, Position)> + '_ {
        Action::all().filter_map(move |a| {
            let (dx, dy) = a.displacement();
            let next = pos.offset(dx, dy);
            self.is_passable(next).then_some((a, next))
        })
    }

    /// Moves the robot one step. The robot must currently stand on a
    /// passable on-map cell.
    pub fn apply_action(&self, pos: Position, action: Action) -> Result<StepOutcome> {
        if !self.is_passable(pos) {
            return Err(Error::InvalidPosition(pos));
        }
        let (dx, dy) = action.displacement();
        let next = pos.offset(dx, dy);
        let status = match self.cell(next) {
            None => StepStatus::OffGrid,
            Some(CellKind::Obstacle) => StepStatus::HitObstacle,
            Some(CellKind::End) => StepStatus::ReachedEnd,
            Some(CellKind::Free | CellKind::Start) => StepStatus::Moving,
        };
        Ok(StepOutcome { next, status })
    }

    /// Single-channel network input with the robot at `robot`, row-major
    /// `height × width`.
    pub fn encode_state(&self, robot: Position) -> Result<Vec<f64>> {
        let mut out = self.encode_background();
        let i = self
            .index_of(robot)
            .filter(|&i| self.cells[i].is_passable())
            .ok_or(Error::InvalidPosition(robot))?;
        out[i] = ENCODE_ROBOT;
        Ok(out)
    }

    /// Encoding of the map with no robot marker.
    pub fn encode_background(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|c| match c {
                CellKind::Free | CellKind::Start => ENCODE_FREE,
                CellKind::Obstacle => ENCODE_OBSTACLE,
                CellKind::End => ENCODE_END,
            })
            .collect()
    }

    /// Cells the robot can be placed on (free or start), row-major.
    pub fn free_positions(&self) -> Vec<Position> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, CellKind::Free | CellKind::Start))
            .map(|(i, _)| self.position_of(i))
            .collect()
    }

    /// Free positions from which the end can be reached, row-major.
    pub fn reachable_positions(&self) -> Vec<Position> {
        let reach = self.reachability();
        self.free_positions()
            .into_iter()
            .filter(|&p| reach[self.index_of(p).unwrap()])
            .collect()
    }

    /// Per-cell flag: can the end be reached from here. Moves only check
    /// the destination, so the free graph is undirected and a search from
    /// the end suffices.
    pub fn reachability(&self) -> Vec<bool> {
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::new();
        let end_idx = self.index_of(self.end).unwrap();
        seen[end_idx] = true;
        queue.push_back(self.end);
        while let Some(p) = queue.pop_front() {
            for (_, n) in self.passable_neighbors(p) {
                let i = self.index_of(n).unwrap();
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    pub fn is_reachable_from(&self, pos: Position) -> bool {
        self.index_of(pos)
            .is_some_and(|i| self.cells[i].is_passable() && self.reachability()[i])
    }
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_map(self))
    }
}

/// The 20×20 experiment map shipped with the crate.
pub fn canonical_map() -> GridMap {
    parse_map(CANONICAL_MAP).expect("bundled canonical map is valid")
}

pub const CANONICAL_MAP: &str = include_str!("../../maps/canonical.map");
pub const CANONICAL_METADATA: &str = include_str!("../../maps/canonical.meta.toml");

#[cfg(test)]
mod tests {
    use super::*;

    fn empty(w: usize, h: usize) -> GridMap {
        GridMap::empty(
            w,
            h,
            Position::new(0, 0),
            Position::new(w as i32 - 1, h as i32 - 1),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_move_on_empty_map() {
        let map = GridMap::empty(20, 20, Position::new(0, 0), Position::new(19, 19)).unwrap();
        let out = map
            .apply_action(Position::new(5, 5), Action::NORTH_EAST)
            .unwrap();
        assert_eq!(out.next, Position::new(6, 6));
        assert_eq!(out.status, StepStatus::Moving);
    }

    #[test]
    fn stepping_onto_end_terminates() {
        let map = empty(5, 5);
        let out = map
            .apply_action(Position::new(3, 3), Action::NORTH_EAST)
            .unwrap();
        assert_eq!(out.status, StepStatus::ReachedEnd);
        assert_eq!(out.next, map.end());
    }

    #[test]
    fn leaving_the_map_is_off_grid() {
        let map = empty(5, 5);
        let out = map.apply_action(Position::new(0, 0), Action::WEST).unwrap();
        assert_eq!(out.status, StepStatus::OffGrid);
        assert_eq!(out.next, Position::new(-1, 0));
    }

    #[test]
    fn obstacle_hit_reports_attempted_cell() {
        let mut map = empty(5, 5);
        map.set_obstacle(Position::new(2, 2)).unwrap();
        let out = map
            .apply_action(Position::new(1, 1), Action::NORTH_EAST)
            .unwrap();
        assert_eq!(out.status, StepStatus::HitObstacle);
        assert_eq!(out.next, Position::new(2, 2));
    }

    #[test]
    fn corner_cutting_is_allowed() {
        let mut map = empty(3, 3);
        map.set_obstacle(Position::new(1, 0)).unwrap();
        map.set_obstacle(Position::new(0, 1)).unwrap();
        let out = map
            .apply_action(Position::new(0, 0), Action::NORTH_EAST)
            .unwrap();
        assert_eq!(out.status, StepStatus::Moving);
    }

    #[test]
    fn apply_action_rejects_bad_positions() {
        let mut map = empty(4, 4);
        map.set_obstacle(Position::new(1, 1)).unwrap();
        assert!(map.apply_action(Position::new(1, 1), Action::EAST).is_err());
        assert!(map
            .apply_action(Position::new(-1, 0), Action::EAST)
            .is_err());
        assert!(map.apply_action(Position::new(4, 0), Action::EAST).is_err());
    }

    #[test]
    fn encode_two_by_two() {
        let map = empty(2, 2);
        let enc = map.encode_state(Position::new(0, 0)).unwrap();
        assert_eq!(enc, vec![0.5, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn robot_marker_overrides_end() {
        let map = empty(2, 2);
        let enc = map.encode_state(map.end()).unwrap();
        assert_eq!(enc[3], ENCODE_ROBOT);
    }

    #[test]
    fn vacated_start_encodes_as_free() {
        let map = empty(3, 3);
        let enc = map.encode_state(Position::new(1, 1)).unwrap();
        assert_eq!(enc[0], ENCODE_FREE);
    }

    #[test]
    fn encode_rejects_obstacle_cell() {
        let mut map = empty(3, 3);
        map.set_obstacle(Position::new(1, 1)).unwrap();
        assert!(map.encode_state(Position::new(1, 1)).is_err());
    }

    #[test]
    fn free_positions_three_by_three() {
        let mut map = empty(3, 3);
        map.set_obstacle(Position::new(1, 1)).unwrap();
        let free = map.free_positions();
        assert_eq!(free.len(), 7);
        assert!(!free.contains(&map.end()));
        assert!(free.contains(&map.start()));
        assert!(free.windows(2).all(|w| (w[0].y, w[0].x) < (w[1].y, w[1].x)));
    }

    #[test]
    fn ringed_map_keeps_interior_only() {
        let text = "5 5\n#####\n#..E#\n#...#\n#S..#\n#####\n";
        let map = parse_map(text).unwrap();
        let free = map.free_positions();
        assert_eq!(free.len(), 8);
        assert!(free
            .iter()
            .all(|p| (1..4).contains(&p.x) && (1..4).contains(&p.y)));
    }

    #[test]
    fn enclosed_cell_is_not_reachable() {
        let text = "5 5\n.....\n.###E\n.#.#.\n.###.\nS....\n";
        let map = parse_map(text).unwrap();
        let reachable = map.reachable_positions();
        assert_eq!(map.free_positions().len(), reachable.len() + 1);
        assert!(!reachable.contains(&Position::new(2, 2)));
    }

    #[test]
    fn empty_map_everything_reachable() {
        let map = empty(6, 4);
        assert_eq!(map.reachable_positions(), map.free_positions());
    }

    #[test]
    fn map_validation() {
        let mut cells = vec![CellKind::Free; 4];
        assert!(GridMap::new(2, 2, cells.clone()).is_err());
        cells[0] = CellKind::Start;
        cells[1] = CellKind::End;
        cells[2] = CellKind::End;
        assert!(GridMap::new(2, 2, cells.clone()).is_err());
        cells[2] = CellKind::Free;
        assert!(GridMap::new(2, 2, cells.clone()).is_ok());
        assert!(GridMap::new(3, 2, cells).is_err());
    }

    #[test]
    fn action_table() {
        let all: Vec<_> = Action::all().collect();
        assert_eq!(all.len(), 8);
        for a in all {
            let (dx, dy) = a.displacement();
            assert!((dx, dy) != (0, 0));
            assert!(dx.abs() <= 1 && dy.abs() <= 1);
            assert_eq!(Action::from_slot(a.slot()), a);
            assert_eq!(
                Action::between(Position::new(0, 0), Position::new(dx, dy)),
                Some(a)
            );
        }
        assert_eq!(Action::new(0), None);
        assert_eq!(Action::new(9), None);
        assert_eq!(Action::EAST.displacement(), (1, 0));
        assert_eq!(Action::SOUTH_EAST.displacement(), (1, -1));
    }
}
