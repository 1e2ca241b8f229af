//! Text map format.
//!
//! ```text
//! <width> <height>
//! <row height-1>
//! ...
//! <row 0>
//! ```
//!
//! Rows use `.` free, `#` obstacle, `S` start, `E` end. The top row of the
//! file is the highest `y`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CellKind, GridMap};
use crate::error::{Error, Result};

pub fn parse_map(text: &str) -> Result<GridMap> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().ok_or_else(|| format_err(1, "empty input"))?;
    let mut dims = header.split_whitespace().map(str::parse::<usize>);
    let (width, height) = match (dims.next(), dims.next(), dims.next()) {
        (Some(Ok(w)), Some(Ok(h)), None) if w > 0 && h > 0 => (w, h),
        _ => return Err(format_err(1, "expected `<width> <height>`")),
    };

    let mut cells = vec![CellKind::Free; width * height];
    for row in 0..height {
        let line_no = row + 2;
        let line = lines
            .next()
            .ok_or_else(|| format_err(line_no, "missing row"))?;
        let y = height - 1 - row;
        let mut count = 0;
        for (x, c) in line.chars().enumerate() {
            if x >= width {
                return Err(format_err(line_no, format!("row longer than {width}")));
            }
            cells[y * width + x] = CellKind::from_symbol(c)
                .ok_or_else(|| format_err(line_no, format!("unexpected character {c:?}")))?;
            count += 1;
        }
        if count != width {
            return Err(format_err(
                line_no,
                format!("row has {count} cells, expected {width}"),
            ));
        }
    }
    if let Some((i, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(format_err(
            height + 2 + i,
            "trailing content after last row",
        ));
    }
    GridMap::new(width, height, cells)
}

pub fn render_map(map: &GridMap) -> String {
    let mut out = String::with_capacity((map.width() + 1) * (map.height() + 1));
    writeln!(out, "{} {}", map.width(), map.height()).unwrap();
    for y in (0..map.height()).rev() {
        let row = &map.cells()[y * map.width()..(y + 1) * map.width()];
        out.extend(row.iter().map(|c| c.symbol()));
        out.push('\n');
    }
    out
}

pub fn read_map(path: impl AsRef<Path>) -> Result<GridMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_map(&text)
}

pub fn write_map(path: impl AsRef<Path>, map: &GridMap) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_map(map)).map_err(|e| Error::io(path, e))
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::MapFormat {
        line,
        message: message.into(),
    }
}

/// Sidecar facts about a map file, used as test oracles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapMetadata {
    pub width: usize,
    pub height: usize,
    pub obstacle_count: usize,
    pub free_count: usize,
    pub reachable_count: usize,
    pub trapped_count: usize,
}

impl MapMetadata {
    pub fn compute(map: &GridMap) -> Self {
        let free_count = map.free_positions().len();
        let reachable_count = map.reachable_positions().len();
        MapMetadata {
            width: map.width(),
            height: map.height(),
            obstacle_count: map.obstacle_count(),
            free_count,
            reachable_count,
            trapped_count: free_count - reachable_count,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metadata serializes")
    }
}
