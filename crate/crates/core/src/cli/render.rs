//! SVG output for maps, paths and training curves.

use std::fmt::Write;

use crate::agent::EpisodeRow;
use crate::error::{Error, Result};
use crate::gridworld::{CellKind, GridMap, Position};

const CELL: usize = 20;
const CURVE_W: f64 = 640.0;
const CURVE_H: f64 = 360.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

fn cell_fill(kind: CellKind) -> &'static str {
    match kind {
        CellKind::Free => "#ffffff",
        CellKind::Obstacle => "#000000",
        CellKind::Start => "#2ca02c",
        CellKind::End => "#1f4fd6",
    }
}

/// One rectangle per cell, y pointing up, plus an optional path polyline
/// through cell centers.
pub fn map_svg(map: &GridMap, path: Option<&[Position]>) -> String {
    let (w, h) = (map.width(), map.height());
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w * CELL,
        h * CELL,
        w * CELL,
        h * CELL
    )
    .unwrap();
    for (i, &kind) in map.cells().iter().enumerate() {
        let p = map.position_of(i);
        let (sx, sy) = (p.x as usize * CELL, (h - 1 - p.y as usize) * CELL);
        writeln!(
            out,
            r##"<rect x="{sx}" y="{sy}" width="{CELL}" height="{CELL}" fill="{}" stroke="#cccccc" stroke-width="0.5"/>"##,
            cell_fill(kind)
        )
        .unwrap();
    }
    if let Some(path) = path {
        let points: Vec<String> = path
            .iter()
            .map(|p| {
                let cx = p.x as f64 * CELL as f64 + CELL as f64 / 2.0;
                let cy = (h as f64 - 1.0 - p.y as f64) * CELL as f64 + CELL as f64 / 2.0;
                format!("{cx},{cy}")
            })
            .collect();
        writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#e8291c" stroke-width="3" stroke-linejoin="round"/>"##,
            points.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Line chart with one polyline per metric, x = episode index. Each metric
/// is scaled to the shared y range of all plotted metrics.
pub fn curve_svg(rows: &[EpisodeRow], metrics: &[String]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Config("episode history is empty".into()));
    }
    let mut series = Vec::with_capacity(metrics.len());
    for m in metrics {
        let values = rows
            .iter()
            .map(|r| r.metric(m))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::Config(format!("unknown metric {m:?}")))?;
        series.push(values);
    }
    let all = series.iter().flatten().copied();
    let lo = all.clone().fold(f64::INFINITY, f64::min);
    let mut hi = all.fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let span_x = (rows.len().max(2) - 1) as f64;
    let plot_w = CURVE_W - 2.0 * MARGIN;
    let plot_h = CURVE_H - 2.0 * MARGIN;
    let sx = |i: usize| MARGIN + plot_w * i as f64 / span_x;
    let sy = |v: f64| MARGIN + plot_h * (hi - v) / (hi - lo);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CURVE_W}" height="{CURVE_H}" viewBox="0 0 {CURVE_W} {CURVE_H}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{CURVE_W}" height="{CURVE_H}" fill="white"/>"#
    )
    .unwrap();
    let (x0, x1, y0, y1) = (MARGIN, CURVE_W - MARGIN, MARGIN, CURVE_H - MARGIN);
    writeln!(
        out,
        r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    )
    .unwrap();
    if lo < 0.0 && hi > 0.0 {
        let z = sy(0.0);
        writeln!(
            out,
            r##"<line x1="{x0}" y1="{z}" x2="{x1}" y2="{z}" stroke="#999999" stroke-dasharray="4 3"/>"##
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{x0}" y="{}" font-size="11">{hi:.3}</text>"#,
        y0 - 6.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{x0}" y="{}" font-size="11">{lo:.3}</text>"#,
        y1 + 14.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11">episode</text>"#,
        x1 - 40.0,
        y1 + 14.0
    )
    .unwrap();

    for (k, (name, values)) in metrics.iter().zip(&series).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", sx(i), sy(v)))
            .collect();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
            points.join(" ")
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{name}</text>"#,
            x0 + 8.0,
            y0 + 14.0 * (k as f64 + 1.0)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}
