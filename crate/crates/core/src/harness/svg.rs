//! Mean-ARI curves as standalone SVG, one file per scenario and direction.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::aggregate::AggregateRow;
use super::config::Method;
use super::scenarios::ScenarioKind;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const Y_MIN: f64 = -0.1;
const Y_MAX: f64 = 1.05;

fn colour(m: Method) -> &'static str {
    match m {
        Method::Kma => "#7f7f7f",
        Method::Kmp => "#d62728",
        Method::Spectral => "#1f77b4",
        Method::Dscore => "#2ca02c",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
}

impl Frame {
    fn x(&self, n: f64) -> f64 {
        let span = (self.x_hi - self.x_lo).max(1.0);
        LEFT + (n - self.x_lo) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let v = v.clamp(Y_MIN, Y_MAX);
        TOP + (Y_MAX - v) / (Y_MAX - Y_MIN) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Renders one panel. Rows must share scenario and direction.
pub fn render_panel(title: &str, rows: &[&AggregateRow]) -> String {
    let mut by_method: BTreeMap<Method, Vec<&AggregateRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.mean_ari.is_finite()) {
        by_method.entry(r.method).or_default().push(r);
    }
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let frame = Frame {
        x_lo: ns.first().copied().unwrap_or(0) as f64,
        x_hi: ns.last().copied().unwrap_or(1) as f64,
    };

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );

    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (frame.y(Y_MIN), frame.y(Y_MAX));
    let _ = writeln!(w, r#"<g stroke="black" stroke-width="1" fill="none">"#);
    let _ = writeln!(w, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y0:.1}"/>"#);
    let _ = writeln!(w, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{y1:.1}"/>"#);
    let _ = writeln!(w, "</g>");

    for tick in 0..=5 {
        let v = tick as f64 * 0.2;
        let y = frame.y(v);
        let _ = writeln!(
            w,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"##,
            x0,
            x0 - 6.0,
            y + 4.0
        );
    }
    for &n in &ns {
        let x = frame.x(n as f64);
        let _ = writeln!(
            w,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">n</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">mean ARI</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (m, pts) in &by_method {
        let c = colour(*m);
        let mut band: Vec<(f64, f64)> = pts
            .iter()
            .map(|r| (frame.x(r.n as f64), frame.y(r.mean_ari + r.sd_ari)))
            .collect();
        band.extend(pts.iter().rev().map(|r| (frame.x(r.n as f64), frame.y(r.mean_ari - r.sd_ari))));
        let poly: Vec<String> = band.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            w,
            r#"<polygon points="{}" fill="{c}" fill-opacity="0.15" stroke="none"/>"#,
            poly.join(" ")
        );
        let line: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.1},{:.1}", frame.x(r.n as f64), frame.y(r.mean_ari)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
            line.join(" ")
        );
        for r in pts {
            let _ = writeln!(
                w,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{c}"/>"#,
                frame.x(r.n as f64),
                frame.y(r.mean_ari)
            );
        }
    }

    let lx = WIDTH - RIGHT + 16.0;
    for (i, m) in by_method.keys().enumerate() {
        let y = TOP + 12.0 + 20.0 * i as f64;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 22.0,
            colour(*m),
            lx + 28.0,
            y + 4.0,
            m
        );
    }
    let _ = writeln!(w, "</svg>");
    s
}

/// Writes `<prefix><scenario>_<directed|undirected>.svg` for every panel
/// present in `rows` and returns the paths.
pub fn emit_svg(rows: &[AggregateRow], path_prefix: &Path) -> Result<Vec<PathBuf>> {
    let mut panels: BTreeMap<(ScenarioKind, bool), Vec<&AggregateRow>> = BTreeMap::new();
    for r in rows {
        panels.entry((r.scenario, !r.directed)).or_default().push(r);
    }
    let prefix = path_prefix.to_string_lossy().into_owned();
    let mut written = Vec::new();
    for ((scenario, undirected), mut group) in panels {
        group.sort_by_key(|r| (r.method, r.n));
        let dir = if undirected { "undirected" } else { "directed" };
        let path = PathBuf::from(format!("{prefix}{scenario}_{dir}.svg"));
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let svg = render_panel(&format!("{scenario} ({dir})"), &group);
        std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
