//! SVG 1.1 rendering of curves in the disk models, on a fixed 1000×1000 viewport.

use std::fmt::Write;

use pelastica::lorentz::{poincare_project, punctured_project};
use pelastica::{Result, SpaceForm, Vec3L};

const SIZE: f64 = 1000.0;
const CENTER: f64 = 500.0;
const DISK_RADIUS: f64 = 480.0;
const PALETTE: [&str; 6] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#17202a"];

pub struct Polyline {
    pub label: String,
    pub points: Vec<Vec3L>,
}

/// Map a point of the quadric to its disk model: Poincaré for ℍ², punctured disk for ℍ²₁.
pub fn model_point(space: SpaceForm, v: Vec3L) -> Result<(f64, f64)> {
    match space {
        SpaceForm::Hyperbolic => poincare_project(v),
        SpaceForm::DeSitter => punctured_project(v),
    }
}

fn to_screen((u, w): (f64, f64)) -> (f64, f64) {
    // y grows downwards on screen
    (CENTER + DISK_RADIUS * u, CENTER - DISK_RADIUS * w)
}

pub fn render(space: SpaceForm, title: &str, curves: &[Polyline]) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r##"<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r##"<circle id="boundary" cx="{CENTER}" cy="{CENTER}" r="{DISK_RADIUS}" fill="none" stroke="#000000" stroke-width="1.5"/>"##
    );
    match space {
        SpaceForm::Hyperbolic => {
            let _ = writeln!(s, r##"<circle id="pole" cx="{CENTER}" cy="{CENTER}" r="4" fill="#000000"/>"##);
        }
        SpaceForm::DeSitter => {
            let _ = writeln!(
                s,
                r##"<circle id="puncture" cx="{CENTER}" cy="{CENTER}" r="5" fill="#ffffff" stroke="#000000" stroke-width="1.5"/>"##
            );
        }
    }
    for (i, c) in curves.iter().enumerate() {
        let mut pts = String::new();
        for v in &c.points {
            let (x, y) = to_screen(model_point(space, *v)?);
            let _ = write!(pts, "{x:.3},{y:.3} ");
        }
        let _ = writeln!(
            s,
            r#"<polyline class="curve" data-label="{}" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            escape(&c.label),
            pts.trim_end(),
            PALETTE[i % PALETTE.len()]
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
