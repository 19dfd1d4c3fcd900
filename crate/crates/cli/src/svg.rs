//! Static SVG plots: curves in the Poincaré disk, surfaces as wireframes of
//! their Poincaré-ball image under a fixed oblique projection.

use std::fmt::Write as _;

use geodloom::grid::Domain;
use geodloom::lorentz::MinkowskiVector;

use crate::error::CliError;

const SIZE: f64 = 512.0;
const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad"];

/// Node values of one chart to draw.
pub struct Layer {
    pub label: String,
    pub domain: Domain,
    pub points: Vec<MinkowskiVector>,
}

/// Hyperboloid point to the Poincaré ball.
fn ball(x: &MinkowskiVector) -> Vec<f64> {
    let s = x.as_slice();
    let t = s[s.len() - 1];
    s[..s.len() - 1].iter().map(|c| c / (1.0 + t)).collect()
}

fn project(b: &[f64]) -> (f64, f64) {
    match b.len() {
        2 => (b[0], b[1]),
        _ => {
            let (phi, psi) = (0.6f64, 0.45f64);
            let x = b[0] * phi.cos() - b[1] * phi.sin();
            let depth = b[0] * phi.sin() + b[1] * phi.cos();
            (x, b[2] * psi.cos() - depth * psi.sin())
        }
    }
}

fn screen((x, y): (f64, f64)) -> (f64, f64) {
    let r = 0.45 * SIZE;
    (0.5 * SIZE + r * x, 0.5 * SIZE - r * y)
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = pts.iter().map(|p| screen(*p)).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let _ =
        writeln!(out, r#"  <polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, coords.join(" "));
}

/// Renders the layers; n = 1 and n = 2 only.
pub fn render(layers: &[Layer]) -> Result<String, CliError> {
    let n = layers.first().map(|l| l.domain.dim()).unwrap_or(1);
    if n > 2 || layers.iter().any(|l| l.domain.dim() != n) {
        return Err(CliError::Schema(format!("--svg supports n = 1 and n = 2 charts, got n = {n}")));
    }
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let c = 0.5 * SIZE;
    let _ = writeln!(
        out,
        r##"  <circle cx="{c}" cy="{c}" r="{:.3}" fill="none" stroke="#888" stroke-width="1"/>"##,
        0.45 * SIZE
    );
    for (k, layer) in layers.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let dom = &layer.domain;
        let proj: Vec<(f64, f64)> = layer.points.iter().map(|x| project(&ball(x))).collect();
        if n == 1 {
            polyline(&mut out, &proj, color);
        } else {
            let (s0, s1) = (dom.samples[0], dom.samples[1]);
            for j in 0..s1 {
                let row: Vec<(f64, f64)> = (0..s0).map(|i| proj[dom.flat(&[i, j])]).collect();
                polyline(&mut out, &row, color);
            }
            for i in 0..s0 {
                let col: Vec<(f64, f64)> = (0..s1).map(|j| proj[dom.flat(&[i, j])]).collect();
                polyline(&mut out, &col, color);
            }
        }
        let _ = writeln!(
            out,
            r#"  <text x="12" y="{:.0}" font-family="sans-serif" font-size="13" fill="{color}">{}</text>"#,
            20.0 + 16.0 * k as f64,
            escape(&layer.label)
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
