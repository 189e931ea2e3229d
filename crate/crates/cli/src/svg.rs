//! SVG 1.1 drawing of overlaid trees.

use std::fmt::Write;

use steiner_core::{Configuration, Point, RealizedTree};

const WIDTH: f64 = 512.0;
const STYLES: [(&str, &str); 4] = [("#1f77b4", "none"), ("#d62728", "6 4"), ("#2ca02c", "2 3"), ("#9467bd", "8 3 2 3")];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One `<g class="tree">` of edge polylines per tree, then the terminals.
pub fn render(p: &Configuration, trees: &[(String, &RealizedTree)]) -> String {
    let all: Vec<Point> = p.points().iter().chain(trees.iter().flat_map(|(_, t)| &t.positions)).copied().collect();
    let (mut lo, mut hi) = (all[0], all[0]);
    for q in &all {
        lo = Point::new(lo.x.min(q.x), lo.y.min(q.y));
        hi = Point::new(hi.x.max(q.x), hi.y.max(q.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let pad = 0.08 * span;
    let scale = WIDTH / (span + 2.0 * pad);
    // y grows downwards in SVG
    let map = |q: Point| ((q.x - lo.x + pad) * scale, (hi.y - q.y + pad) * scale);
    let height = ((hi.y - lo.y) + 2.0 * pad) * scale;
    let width = ((hi.x - lo.x) + 2.0 * pad) * scale;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    for (k, (code, t)) in trees.iter().enumerate() {
        let (color, dash) = STYLES[k % STYLES.len()];
        let _ = writeln!(
            out,
            r#"  <g class="tree" id="tree-{}" data-code="{}" data-length="{:.9}" fill="none" stroke="{color}" stroke-width="2" stroke-dasharray="{dash}">"#,
            k + 1,
            escape(code),
            t.length
        );
        for (a, b) in t.edges() {
            let (ax, ay) = map(t.positions[a]);
            let (bx, by) = map(t.positions[b]);
            let _ = writeln!(out, r#"    <polyline points="{ax:.3},{ay:.3} {bx:.3},{by:.3}"/>"#);
        }
        let _ = writeln!(out, "  </g>");
    }
    let _ = writeln!(out, r#"  <g class="terminals" fill="black">"#);
    for (i, &q) in p.points().iter().enumerate() {
        let (x, y) = map(q);
        let _ = writeln!(out, r#"    <circle cx="{x:.3}" cy="{y:.3}" r="4"><title>{}</title></circle>"#, i + 1);
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    out
}
