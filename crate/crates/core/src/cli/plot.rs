//! Self-contained SVG rendering of a spectrum scan.

use std::fmt::Write as _;

use crate::spectrum::{track_branches, SpectrumScan};
use crate::symmetry::Parity;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 60.0;

fn color(p: Parity) -> &'static str {
    match p {
        Parity::Positive => "#1f4fd8",
        Parity::Negative => "#d62728",
        Parity::Unlabeled => "#808080",
    }
}

/// One polyline per tracked branch and run of equal parity.
pub fn spectrum_svg(scan: &SpectrumScan) -> String {
    let branches = track_branches(scan);
    let g0 = scan.g_grid[0];
    let g1 = *scan.g_grid.last().unwrap();
    let all = scan.levels.iter().flatten().copied();
    let lo = all.clone().fold(f64::INFINITY, f64::min);
    let hi = all.fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
    let x = |g: f64| MARGIN + (g - g0) / (g1 - g0) * (WIDTH - 2.0 * MARGIN);
    let y = |e: f64| HEIGHT - MARGIN - (e - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for k in 0..=4 {
        let g = g0 + (g1 - g0) * k as f64 / 4.0;
        let e = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{g:.3}</text>"#,
            x(g),
            HEIGHT - MARGIN + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{e:.2}</text>"#,
            MARGIN - 6.0,
            y(e) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">g</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.1})">(E+1/2)/beta</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for branch in &branches {
        let mut t = 0;
        while t < scan.g_grid.len() {
            let label = scan.labels[t][branch[t]];
            let mut pts = String::new();
            let mut u = t;
            while u < scan.g_grid.len() && scan.labels[u][branch[u]] == label {
                let _ = write!(pts, "{:.2},{:.2} ", x(scan.g_grid[u]), y(scan.levels[u][branch[u]]));
                u += 1;
            }
            // join to the next run so the curve stays connected
            if u < scan.g_grid.len() {
                let _ = write!(pts, "{:.2},{:.2}", x(scan.g_grid[u]), y(scan.levels[u][branch[u]]));
            }
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                color(label),
                pts.trim_end()
            );
            t = u;
        }
    }
    s.push_str("</svg>\n");
    s
}
