//! True and avoided crossings between adjacent levels.

use std::fmt::Write as _;

use serde::Serialize;

use super::sweep::{rescale, SpectrumScan};
use crate::error::{Error, Result};
use crate::symmetry::coeffs::fmt17;

/// Refined rescaled gap below which a crossing counts as a degeneracy.
pub const CROSSING_GAP_TOL: f64 = 1e-6;
/// Golden-section search stops once the gap drops below this...
pub const REFINE_GAP_TOL: f64 = 1e-10;
/// ...or the bracket is narrower than this.
pub const REFINE_INTERVAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingKind {
    True,
    Avoided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub pair: (usize, usize),
    pub g_star: f64,
    pub min_gap: f64,
    pub kind: CrossingKind,
}

/// Rescaled gap between levels `i` and `i + 1` at coupling `g`.
pub fn gap_at(scan: &SpectrumScan, i: usize, g: f64) -> Result<f64> {
    let e = scan.spec.energies(g, i + 2)?;
    Ok(rescale(e[i + 1], g) - rescale(e[i], g))
}

/// Golden-section minimization of `f` on `[a, b]`.
pub fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    f_tol: f64,
    x_tol: f64,
) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    for _ in 0..200 {
        if b - a < x_tol || best.1 < f_tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
        for (x, fx) in [(c, fc), (d, fd)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
    }
    Ok(best)
}

/// Finds every interior local minimum of every adjacent gap, refines it
/// and classifies it. A refined gap below [`CROSSING_GAP_TOL`] needs parity
/// labels to be called true; without them the scan is rejected.
pub fn detect_crossings(scan: &SpectrumScan) -> Result<Vec<CrossingEvent>> {
    let nt = scan.g_grid.len();
    if nt < 3 {
        return Err(Error::InvalidParams("crossing detection needs at least 3 grid points".into()));
    }
    let nl = scan.levels.iter().map(Vec::len).min().unwrap_or(0);
    let labeled = scan.is_labeled();
    let mut events = Vec::new();
    for i in 0..nl.saturating_sub(1) {
        let gaps: Vec<f64> = scan.levels.iter().map(|l| l[i + 1] - l[i]).collect();
        for t in 1..nt - 1 {
            if !(gaps[t] < gaps[t - 1] && gaps[t] <= gaps[t + 1]) {
                continue;
            }
            let (g_star, min_gap) = golden_section(
                |g| gap_at(scan, i, g),
                scan.g_grid[t - 1],
                scan.g_grid[t + 1],
                REFINE_GAP_TOL,
                REFINE_INTERVAL_TOL,
            )?;
            let (g_star, min_gap) = if gaps[t] < min_gap {
                (scan.g_grid[t], gaps[t])
            } else {
                (g_star, min_gap)
            };
            let kind = if min_gap < CROSSING_GAP_TOL {
                if !labeled {
                    return Err(Error::UnlabeledScan);
                }
                let near = nearest(&scan.g_grid, g_star);
                let (a, b) = (scan.labels[near][i], scan.labels[near][i + 1]);
                if a.is_labeled() && b.is_labeled() && a != b {
                    CrossingKind::True
                } else {
                    CrossingKind::Avoided
                }
            } else {
                CrossingKind::Avoided
            };
            events.push(CrossingEvent {
                pair: (i, i + 1),
                g_star,
                min_gap,
                kind,
            });
        }
    }
    events.sort_by(|a, b| a.g_star.total_cmp(&b.g_star).then(a.pair.cmp(&b.pair)));
    Ok(events)
}

fn nearest(grid: &[f64], g: f64) -> usize {
    (0..grid.len())
        .min_by(|&a, &b| (grid[a] - g).abs().total_cmp(&(grid[b] - g).abs()))
        .unwrap_or(0)
}

/// JSON array of events with 17-digit values.
pub fn crossings_json(events: &[CrossingEvent]) -> String {
    let mut s = String::from("[");
    for (k, e) in events.iter().enumerate() {
        s.push_str(if k == 0 { "\n" } else { ",\n" });
        let kind = match e.kind {
            CrossingKind::True => "true",
            CrossingKind::Avoided => "avoided",
        };
        let _ = write!(
            s,
            "  {{\"pair\": [{}, {}], \"g_star\": {}, \"min_gap\": {}, \"kind\": \"{kind}\"}}",
            e.pair.0,
            e.pair.1,
            fmt17(e.g_star),
            fmt17(e.min_gap)
        );
    }
    s.push_str(if events.is_empty() { "]\n" } else { "\n]\n" });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_v_minimum() {
        let (x, fx) = golden_section(|x| Ok((x - 0.3141).abs()), 0.2, 0.4, 1e-14, 1e-13).unwrap();
        assert!((x - 0.3141).abs() < 1e-12);
        assert!(fx < 1e-12);
    }

    #[test]
    fn json_shape() {
        let ev = [CrossingEvent {
            pair: (1, 2),
            g_star: 0.25,
            min_gap: 1e-12,
            kind: CrossingKind::True,
        }];
        let s = crossings_json(&ev);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v[0]["pair"][1], 2);
        assert_eq!(v[0]["kind"], "true");
        assert_eq!(crossings_json(&[]), "[]\n");
    }
}
