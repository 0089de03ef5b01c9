//! Spectra over a grid of couplings.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{count_converged, grown_cutoff, lowest_eigenpairs, lowest_eigenvalues};
use crate::error::{Error, Result};
use crate::model::build_h0_block;
use crate::params::{integer_ratio, ModelParams, Sector};
use crate::symmetry::{label_states, min_cutoff, solve_recurrence, symmetry_operator, Parity};

/// Couplings outside this range are rejected by [`sweep`].
pub const G_RANGE: (f64, f64) = (0.01, 0.49);

/// How the bias depends on `g` along a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasMode {
    /// Constant `epsilon`.
    Fixed(f64),
    /// Constant `epsilon / (2 beta)`; `epsilon` follows `beta(g)`.
    Ratio(f64),
}

impl BiasMode {
    pub fn epsilon(&self, beta: f64) -> f64 {
        match *self {
            BiasMode::Fixed(e) => e,
            BiasMode::Ratio(r) => 2.0 * r * beta,
        }
    }
}

/// Everything about a scan except the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub delta: f64,
    pub bias: BiasMode,
    pub sector: Sector,
    pub cutoff: usize,
    pub n_levels: usize,
}

impl ScanSpec {
    pub fn params_at(&self, g: f64) -> Result<ModelParams> {
        let p = ModelParams::new(self.delta, 0.0, g)?;
        Ok(p.with_epsilon(self.bias.epsilon(p.beta())))
    }

    /// `N` of the symmetry at this coupling, if there is one.
    pub fn n_bias_at(&self, g: f64) -> Result<Option<u32>> {
        Ok(match self.bias {
            BiasMode::Ratio(r) => integer_ratio(r),
            BiasMode::Fixed(_) => self.params_at(g)?.n_bias(),
        })
    }

    /// Lowest `k` transformed-frame energies at coupling `g`.
    pub fn energies(&self, g: f64, k: usize) -> Result<Vec<f64>> {
        let p = self.params_at(g)?;
        lowest_eigenvalues(&build_h0_block(&p, self.sector, self.cutoff)?, k)
    }

    /// Energies and parity labels of the tracked levels at `g`.
    pub fn solve_point(&self, g: f64) -> Result<(Vec<f64>, Vec<Parity>)> {
        let p = self.params_at(g)?;
        let h = build_h0_block(&p, self.sector, self.cutoff)?;
        let Some(n) = self.n_bias_at(g)? else {
            let e = lowest_eigenvalues(&h, self.n_levels)?;
            let labels = vec![Parity::Unlabeled; e.len()];
            return Ok((e, labels));
        };
        let es = lowest_eigenpairs(&h, self.n_levels)?;
        let table = solve_recurrence(n, &p)?.table;
        let j = symmetry_operator(&table, self.sector, self.cutoff.max(min_cutoff(n)))?;
        let labels = label_states(&j.j_real, &es).labels;
        Ok((es.values, labels))
    }
}

/// Eigenvalue curves over a coupling grid.
#[derive(Debug, Clone)]
pub struct SpectrumScan {
    pub spec: ScanSpec,
    pub g_grid: Vec<f64>,
    /// Raw transformed-frame energies per grid point, ascending.
    pub energies: Vec<Vec<f64>>,
    /// `(E + 1/2) / beta` per grid point.
    pub levels: Vec<Vec<f64>>,
    pub labels: Vec<Vec<Parity>>,
}

impl SpectrumScan {
    pub fn n_levels(&self) -> usize {
        self.spec.n_levels
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.iter().flatten().any(|l| l.is_labeled())
    }

    /// `g,level_index,energy_rescaled,parity` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("g,level_index,energy_rescaled,parity\n");
        for (t, &g) in self.g_grid.iter().enumerate() {
            for (i, (e, l)) in self.levels[t].iter().zip(&self.labels[t]).enumerate() {
                let _ = writeln!(s, "{g},{i},{e},{}", l.value());
            }
        }
        s
    }
}

/// `(E + 1/2) / beta`.
pub fn rescale(energy: f64, g: f64) -> f64 {
    (energy + 0.5) / (1.0 - 4.0 * g * g).sqrt()
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Diagonalizes every grid point in parallel. The requested levels must
/// pass the convergence policy at the largest coupling of the grid.
pub fn sweep(spec: &ScanSpec, g_grid: &[f64]) -> Result<SpectrumScan> {
    if g_grid.is_empty() {
        return Err(Error::InvalidParams("empty coupling grid".into()));
    }
    if g_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("coupling grid must be strictly ascending".into()));
    }
    let (lo, hi) = (g_grid[0], g_grid[g_grid.len() - 1]);
    if lo < G_RANGE.0 || hi > G_RANGE.1 {
        return Err(Error::InvalidParams(format!(
            "coupling grid must lie in [{}, {}], got [{lo}, {hi}]",
            G_RANGE.0, G_RANGE.1
        )));
    }
    if spec.n_levels == 0 {
        return Err(Error::InvalidParams("need at least one level".into()));
    }
    check_converged(spec, hi)?;

    let points: Vec<(Vec<f64>, Vec<Parity>)> = g_grid
        .par_iter()
        .map(|&g| spec.solve_point(g))
        .collect::<Result<_>>()?;
    let mut energies = Vec::with_capacity(points.len());
    let mut labels = Vec::with_capacity(points.len());
    for (e, l) in points {
        energies.push(e);
        labels.push(l);
    }
    let levels = energies
        .iter()
        .zip(g_grid)
        .map(|(es, &g)| es.iter().map(|&e| rescale(e, g)).collect())
        .collect();
    Ok(SpectrumScan {
        spec: *spec,
        g_grid: g_grid.to_vec(),
        energies,
        levels,
        labels,
    })
}

fn check_converged(spec: &ScanSpec, g: f64) -> Result<()> {
    let p = spec.params_at(g)?;
    let small = lowest_eigenvalues(&build_h0_block(&p, spec.sector, spec.cutoff)?, spec.n_levels)?;
    let big = lowest_eigenvalues(
        &build_h0_block(&p, spec.sector, grown_cutoff(spec.cutoff))?,
        spec.n_levels,
    )?;
    let converged = count_converged(&small, &big);
    if converged < spec.n_levels {
        return Err(Error::Unconverged {
            g,
            converged,
            requested: spec.n_levels,
        });
    }
    Ok(())
}

/// Follows levels through crossings: `out[b][t]` is the sorted level index
/// of branch `b` at grid point `t`. Branches are matched to linear
/// extrapolations of their past, and a labeled pair that swaps parities
/// between neighbouring points swaps branches.
pub fn track_branches(scan: &SpectrumScan) -> Vec<Vec<usize>> {
    let nt = scan.g_grid.len();
    let nl = scan.levels.iter().map(Vec::len).min().unwrap_or(0);
    let mut out: Vec<Vec<usize>> = (0..nl).map(|b| vec![b; nt]).collect();
    for t in 1..nt {
        let prev = |b: usize, dt: usize| scan.levels[t - dt][out[b][t - dt]];
        let mut order: Vec<(f64, usize)> = (0..nl)
            .map(|b| {
                let pred = if t >= 2 {
                    let h0 = scan.g_grid[t] - scan.g_grid[t - 1];
                    let h1 = scan.g_grid[t - 1] - scan.g_grid[t - 2];
                    prev(b, 1) + (prev(b, 1) - prev(b, 2)) * h0 / h1
                } else {
                    prev(b, 1)
                };
                (pred, b)
            })
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (level, &(_, b)) in order.iter().enumerate() {
            out[b][t] = level;
        }
        // parity tie-break between adjacent levels
        let lab = |tt: usize, i: usize| scan.labels[tt][i];
        for i in 0..nl.saturating_sub(1) {
            let bi = (0..nl).find(|&b| out[b][t] == i).unwrap();
            let bj = (0..nl).find(|&b| out[b][t] == i + 1).unwrap();
            let (pi, pj) = (lab(t - 1, out[bi][t - 1]), lab(t - 1, out[bj][t - 1]));
            let (ni, nj) = (lab(t, i), lab(t, i + 1));
            if pi.is_labeled() && pj.is_labeled() && pi != pj && ni == pj && nj == pi {
                out[bi][t] = i + 1;
                out[bj][t] = i;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.05, 0.45, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.05);
        assert!((g[4] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn rejects_grid_outside_range() {
        let spec = ScanSpec {
            delta: 1.0,
            bias: BiasMode::Ratio(0.0),
            sector: Sector::Even,
            cutoff: 40,
            n_levels: 4,
        };
        assert!(sweep(&spec, &[0.1, 0.495]).is_err());
        assert!(sweep(&spec, &[0.2, 0.1]).is_err());
    }

    #[test]
    fn ratio_mode_recomputes_epsilon() {
        let spec = ScanSpec {
            delta: 2.0,
            bias: BiasMode::Ratio(1.0),
            sector: Sector::Even,
            cutoff: 60,
            n_levels: 4,
        };
        let p = spec.params_at(0.3).unwrap();
        assert!((p.epsilon() - 1.6).abs() < 1e-15);
        assert_eq!(spec.n_bias_at(0.3).unwrap(), Some(1));
        let scan = sweep(&spec, &linspace(0.1, 0.3, 5)).unwrap();
        assert!(scan.is_labeled());
        for row in &scan.levels {
            assert!(row.windows(2).all(|w| w[0] <= w[1]));
        }
        let csv = scan.to_csv();
        assert!(csv.starts_with("g,level_index,energy_rescaled,parity\n"));
        assert_eq!(csv.lines().count(), 1 + 5 * 4);
    }

    #[test]
    fn unconverged_scan_is_reported() {
        let spec = ScanSpec {
            delta: 1.0,
            bias: BiasMode::Fixed(0.3),
            sector: Sector::Even,
            cutoff: 10,
            n_levels: 8,
        };
        assert!(matches!(
            sweep(&spec, &[0.2, 0.45]),
            Err(Error::Unconverged { .. })
        ));
    }
}
