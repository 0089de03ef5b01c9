//! Symmetry operators found directly as the kernel of `Q -> Q H0 - H~ Q`,
//! without the recurrences.

use faer::Mat;

use super::coeffs::{lattice, CoeffTable, Element};
use super::operator::{check_cutoff, symmetry_window, unit_block, Monomials};
use crate::error::{Error, Result};
use crate::linalg::thin_svd;
use crate::model::build_h0;
use crate::params::{ModelParams, Sector};

/// Relative singular value above which the kernel is declared empty.
pub const NULLSPACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct NullspaceResult {
    pub table: CoeffTable,
    /// Smallest and second-smallest singular values relative to the largest.
    pub smallest: f64,
    pub second: f64,
}

/// Finds `Q` on the `n + m <= 2 n_lattice` lattice at the bias stored in
/// `params`. Small cutoffs (a few states above the minimum) give the
/// cleanest kernel.
pub fn nullspace_symmetry(
    n_lattice: u32,
    params: &ModelParams,
    sector: Sector,
    cutoff: usize,
) -> Result<NullspaceResult> {
    params.validate()?;
    check_cutoff(n_lattice, cutoff)?;
    let set = build_h0(params, sector, cutoff)?;
    let mono = Monomials::new(params, sector, cutoff, 2 * n_lattice)?;
    let w = symmetry_window(n_lattice, cutoff);
    let basis = set.basis();
    let win: Vec<usize> = (0..cutoff).filter(|&k| basis.fock_index(k) <= w).collect();
    let reach = n_lattice as usize + 1;
    let pairs: Vec<(usize, usize)> = win
        .iter()
        .flat_map(|&i| win.iter().filter(move |&&j| i.abs_diff(j) <= reach).map(move |&j| (i, j)))
        .collect();

    let lat = lattice(n_lattice);
    let mut unknowns = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &(n, m) in &lat {
        let op = mono.get(n, m)?;
        for e in Element::ALL {
            let q = unit_block(&op, e)?;
            let r = &(&q * &set.h0) - &(&set.h_tilde * &q);
            let mut col = Vec::with_capacity(4 * pairs.len());
            for br in 0..2 {
                for bc in 0..2 {
                    let b = r.block(br, bc);
                    col.extend(pairs.iter().map(|&(i, j)| b.get(i, j)));
                }
            }
            unknowns.push((e, n, m));
            columns.push(col);
        }
    }
    let scale: Vec<f64> = columns
        .iter()
        .map(|c| {
            let n = crate::linalg::norm2(c);
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let rows = columns[0].len();
    let t = Mat::from_fn(rows, columns.len(), |i, j| columns[j][i] / scale[j]);
    let svd = thin_svd(&t)?;
    let k = svd.s.len();
    let smax = svd.s[0];
    let smallest = svd.s[k - 1] / smax;
    let second = if k >= 2 { svd.s[k - 2] / smax } else { f64::INFINITY };
    if smallest > NULLSPACE_TOL {
        return Err(Error::EmptyNullspace { smallest });
    }
    let v: Vec<f64> = (0..columns.len()).map(|j| svd.v[(j, k - 1)] / scale[j]).collect();
    let norm_idx = unknowns
        .iter()
        .position(|&u| u == (Element::B, 0, 2 * n_lattice))
        .expect("B_{0,2N} is on the lattice");
    let pivot = v[norm_idx];
    if pivot.abs() < 1e-12 {
        return Err(Error::EmptyNullspace { smallest });
    }
    let mut table = CoeffTable::new(n_lattice, *params);
    for (&(e, n, m), x) in unknowns.iter().zip(&v) {
        let val = if (e, n, m) == (Element::B, 0, 2 * n_lattice) { 1.0 } else { x / pivot };
        table.set(e, n, m, val);
    }
    Ok(NullspaceResult {
        table,
        smallest,
        second,
    })
}
