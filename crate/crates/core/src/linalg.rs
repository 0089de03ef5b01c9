//! Thin wrappers over the dense faer solvers.

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Thin SVD with singular values in nonincreasing order.
pub struct Svd {
    pub s: Vec<f64>,
    pub u: Mat<f64>,
    pub v: Mat<f64>,
}

pub fn thin_svd(m: &Mat<f64>) -> Result<Svd> {
    let svd = m
        .thin_svd()
        .map_err(|e| Error::Eigensolver(format!("svd: {e:?}")))?;
    let s = svd.S().column_vector().iter().copied().collect();
    Ok(Svd {
        s,
        u: svd.U().to_owned(),
        v: svd.V().to_owned(),
    })
}

/// Eigenvalues ascending, eigenvectors as columns.
pub fn symmetric_eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let vals = evd.S().column_vector().iter().copied().collect();
    Ok((vals, evd.U().to_owned()))
}

pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

pub fn max_abs(m: &Mat<f64>) -> f64 {
    let mut out: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].abs());
        }
    }
    out
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Least-squares solution of `a x = b` through the SVD, discarding
/// singular values below `rcond * s_max`. Returns `x` and `s_max / s_min`.
pub fn lstsq(a: &Mat<f64>, b: &[f64], rcond: f64) -> Result<(Vec<f64>, f64)> {
    let svd = thin_svd(a)?;
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let smin = svd.s.last().copied().unwrap_or(0.0);
    let mut x = vec![0.0; a.ncols()];
    for (k, &s) in svd.s.iter().enumerate() {
        if s <= rcond * smax {
            continue;
        }
        let c: f64 = (0..a.nrows()).map(|i| svd.u[(i, k)] * b[i]).sum::<f64>() / s;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += c * svd.v[(j, k)];
        }
    }
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok((x, cond))
}
