//! Linear recurrences for the coefficients of `Q`.
//!
//! The four element equations of `Q H0 = H~ Q` reduce, after normal
//! ordering in `a_+^dag` and `a_-`, to one homogeneous linear relation per
//! lattice point and element. Together with the self-adjointness relations
//! they form an overdetermined homogeneous system whose one-dimensional
//! kernel is fixed by `B_{0,2N} = 1`.

use std::collections::HashMap;

use faer::Mat;

use super::coeffs::{adjoint_sign, lattice, CoeffTable, Element};
use crate::error::{Error, Result};
use crate::linalg::{norm2, thin_svd};
use crate::params::ModelParams;

/// Relative singular value below which a direction counts as a kernel vector.
pub const KERNEL_TOL: f64 = 1e-9;

/// Largest residual accepted for a normalized solution.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RecurrenceSolution {
    pub table: CoeffTable,
    /// `|| M x ||` of the normalized solution.
    pub residual: f64,
    /// Smallest relative singular value that was not part of the kernel.
    pub spectral_gap: f64,
}

/// The homogeneous system in matrix form.
#[derive(Debug, Clone)]
pub struct RecurrenceSystem {
    pub n_lattice: u32,
    pub unknowns: Vec<(Element, u32, u32)>,
    pub matrix: Mat<f64>,
}

impl RecurrenceSystem {
    /// `ratio` is the bias in units of `2 beta`; the lattice holds `n + m <= 2 n_lattice`.
    pub fn build(ratio: f64, n_lattice: u32, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let lat = lattice(n_lattice);
        let unknowns: Vec<_> = Element::ALL
            .iter()
            .flat_map(|&e| lat.iter().map(move |&(n, m)| (e, n, m)))
            .collect();
        let index: HashMap<_, _> = unknowns.iter().enumerate().map(|(i, &k)| (k, i)).collect();

        let g = params.g();
        let b = params.beta();
        let delta = params.delta();
        let k = delta / (8.0 * g * b);
        let ad = delta / (4.0 * b);

        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut eq = |terms: &[(f64, Element, i64, i64)]| {
            let mut row = vec![0.0; unknowns.len()];
            for &(c, e, n, m) in terms {
                if n < 0 || m < 0 {
                    continue;
                }
                if let Some(&i) = index.get(&(e, n as u32, m as u32)) {
                    row[i] += c;
                }
            }
            rows.push(row);
        };

        use Element::*;
        for s in (0..=2 * n_lattice as i64 + 2).step_by(2) {
            for n in 0..=s {
                let m = s - n;
                let (nf, mf) = (n as f64, m as f64);
                let rhs = [(-k, B, n, m), (k, C, n, m)];
                let mut r1 = vec![
                    (1.0, A, n - 2, m),
                    (1.0, A, n, m - 2),
                    ((mf + 1.0) / b, A, n - 1, m + 1),
                    ((mf - nf) / (4.0 * g), A, n, m),
                    ((nf + 1.0) / b, A, n + 1, m - 1),
                    ((mf + 1.0) * (mf + 2.0) / (4.0 * b * b), A, n, m + 2),
                    ((nf + 1.0) * (nf + 2.0) / (4.0 * b * b), A, n + 2, m),
                ];
                r1.extend(rhs);
                eq(&r1);
                let mut r2 = vec![
                    (1.0, D, n - 2, m),
                    (1.0, D, n, m - 2),
                    ((nf - mf) / (4.0 * g), D, n, m),
                ];
                r2.extend(rhs);
                eq(&r2);
                eq(&[
                    ((mf - nf) / 2.0 - ratio, B, n, m),
                    (2.0 * g / b * (nf + 1.0), B, n + 1, m - 1),
                    (g / (2.0 * b * b) * (nf + 1.0) * (nf + 2.0), B, n + 2, m),
                    (-ad, A, n, m),
                    (ad, D, n, m),
                ]);
                eq(&[
                    ((nf - mf) / 2.0 - ratio, C, n, m),
                    (-2.0 * g / b * (mf + 1.0), C, n - 1, m + 1),
                    (-g / (2.0 * b * b) * (mf + 1.0) * (mf + 2.0), C, n, m + 2),
                    (-ad, A, n, m),
                    (ad, D, n, m),
                ]);
            }
        }
        for &(n, m) in &lat {
            let sg = adjoint_sign(n, m);
            let (n, m) = (n as i64, m as i64);
            eq(&[(1.0, A, n, m), (-sg, A, m, n)]);
            eq(&[(1.0, D, n, m), (-sg, D, m, n)]);
            eq(&[(1.0, B, n, m), (-sg, C, m, n)]);
        }

        let matrix = Mat::from_fn(rows.len(), unknowns.len(), |i, j| rows[i][j]);
        Ok(Self {
            n_lattice,
            unknowns,
            matrix,
        })
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        let r: Vec<f64> = (0..self.matrix.nrows())
            .map(|i| (0..x.len()).map(|j| self.matrix[(i, j)] * x[j]).sum())
            .collect();
        norm2(&r)
    }

    fn table(&self, x: &[f64], params: ModelParams) -> CoeffTable {
        let mut t = CoeffTable::new(self.n_lattice, params);
        for (&(e, n, m), &v) in self.unknowns.iter().zip(x) {
            t.set(e, n, m, v);
        }
        t
    }

    /// Kernel basis as columns of an orthonormal matrix (in unscaled
    /// coordinates) plus the relative gap to the first non-kernel direction.
    fn kernel(&self) -> Result<(Vec<Vec<f64>>, f64)> {
        let cols = self.matrix.ncols();
        let scale: Vec<f64> = (0..cols)
            .map(|j| {
                let n = (0..self.matrix.nrows())
                    .map(|i| self.matrix[(i, j)].powi(2))
                    .sum::<f64>()
                    .sqrt();
                if n > 0.0 {
                    n
                } else {
                    1.0
                }
            })
            .collect();
        let scaled = Mat::from_fn(self.matrix.nrows(), cols, |i, j| self.matrix[(i, j)] / scale[j]);
        let svd = thin_svd(&scaled)?;
        let smax = svd.s[0];
        let mut kernel = Vec::new();
        let mut gap = f64::INFINITY;
        for (k, &s) in svd.s.iter().enumerate() {
            if s < KERNEL_TOL * smax {
                kernel.push((0..cols).map(|j| svd.v[(j, k)] / scale[j]).collect());
            } else {
                gap = gap.min(s / smax);
            }
        }
        Ok((kernel, gap))
    }
}

/// Solves for `Q` at bias `epsilon = 2 N beta`; the bias stored in `params`
/// is ignored.
pub fn solve_recurrence(n_bias: u32, params: &ModelParams) -> Result<RecurrenceSolution> {
    let p = params.with_epsilon(2.0 * n_bias as f64 * params.beta());
    solve_system(&RecurrenceSystem::build(n_bias as f64, n_bias, &p)?, p)
}

/// Same system with a non-integer bias `epsilon = 2 ratio beta`, posed on
/// the smallest lattice that would hold an integer solution.
pub fn solve_recurrence_at_ratio(ratio: f64, params: &ModelParams) -> Result<RecurrenceSolution> {
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidParams(format!("bias ratio must be >= 0, got {ratio}")));
    }
    let p = params.with_epsilon(2.0 * ratio * params.beta());
    let n = ratio.ceil() as u32;
    solve_system(&RecurrenceSystem::build(ratio, n, &p)?, p)
}

fn solve_system(sys: &RecurrenceSystem, params: ModelParams) -> Result<RecurrenceSolution> {
    let norm_idx = sys
        .unknowns
        .iter()
        .position(|&u| u == (Element::B, 0, 2 * sys.n_lattice))
        .expect("B_{0,2N} is on the lattice");
    let (kernel, gap) = sys.kernel()?;
    if kernel.is_empty() {
        // least-squares residual of the normalized problem
        return Err(Error::NoSolution {
            residual: normalized_lstsq_residual(sys, norm_idx)?,
        });
    }
    // orthonormalize the kernel, then take the minimum-norm vector with x_k = 1
    let basis = gram_schmidt(kernel);
    let mut x = vec![0.0; sys.unknowns.len()];
    for v in &basis {
        let c = v[norm_idx];
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += c * vi;
        }
    }
    let pivot = x[norm_idx];
    if pivot.abs() < 1e-12 {
        return Err(Error::NoSolution {
            residual: normalized_lstsq_residual(sys, norm_idx)?,
        });
    }
    x.iter_mut().for_each(|v| *v /= pivot);
    x[norm_idx] = 1.0;
    if basis.len() == 1 {
        refine(sys, &mut x, norm_idx)?;
    }
    let residual = sys.residual(&x);
    let table = sys.table(&x, params);
    if residual > RESIDUAL_TOL {
        return Err(Error::NoSolution { residual });
    }
    if basis.len() > 1 {
        return Err(Error::GaugeAmbiguity {
            extra_dims: basis.len() - 1,
            representative: Box::new(table),
        });
    }
    Ok(RecurrenceSolution {
        table,
        residual,
        spectral_gap: gap,
    })
}

/// Iterative refinement of the normalized solution: with `x_k = 1` held
/// fixed, the remaining unknowns solve an equilibrated full-rank
/// least-squares problem. Each pass removes the component of the residual
/// the SVD null vector leaves behind.
fn refine(sys: &RecurrenceSystem, x: &mut [f64], norm_idx: usize) -> Result<()> {
    let m = &sys.matrix;
    let (rows, cols) = (m.nrows(), m.ncols());
    let free: Vec<usize> = (0..cols).filter(|&j| j != norm_idx).collect();
    let row_scale: Vec<f64> = (0..rows)
        .map(|i| {
            let r = (0..cols).map(|j| m[(i, j)].abs()).fold(0.0, f64::max);
            if r > 0.0 {
                1.0 / r
            } else {
                1.0
            }
        })
        .collect();
    let col_scale: Vec<f64> = free
        .iter()
        .map(|&j| {
            let c = (0..rows).map(|i| (row_scale[i] * m[(i, j)]).abs()).fold(0.0, f64::max);
            if c > 0.0 {
                1.0 / c
            } else {
                1.0
            }
        })
        .collect();
    let a = Mat::from_fn(rows, free.len(), |i, k| row_scale[i] * m[(i, free[k])] * col_scale[k]);
    let mut best = sys.residual(x);
    for _ in 0..3 {
        let r: Vec<f64> = (0..rows)
            .map(|i| row_scale[i] * (0..cols).map(|j| m[(i, j)] * x[j]).sum::<f64>())
            .collect();
        let (d, _) = crate::linalg::lstsq(&a, &r, 1e-14)?;
        let trial: Vec<f64> = {
            let mut t = x.to_vec();
            for (k, &j) in free.iter().enumerate() {
                t[j] -= col_scale[k] * d[k];
            }
            t
        };
        let res = sys.residual(&trial);
        if res > best {
            break;
        }
        best = res;
        x.copy_from_slice(&trial);
    }
    Ok(())
}

fn normalized_lstsq_residual(sys: &RecurrenceSystem, norm_idx: usize) -> Result<f64> {
    let rows = sys.matrix.nrows();
    let cols = sys.matrix.ncols();
    let aug = Mat::from_fn(rows + 1, cols, |i, j| {
        if i < rows {
            sys.matrix[(i, j)]
        } else if j == norm_idx {
            1.0
        } else {
            0.0
        }
    });
    let mut rhs = vec![0.0; rows + 1];
    rhs[rows] = 1.0;
    let (x, _) = crate::linalg::lstsq(&aug, &rhs, 1e-14)?;
    let r: Vec<f64> = (0..rows + 1)
        .map(|i| (0..cols).map(|j| aug[(i, j)] * x[j]).sum::<f64>() - rhs[i])
        .collect();
    Ok(norm2(&r))
}

fn gram_schmidt(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vs {
        for q in &out {
            let c = crate::linalg::dot(&v, q);
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
        let n = norm2(&v);
        if n > 1e-300 {
            v.iter_mut().for_each(|a| *a /= n);
            out.push(v);
        }
    }
    out
}
