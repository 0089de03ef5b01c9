//! `J^2` as a polynomial in the Hamiltonian.
//!
//! In the eigenbasis of `H`, `J^2` must be diagonal with entries `P(E_i)`.
//! The fit uses the real factor of `J`, so it measures `J^dag J`.

use faer::Mat;

use super::operator::{symmetry_operator, SymmetryOperator};
use super::parity::DEGENERACY_TOL;
use super::recurrence::solve_recurrence;
use crate::error::{Error, Result};
use crate::linalg::{dot, lstsq, norm2};
use crate::model::build_h0_block;
use crate::params::{ModelParams, Sector};
use crate::spectrum::eigen::{count_converged, eigensolve, grown_cutoff, lowest_eigenvalues, Eigensystem};

/// Default number of low eigenstates entering a fit.
pub const DEFAULT_FIT_STATES: usize = 24;

/// Condition number above which a fit is rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct JSquarePoly {
    pub n_bias: u32,
    /// `y_0, ..., y_d` in ascending powers of `E`.
    pub coeffs: Vec<f64>,
    /// `|P(E) - diag(J^2)| / |diag(J^2)|` over the fitted states.
    pub residual: f64,
    pub condition: f64,
}

impl JSquarePoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, e: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * e + c)
    }
}

/// Diagonal of `J^2` over the lowest states and its largest off-diagonal
/// element between non-degenerate states, relative to the largest diagonal.
#[derive(Debug, Clone)]
pub struct JSquareSamples {
    pub energies: Vec<f64>,
    pub diag: Vec<f64>,
    pub off_diagonal: f64,
}

pub fn jsquare_samples(j: &SymmetryOperator, es: &Eigensystem, states: usize) -> JSquareSamples {
    let w = states.min(es.len());
    let jv: Vec<Vec<f64>> = es.vectors[..w].iter().map(|v| j.j_real.apply(v)).collect();
    let diag: Vec<f64> = jv.iter().map(|x| dot(x, x)).collect();
    let dmax = diag.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut off: f64 = 0.0;
    for a in 0..w {
        for b in a + 1..w {
            let (ea, eb) = (es.values[a], es.values[b]);
            if (ea - eb).abs() < DEGENERACY_TOL * ea.abs().max(1.0) {
                continue;
            }
            off = off.max(dot(&jv[a], &jv[b]).abs());
        }
    }
    JSquareSamples {
        energies: es.values[..w].to_vec(),
        diag,
        off_diagonal: if dmax > 0.0 { off / dmax } else { 0.0 },
    }
}

/// Least-squares polynomial fit in a Legendre basis on the sampled energy
/// range, converted back to ascending monomial coefficients.
pub fn fit_polynomial(x: &[f64], y: &[f64], degree: usize) -> Result<(Vec<f64>, f64, f64)> {
    if x.len() < degree + 1 {
        return Err(Error::InvalidParams(format!(
            "{} samples cannot fix a degree-{degree} polynomial",
            x.len()
        )));
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let half = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let legendre = legendre_monomials(degree);
    let t: Vec<f64> = x.iter().map(|v| (v - center) / half).collect();
    let design = Mat::from_fn(x.len(), degree + 1, |i, k| eval_ascending(&legendre[k], t[i]));
    let (c, condition) = lstsq(&design, y, 0.0)?;
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let r: Vec<f64> = (0..x.len())
        .map(|i| (0..=degree).map(|k| design[(i, k)] * c[k]).sum::<f64>() - y[i])
        .collect();
    let ynorm = norm2(y);
    let residual = if ynorm > 0.0 { norm2(&r) / ynorm } else { norm2(&r) };

    // sum_k c_k L_k(t) as a polynomial in t, then t = (E - center) / half
    let mut in_t = vec![0.0; degree + 1];
    for (k, ck) in c.iter().enumerate() {
        for (p, lp) in legendre[k].iter().enumerate() {
            in_t[p] += ck * lp;
        }
    }
    let mut in_e = vec![0.0; degree + 1];
    let affine = [-center / half, 1.0 / half];
    let mut power = vec![1.0];
    for &tp in &in_t {
        for (i, pi) in power.iter().enumerate() {
            in_e[i] += tp * pi;
        }
        power = poly_mul(&power, &affine);
    }
    Ok((in_e, residual, condition))
}

fn eval_ascending(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Monomial coefficients of `P_0 ... P_degree`.
fn legendre_monomials(degree: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
    for k in 1..degree {
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (i, c) in out[k].iter().enumerate() {
            next[i + 1] += (2.0 * kf + 1.0) / (kf + 1.0) * c;
        }
        for (i, c) in out[k - 1].iter().enumerate() {
            next[i] -= kf / (kf + 1.0) * c;
        }
        out.push(next);
    }
    out.truncate(degree + 1);
    out
}

/// Fits `diag(J^2)` over the sampled states with a polynomial of `degree`.
pub fn jsquare_poly(samples: &JSquareSamples, n_bias: u32, degree: usize) -> Result<JSquarePoly> {
    let (coeffs, residual, condition) = fit_polynomial(&samples.energies, &samples.diag, degree)?;
    Ok(JSquarePoly {
        n_bias,
        coeffs,
        residual,
        condition,
    })
}

/// Everything needed to study `J^2` at one parameter point.
#[derive(Debug, Clone)]
pub struct JSquareSetup {
    pub symmetry: SymmetryOperator,
    pub eigensystem: Eigensystem,
    /// Number of leading eigenstates passing the convergence policy.
    pub converged: usize,
    pub samples: JSquareSamples,
}

/// Builds `J_N` from the recurrences, diagonalizes `H0` and samples `J^2`
/// over at most `states` converged eigenstates.
pub fn jsquare_setup(
    n_bias: u32,
    params: &ModelParams,
    sector: Sector,
    cutoff: usize,
    states: usize,
) -> Result<JSquareSetup> {
    let sol = solve_recurrence(n_bias, params)?;
    let p = sol.table.params;
    let symmetry = symmetry_operator(&sol.table, sector, cutoff)?;
    let h = build_h0_block(&p, sector, cutoff)?;
    let eigensystem = eigensolve(&h)?;
    let reference = lowest_eigenvalues(&build_h0_block(&p, sector, grown_cutoff(cutoff))?, states)?;
    let converged = count_converged(&eigensystem.values, &reference);
    let samples = jsquare_samples(&symmetry, &eigensystem, converged.min(states));
    Ok(JSquareSetup {
        symmetry,
        eigensystem,
        converged,
        samples,
    })
}

/// Closed-form `J_1^2` coefficients `(y_0, y_1, y_2)`.
pub fn j1_square_analytic(params: &ModelParams) -> [f64; 3] {
    let b2 = params.beta().powi(2);
    let g = params.g();
    let d = params.delta();
    [d * d / (64.0 * g * g) + g * g / (4.0 * b2), 1.0 / (4.0 * b2), 1.0 / (4.0 * b2)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_cubic() {
        let x: Vec<f64> = (0..20).map(|i| 3.0 + 1.7 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v + 0.25 * v * v + 0.01 * v * v * v).collect();
        let (c, r, _) = fit_polynomial(&x, &y, 3).unwrap();
        for (a, b) in c.iter().zip([2.0, -0.5, 0.25, 0.01]) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
        assert!(r < 1e-13);
    }

    #[test]
    fn legendre_p2() {
        let l = legendre_monomials(3);
        assert_eq!(l[2], vec![-0.5, 0.0, 1.5]);
        assert!((l[3][3] - 2.5).abs() < 1e-15 && (l[3][1] + 1.5).abs() < 1e-15);
    }

    #[test]
    fn j1_square_matches_closed_form() {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        let setup = jsquare_setup(1, &p, Sector::Even, 120, DEFAULT_FIT_STATES).unwrap();
        let poly = jsquare_poly(&setup.samples, 1, 2).unwrap();
        let expect = j1_square_analytic(&p);
        assert!((expect[0] - 0.208_767_4).abs() < 1e-7);
        for (a, b) in poly.coeffs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(setup.samples.off_diagonal < 1e-8);
    }

    #[test]
    fn j0_square_is_identity() {
        let p = ModelParams::new(1.3, 0.0, 0.2).unwrap();
        let setup = jsquare_setup(0, &p, Sector::Even, 80, DEFAULT_FIT_STATES).unwrap();
        let poly = jsquare_poly(&setup.samples, 0, 0).unwrap();
        assert!((poly.coeffs[0] - 1.0).abs() < 1e-12);
        assert!(poly.residual < 1e-12);
    }
}
