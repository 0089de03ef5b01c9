//! Diagonalization of sector Hamiltonians and the convergence policy.

use super::banded::BlockTridiag;
use crate::error::{Error, Result};
use crate::fock::BlockOp;
use crate::linalg::{dot, symmetric_eigen};
use crate::model::{build_h0_block, build_lab_hamiltonian};
use crate::params::{ModelParams, Sector};

/// Largest asymmetry accepted by the eigensolvers.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A level is converged if it moves by less than this when the cutoff grows.
pub const CONVERGENCE_TOL: f64 = 1e-9;

/// Eigenpairs with values ascending; vectors are block-major (upper qubit
/// component first) and orthonormal.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl Eigensystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((dot(u, v) - target).abs());
            }
        }
        err
    }

    pub fn truncated(mut self, k: usize) -> Self {
        self.values.truncate(k);
        self.vectors.truncate(k);
        self
    }
}

fn check_symmetric(h: &BlockOp) -> Result<()> {
    let asymmetry = h.asymmetry();
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok(())
}

/// Full dense eigendecomposition.
pub fn eigensolve(h: &BlockOp) -> Result<Eigensystem> {
    check_symmetric(h)?;
    let (values, u) = symmetric_eigen(&h.to_dense())?;
    let vectors = (0..u.ncols())
        .map(|j| (0..u.nrows()).map(|i| u[(i, j)]).collect())
        .collect();
    Ok(Eigensystem { values, vectors })
}

/// The `k` lowest eigenpairs. Uses the block-tridiagonal solver when the
/// structure allows it and the dense one otherwise.
pub fn lowest_eigenpairs(h: &BlockOp, k: usize) -> Result<Eigensystem> {
    check_symmetric(h)?;
    match BlockTridiag::from_block_op(h) {
        Ok(bt) => {
            let values = bt.lowest_eigenvalues(k);
            let vectors = bt.eigenvectors(&values);
            Ok(Eigensystem { values, vectors })
        }
        Err(_) => Ok(eigensolve(h)?.truncated(k)),
    }
}

pub fn lowest_eigenvalues(h: &BlockOp, k: usize) -> Result<Vec<f64>> {
    check_symmetric(h)?;
    match BlockTridiag::from_block_op(h) {
        Ok(bt) => Ok(bt.lowest_eigenvalues(k)),
        Err(_) => {
            let mut v = crate::linalg::symmetric_eigenvalues(&h.to_dense())?;
            v.truncate(k);
            Ok(v)
        }
    }
}

/// Cutoff used for the convergence comparison: 25% more sector states.
pub fn grown_cutoff(cutoff: usize) -> usize {
    cutoff + cutoff.div_ceil(4)
}

/// Number of leading levels (out of `values`) that agree with the larger
/// cutoff's levels within [`CONVERGENCE_TOL`].
pub fn count_converged(values: &[f64], reference: &[f64]) -> usize {
    values
        .iter()
        .zip(reference)
        .take_while(|(a, b)| (*a - *b).abs() < CONVERGENCE_TOL)
        .count()
}

/// Transformed-frame levels at `cutoff` that pass the convergence policy,
/// at most `k` of them.
pub fn converged_levels(params: &ModelParams, sector: Sector, cutoff: usize, k: usize) -> Result<Vec<f64>> {
    let h = build_h0_block(params, sector, cutoff)?;
    let big = build_h0_block(params, sector, grown_cutoff(cutoff))?;
    let mut a = lowest_eigenvalues(&h, k)?;
    let b = lowest_eigenvalues(&big, k)?;
    a.truncate(count_converged(&a, &b));
    Ok(a)
}

/// Lowest `k` lab-frame levels in units of omega.
pub fn lab_levels(params: &ModelParams, sector: Sector, cutoff: usize, k: usize) -> Result<Vec<f64>> {
    let h = build_lab_hamiltonian(params, sector, cutoff)?;
    Ok(lowest_eigenvalues(&h, k)?
        .into_iter()
        .map(|e| e / params.omega())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Basis, BosonOp, FockBasis};

    #[test]
    fn weak_coupling_limit() {
        let p = ModelParams::new(0.8, 0.6, 1e-4).unwrap();
        let h = build_h0_block(&p, Sector::Even, 20).unwrap();
        let es = eigensolve(&h).unwrap();
        // n +- sqrt(delta^2 + eps^2)/2 with n even
        let expect = [-0.5, 0.5, 1.5, 2.5];
        for (e, x) in es.values.iter().zip(expect) {
            assert!((e - x).abs() < 1e-3, "{e} vs {x}");
        }
        assert!(es.orthonormality_error() < 1e-10);
    }

    #[test]
    fn identity_spectrum() {
        let basis = Basis::Sector(FockBasis::new(Sector::Odd, 5));
        let id = BosonOp::identity(basis);
        let z = BosonOp::zeros(basis);
        let h = BlockOp::from_blocks(id.clone(), z.clone(), z, id).unwrap();
        let es = eigensolve(&h).unwrap();
        assert!(es.values.iter().all(|&e| (e - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_asymmetric() {
        let basis = Basis::Sector(FockBasis::new(Sector::Even, 4));
        let a = crate::fock::BosonOp::number(basis);
        let up = a.add_scaled(&BosonOp::identity(basis), 0.0);
        let skew = BlockOp::from_blocks(up.clone(), BosonOp::identity(basis), BosonOp::zeros(basis), up).unwrap();
        assert!(matches!(eigensolve(&skew), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn banded_and_dense_agree_with_vectors() {
        let p = ModelParams::new(2.0, 0.5, 0.41).unwrap();
        let h = build_h0_block(&p, Sector::Odd, 80).unwrap();
        let dense = eigensolve(&h).unwrap();
        let fast = lowest_eigenpairs(&h, 10).unwrap();
        for i in 0..10 {
            assert!((dense.values[i] - fast.values[i]).abs() < 1e-10);
            assert!((dot(&dense.vectors[i], &fast.vectors[i]).abs() - 1.0).abs() < 1e-9);
        }
        assert!(fast.orthonormality_error() < 1e-10);
    }

    #[test]
    fn convergence_policy_counts_leading_levels() {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        let lv = converged_levels(&p, Sector::Even, 60, 20).unwrap();
        assert_eq!(lv.len(), 20);
        let few = converged_levels(&p, Sector::Even, 8, 12).unwrap();
        assert!(few.len() < 12);
    }
}
