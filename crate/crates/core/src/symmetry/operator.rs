//! Matrix realizations of `Q` and `J = exp(i pi a^dag a / 2) Q`.

use super::coeffs::{CoeffTable, Element};
use crate::error::{Error, Result};
use crate::fock::{
    bogoliubov_pair, project_sector, window_max_fock, z4_phase, Basis, BlockOp, BosonOp, FockBasis,
};
use crate::model::HamiltonianSet;
use crate::params::{ModelParams, Sector};

/// Smallest sector cutoff accepted for symmetry work at level `N`.
pub fn min_cutoff(n_bias: u32) -> usize {
    4 * (n_bias as usize + 2)
}

pub fn check_cutoff(n_bias: u32, cutoff: usize) -> Result<()> {
    let required = min_cutoff(n_bias);
    if cutoff < required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    Ok(())
}

/// Largest Fock index of the window on which identities for `J_N` are checked.
pub fn symmetry_window(n_bias: u32, cutoff: usize) -> usize {
    window_max_fock(2 * cutoff, 2 * n_bias as usize + 2)
}

/// Powers of `a_+^dag` and `a_-` on the full basis, used to form the
/// monomials `2^{-(n+m)/2} (a_+^dag)^n (a_-)^m` of one sector.
pub struct Monomials {
    sector: Sector,
    plus_dag: Vec<BosonOp>,
    minus: Vec<BosonOp>,
}

impl Monomials {
    pub fn new(params: &ModelParams, sector: Sector, cutoff: usize, max_degree: u32) -> Result<Self> {
        let pair = bogoliubov_pair(params, 2 * cutoff)?;
        let powers = |op: &BosonOp| {
            let mut out = vec![BosonOp::identity(op.basis())];
            for k in 0..max_degree as usize {
                let next = &out[k] * op;
                out.push(next);
            }
            out
        };
        Ok(Self {
            sector,
            plus_dag: powers(&pair.plus.dag),
            minus: powers(&pair.minus.op),
        })
    }

    /// The sector-projected monomial for `(n, m)` with `n + m` even.
    pub fn get(&self, n: u32, m: u32) -> Result<BosonOp> {
        let full = &self.plus_dag[n as usize] * &self.minus[m as usize];
        let scale = 2f64.powf(-((n + m) as f64) / 2.0);
        Ok(project_sector(&full.scale(scale), self.sector)?.trimmed())
    }
}

/// `Q` as a block operator on one sector.
pub fn assemble_q(coeffs: &CoeffTable, sector: Sector, cutoff: usize) -> Result<BlockOp> {
    check_cutoff(coeffs.n_bias, cutoff)?;
    let mono = Monomials::new(&coeffs.params, sector, cutoff, 2 * coeffs.n_bias)?;
    let basis = Basis::Sector(FockBasis::new(sector, cutoff));
    let mut blocks: [[BosonOp; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| BosonOp::zeros(basis)));
    for (e, n, m, v) in coeffs.iter() {
        let (r, c) = e.position();
        blocks[r][c] = blocks[r][c].add_scaled(&mono.get(n, m)?, v);
    }
    BlockOp::new(blocks)
}

/// `Q` and the matching symmetry operator on one sector.
///
/// `j_real` is `diag((-1)^k) Q`; the operator `J` itself is
/// `i^global_phase * j_real`.
#[derive(Debug, Clone)]
pub struct SymmetryOperator {
    pub n_bias: u32,
    pub sector: Sector,
    pub cutoff: usize,
    pub q: BlockOp,
    pub j_real: BlockOp,
    pub global_phase: u8,
}

impl SymmetryOperator {
    pub fn window(&self) -> usize {
        symmetry_window(self.n_bias, self.cutoff)
    }

    /// Window-restricted `max |(Q H0 - H~ Q)_{ij}|` and the scale
    /// `max|Q| * max|H0|` it is measured against.
    pub fn intertwining_residual(&self, set: &HamiltonianSet) -> (f64, f64) {
        let w = self.window();
        let r = &(&self.q * &set.h0) - &(&set.h_tilde * &self.q);
        (r.window_max_abs(w), self.q.window_max_abs(w) * set.h0.window_max_abs(w))
    }

    /// Window-restricted `max |[J, H0]_{ij}|` and its scale.
    pub fn commutator_residual(&self, set: &HamiltonianSet) -> (f64, f64) {
        let w = self.window();
        let r = self.j_real.commutator(&set.h0);
        (r.window_max_abs(w), self.j_real.window_max_abs(w) * set.h0.window_max_abs(w))
    }

    /// Window-restricted `max |J_ij - J_ji|` of the real factor.
    pub fn asymmetry(&self) -> f64 {
        let w = self.window();
        (&self.j_real - &self.j_real.transpose()).window_max_abs(w)
    }
}

pub fn assemble_j(q: BlockOp, n_bias: u32, sector: Sector) -> Result<SymmetryOperator> {
    let Basis::Sector(fb) = q.basis() else {
        return Err(Error::InvalidParams("assemble_j expects a sector operator".into()));
    };
    if fb.sector != sector {
        return Err(Error::InvalidParams(format!(
            "Q lives on the {} sector, not {sector}",
            fb.sector
        )));
    }
    let phase = z4_phase(sector, fb.cutoff);
    let j_real = q.left_mul(&phase.diag);
    Ok(SymmetryOperator {
        n_bias,
        sector,
        cutoff: fb.cutoff,
        q,
        j_real,
        global_phase: phase.global_phase,
    })
}

/// `Q` and `J` straight from a coefficient table.
pub fn symmetry_operator(coeffs: &CoeffTable, sector: Sector, cutoff: usize) -> Result<SymmetryOperator> {
    let q = assemble_q(coeffs, sector, cutoff)?;
    assemble_j(q, coeffs.n_bias, sector)
}

/// Coefficient of `element` at `(n, m)` as a standalone single-block `Q`.
pub(crate) fn unit_block(mono: &BosonOp, element: Element) -> Result<BlockOp> {
    let basis = mono.basis();
    let mut blocks: [[BosonOp; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| BosonOp::zeros(basis)));
    let (r, c) = element.position();
    blocks[r][c] = mono.clone();
    BlockOp::new(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_h0;
    use crate::symmetry::coeffs::closed_form_coeffs;

    fn params(n: u32) -> ModelParams {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        p.with_epsilon(2.0 * n as f64 * p.beta())
    }

    #[test]
    fn n0_q_is_sigma_x() {
        let p = params(0);
        let q = assemble_q(&closed_form_coeffs(0, &p).unwrap(), Sector::Even, 12).unwrap();
        let id = BosonOp::identity(q.basis());
        assert_eq!(q.block(0, 1).max_abs(), 1.0);
        assert!((q.block(0, 1) - &id).max_abs() == 0.0);
        assert!((q.block(1, 0) - &id).max_abs() == 0.0);
        assert_eq!(q.block(0, 0).max_abs(), 0.0);
    }

    #[test]
    fn n1_b_block_is_half_a_minus_squared() {
        let p = params(1);
        let cutoff = 16;
        let q = assemble_q(&closed_form_coeffs(1, &p).unwrap(), Sector::Even, cutoff).unwrap();
        let pair = bogoliubov_pair(&p, 2 * cutoff).unwrap();
        let am2 = (&pair.minus.op * &pair.minus.op).scale(0.5);
        let expect = project_sector(&am2, Sector::Even).unwrap();
        assert_eq!((q.block(0, 1) - &expect).max_abs(), 0.0);
    }

    #[test]
    fn closed_forms_intertwine_and_commute() {
        for sector in Sector::both() {
            for n in 0..=3 {
                let p = params(n);
                let cutoff = 40;
                let set = build_h0(&p, sector, cutoff).unwrap();
                let j = symmetry_operator(&closed_form_coeffs(n, &p).unwrap(), sector, cutoff).unwrap();
                let (r, scale) = j.intertwining_residual(&set);
                assert!(r <= 1e-9 * scale, "{sector} N = {n}: {r:e} vs {scale:e}");
                let (c, scale) = j.commutator_residual(&set);
                assert!(c <= 1e-9 * scale, "{sector} N = {n}: {c:e}");
                assert!(j.asymmetry() <= 1e-10 * j.j_real.window_max_abs(j.window()));
            }
        }
    }

    #[test]
    fn small_cutoff_rejected() {
        let p = params(2);
        let t = closed_form_coeffs(2, &p).unwrap();
        assert!(matches!(
            assemble_q(&t, Sector::Even, 15),
            Err(Error::CutoffTooSmall { required: 16, .. })
        ));
    }
}
