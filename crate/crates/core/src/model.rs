//! Hamiltonians of the biased two-photon Rabi model on one parity sector.

use crate::error::{Error, Result};
use crate::fock::{
    annihilation, bogoliubov_pair, project_sector, su11_generators, window_max_fock, Basis,
    BlockOp, BosonOp, FockBasis,
};
use crate::params::{ModelParams, Sector};

/// Tolerance for the closed-form block checks.
pub const BLOCK_FORM_TOL: f64 = 1e-11;

/// `H0` and its partner `H~` on one sector, with the Lie-algebra form check.
#[derive(Debug, Clone)]
pub struct HamiltonianSet {
    pub h0: BlockOp,
    pub h_tilde: BlockOp,
    pub sector: Sector,
    pub params: ModelParams,
    pub cutoff: usize,
    /// Largest window deviation of the diagonal blocks of `h0` from
    /// `beta a_±^dag a_± - (1 - beta)/2 ± epsilon/2`.
    pub lie_form_residual: f64,
}

impl HamiltonianSet {
    pub fn basis(&self) -> Basis {
        Basis::Sector(FockBasis::new(self.sector, self.cutoff))
    }
}

fn require_unit_omega(params: &ModelParams) -> Result<()> {
    if params.omega() != 1.0 {
        return Err(Error::NonUnitOmega(params.omega()));
    }
    Ok(())
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(Error::CutoffTooSmall { cutoff, required: 2 });
    }
    Ok(())
}

/// `(a^dag)^2 + a^2` and `a^dag a` on the full basis behind `cutoff` sector states.
fn quadratics(cutoff: usize) -> (BosonOp, BosonOp) {
    let a = annihilation(2 * cutoff);
    let ad = a.transpose();
    let squeeze = &(&ad * &ad) + &(&a * &a);
    let number = BosonOp::number(a.basis());
    (squeeze, number)
}

fn project(op: &BosonOp, sector: Sector) -> BosonOp {
    project_sector(op, sector)
        .expect("quadratic operators preserve parity")
        .trimmed()
}

/// Lab-frame `H = (Delta/2) sz + (eps/2) sx + omega a^dag a + g (a^dag^2 + a^2) sx`
/// in the sigma_z eigenbasis (spin up first). Accepts a general omega.
pub fn build_lab_hamiltonian(params: &ModelParams, sector: Sector, cutoff: usize) -> Result<BlockOp> {
    check_cutoff(cutoff)?;
    let (squeeze, number) = quadratics(cutoff);
    let w = params.omega();
    let diag_up = project(&number.scale(w).shift(params.delta() / 2.0), sector);
    let diag_dn = project(&number.scale(w).shift(-params.delta() / 2.0), sector);
    let off = project(&squeeze.scale(params.g()).shift(params.epsilon() / 2.0), sector);
    BlockOp::from_blocks(diag_up, off.clone(), off, diag_dn)
}

/// Conjugates the qubit factor by the real 2x2 rotation `r`: returns `r H r^T`.
pub fn rotate_qubit(op: &BlockOp, r: [[f64; 2]; 2]) -> BlockOp {
    let e = |i: usize, k: usize| {
        let mut acc = BosonOp::zeros(op.basis());
        for a in 0..2 {
            for b in 0..2 {
                let c = r[i][a] * r[k][b];
                if c != 0.0 {
                    acc = acc.add_scaled(op.block(a, b), c);
                }
            }
        }
        acc
    };
    BlockOp::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]).expect("blocks share a basis")
}

/// `exp(i pi sigma_y / 4)` as a real matrix.
pub fn frame_rotation() -> [[f64; 2]; 2] {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    [[c, c], [-c, c]]
}

/// The transformed-frame set `H0`, `H~` (omega = 1).
pub fn build_h0(params: &ModelParams, sector: Sector, cutoff: usize) -> Result<HamiltonianSet> {
    let h0 = build_h0_block(params, sector, cutoff)?;
    let lie = lie_form(params, sector, cutoff)?;
    let max_fock = window_max_fock(2 * cutoff, 2);
    let residual = (&h0 - &lie).window_max_abs(max_fock);
    let h_tilde = build_h_tilde(params, sector, cutoff)?;
    Ok(HamiltonianSet {
        h0,
        h_tilde,
        sector,
        params: *params,
        cutoff,
        lie_form_residual: residual,
    })
}

/// Just the `H0` block operator, without the partner and the form check.
pub fn build_h0_block(params: &ModelParams, sector: Sector, cutoff: usize) -> Result<BlockOp> {
    require_unit_omega(params)?;
    check_cutoff(cutoff)?;
    let (squeeze, number) = quadratics(cutoff);
    let half_eps = params.epsilon() / 2.0;
    let g = params.g();
    let h11 = project(&number.add_scaled(&squeeze, g).shift(half_eps), sector);
    let h22 = project(&number.add_scaled(&squeeze, -g).shift(-half_eps), sector);
    let off = project(&BosonOp::identity(number.basis()).scale(-params.delta() / 2.0), sector);
    BlockOp::from_blocks(h11, off.clone(), off, h22)
}

/// `2 beta K0^{a_±} - 1/2` on the sector.
fn k0_energy(params: &ModelParams, sector: Sector, cutoff: usize) -> Result<(BosonOp, BosonOp)> {
    let pair = bogoliubov_pair(params, 2 * cutoff)?;
    let beta = params.beta();
    let plus = su11_generators(&pair.plus.op, &pair.plus.dag)?.k0;
    let minus = su11_generators(&pair.minus.op, &pair.minus.dag)?.k0;
    let f = |k0: &BosonOp| project(&k0.scale(2.0 * beta).shift(-0.5), sector);
    Ok((f(&plus), f(&minus)))
}

/// `H` written through the su(1,1) generators of `a_+` and `a_-`.
pub fn lie_form(params: &ModelParams, sector: Sector, cutoff: usize) -> Result<BlockOp> {
    let (kp, km) = k0_energy(params, sector, cutoff)?;
    let half_eps = params.epsilon() / 2.0;
    let off = BosonOp::identity(kp.basis()).scale(-params.delta() / 2.0);
    BlockOp::from_blocks(kp.shift(half_eps), off.clone(), off, km.shift(-half_eps))
}

/// `H~`: the diagonal boson blocks of the Lie form swapped, bias signs kept.
pub fn build_h_tilde(params: &ModelParams, sector: Sector, cutoff: usize) -> Result<BlockOp> {
    require_unit_omega(params)?;
    check_cutoff(cutoff)?;
    let (kp, km) = k0_energy(params, sector, cutoff)?;
    let half_eps = params.epsilon() / 2.0;
    let off = BosonOp::identity(kp.basis()).scale(-params.delta() / 2.0);
    BlockOp::from_blocks(km.shift(half_eps), off.clone(), off, kp.shift(-half_eps))
}
