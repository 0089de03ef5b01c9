//! Truncated Fock-space operator algebra.
//!
//! Operators live either on the full basis `{|0>, ..., |D-1>}` or on one
//! parity sector of it. Quadratic boson operators never connect the two
//! sectors, so everything symmetry-related is built on the full basis and
//! then projected.

use std::ops::{Add, Mul, Neg, Sub};

use crate::band::BandMatrix;
use crate::error::{Error, Result};
use crate::params::{ModelParams, Sector};

/// Largest cross-sector element tolerated by [`project_sector`].
pub const SECTOR_LEAK_TOL: f64 = 1e-14;

/// A parity sector truncated to `cutoff` states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockBasis {
    pub sector: Sector,
    pub cutoff: usize,
}

impl FockBasis {
    pub fn new(sector: Sector, cutoff: usize) -> Self {
        Self { sector, cutoff }
    }

    pub fn fock_index(&self, k: usize) -> usize {
        self.sector.fock_index(k)
    }

    /// Dimension of the full Fock basis the sector is carved out of.
    pub fn full_dim(&self) -> usize {
        2 * self.cutoff
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Full(usize),
    Sector(FockBasis),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Full(d) => *d,
            Basis::Sector(b) => b.cutoff,
        }
    }

    pub fn fock_index(&self, k: usize) -> usize {
        match self {
            Basis::Full(_) => k,
            Basis::Sector(b) => b.fock_index(k),
        }
    }

    /// Number of Fock states of the underlying untruncated-by-parity basis.
    pub fn fock_dim(&self) -> usize {
        match self {
            Basis::Full(d) => *d,
            Basis::Sector(b) => b.full_dim(),
        }
    }
}

/// Largest Fock index at which identities involving operators that move
/// the occupation by at most `shift` are exact under truncation.
pub fn window_max_fock(fock_dim: usize, shift: usize) -> usize {
    fock_dim.saturating_sub(shift + 2)
}

/// A real operator on a (possibly sector-restricted) truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonOp {
    basis: Basis,
    matrix: BandMatrix,
}

impl BosonOp {
    pub fn new(basis: Basis, matrix: BandMatrix) -> Result<Self> {
        if basis.dim() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                left: basis.dim(),
                right: matrix.dim(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn identity(basis: Basis) -> Self {
        Self {
            basis,
            matrix: BandMatrix::identity(basis.dim()),
        }
    }

    pub fn zeros(basis: Basis) -> Self {
        Self {
            basis,
            matrix: BandMatrix::zeros(basis.dim(), 0, 0),
        }
    }

    pub fn diagonal(basis: Basis, f: impl Fn(usize) -> f64) -> Self {
        let d: Vec<f64> = (0..basis.dim()).map(|k| f(basis.fock_index(k))).collect();
        Self {
            basis,
            matrix: BandMatrix::from_diagonal(&d),
        }
    }

    /// Number operator `a^dag a`.
    pub fn number(basis: Basis) -> Self {
        Self::diagonal(basis, |n| n as f64)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &BandMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.transpose(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.scale(c),
        }
    }

    /// `self + c * I`
    pub fn shift(&self, c: f64) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.shift(c),
        }
    }

    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        Self {
            basis: self.basis,
            matrix: self.matrix.add_scaled(&other.matrix, c),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.basis), |acc, _| &acc * self)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    /// Largest element over rows and columns with Fock index `<= max_fock`.
    pub fn window_max_abs(&self, max_fock: usize) -> f64 {
        let basis = self.basis;
        self.matrix
            .max_abs_where(|k| basis.fock_index(k) <= max_fock)
    }

    /// Largest element connecting the two parity sectors.
    pub fn cross_sector_max(&self) -> f64 {
        let basis = self.basis;
        self.matrix
            .entries()
            .filter(|&(i, j, _)| (basis.fock_index(i) + basis.fock_index(j)) % 2 == 1)
            .fold(0.0, |m, (_, _, v)| m.max(v.abs()))
    }

    pub fn trimmed(&self) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.trimmed(),
        }
    }
}

impl Mul for &BosonOp {
    type Output = BosonOp;

    fn mul(self, rhs: &BosonOp) -> BosonOp {
        assert_eq!(self.basis, rhs.basis, "basis mismatch");
        BosonOp {
            basis: self.basis,
            matrix: self.matrix.matmul(&rhs.matrix),
        }
    }
}

impl Add for &BosonOp {
    type Output = BosonOp;

    fn add(self, rhs: &BosonOp) -> BosonOp {
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &BosonOp {
    type Output = BosonOp;

    fn sub(self, rhs: &BosonOp) -> BosonOp {
        self.add_scaled(rhs, -1.0)
    }
}

impl Neg for &BosonOp {
    type Output = BosonOp;

    fn neg(self) -> BosonOp {
        self.scale(-1.0)
    }
}

/// `a|n> = sqrt(n)|n-1>` on `{|0>, ..., |cutoff-1>}`.
pub fn annihilation(cutoff: usize) -> BosonOp {
    assert!(cutoff >= 2, "cutoff must be at least 2");
    let m = BandMatrix::from_fn(cutoff, 0, 1, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else {
            0.0
        }
    });
    BosonOp {
        basis: Basis::Full(cutoff),
        matrix: m,
    }
}

/// `a^dag`, the transpose of [`annihilation`]; the top state is truncated.
pub fn creation(cutoff: usize) -> BosonOp {
    annihilation(cutoff).transpose()
}

/// A Bogoliubov mode together with its adjoint.
#[derive(Debug, Clone)]
pub struct Mode {
    pub op: BosonOp,
    pub dag: BosonOp,
}

impl Mode {
    pub fn new(op: BosonOp) -> Self {
        let dag = op.transpose();
        Self { op, dag }
    }

    pub fn bare(cutoff: usize) -> Self {
        Self::new(annihilation(cutoff))
    }
}

/// `a_+ = u a + v a^dag` and `a_- = u a - v a^dag` on the full basis.
#[derive(Debug, Clone)]
pub struct BogoliubovPair {
    pub u: f64,
    pub v: f64,
    pub plus: Mode,
    pub minus: Mode,
}

pub fn bogoliubov_pair(params: &ModelParams, cutoff: usize) -> Result<BogoliubovPair> {
    let beta = params.beta();
    if !(beta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "beta must be positive (g < 1/2), got {beta}"
        )));
    }
    let (u, v) = params.bogoliubov_uv();
    let a = annihilation(cutoff);
    let ad = a.transpose();
    let plus = a.scale(u).add_scaled(&ad, v);
    let minus = a.scale(u).add_scaled(&ad, -v);
    Ok(BogoliubovPair {
        u,
        v,
        plus: Mode::new(plus),
        minus: Mode::new(minus),
    })
}

/// su(1,1) generators of one mode.
#[derive(Debug, Clone)]
pub struct Su11 {
    pub k0: BosonOp,
    pub k_plus: BosonOp,
    pub k_minus: BosonOp,
}

/// `K0 = (b^dag b + 1/2)/2`, `K+ = (b^dag)^2/2`, `K- = b^2/2`.
pub fn su11_generators(b: &BosonOp, b_dag: &BosonOp) -> Result<Su11> {
    b.check_same(b_dag)?;
    Ok(Su11 {
        k0: (b_dag * b).shift(0.5).scale(0.5),
        k_plus: (b_dag * b_dag).scale(0.5),
        k_minus: (b * b).scale(0.5),
    })
}

/// Restricts a sector-preserving full-basis operator to one sector.
pub fn project_sector(op: &BosonOp, sector: Sector) -> Result<BosonOp> {
    let Basis::Full(dim) = op.basis else {
        return Err(Error::InvalidParams(
            "project_sector expects a full-basis operator".into(),
        ));
    };
    let leak = op.cross_sector_max();
    if leak > SECTOR_LEAK_TOL {
        return Err(Error::SectorViolation { max_leak: leak });
    }
    if dim % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "full basis of dimension {dim} does not split evenly into sectors"
        )));
    }
    let idx: Vec<usize> = (0..dim).filter(|&n| sector.contains(n)).collect();
    let basis = FockBasis::new(sector, idx.len());
    Ok(BosonOp {
        basis: Basis::Sector(basis),
        matrix: op.matrix.select(&idx),
    })
}

/// Inverse of [`project_sector`] for operators supported on one sector.
pub fn embed_sector(op: &BosonOp) -> Result<BosonOp> {
    let Basis::Sector(fb) = op.basis else {
        return Err(Error::InvalidParams("embed_sector expects a sector operator".into()));
    };
    let dim = fb.full_dim();
    let m = &op.matrix;
    let mut out = BandMatrix::zeros(dim, 2 * m.lower(), 2 * m.upper());
    for (i, j, v) in m.entries() {
        out.set(fb.fock_index(i), fb.fock_index(j), v);
    }
    Ok(BosonOp {
        basis: Basis::Full(dim),
        matrix: out,
    })
}

/// `exp(i pi a^dag a / 2)` on one sector, split into a real diagonal and a
/// global phase `i^global_phase`.
#[derive(Debug, Clone)]
pub struct Z4Phase {
    pub diag: BosonOp,
    /// Number of quarter turns: 0 for the even sector, 1 for the odd one.
    pub global_phase: u8,
}

pub fn z4_phase(sector: Sector, cutoff: usize) -> Z4Phase {
    let basis = Basis::Sector(FockBasis::new(sector, cutoff));
    // i^n = i^(n mod 2) * (-1)^(n div 2)
    let diag = BosonOp::diagonal(basis, |n| if (n / 2) % 2 == 0 { 1.0 } else { -1.0 });
    Z4Phase {
        diag,
        global_phase: match sector {
            Sector::Even => 0,
            Sector::Odd => 1,
        },
    }
}

/// Two-by-two arrangement of boson operators, qubit index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOp {
    blocks: [[BosonOp; 2]; 2],
}

impl BlockOp {
    pub fn new(blocks: [[BosonOp; 2]; 2]) -> Result<Self> {
        let basis = blocks[0][0].basis;
        for b in blocks.iter().flatten() {
            if b.basis != basis {
                return Err(Error::DimensionMismatch {
                    left: blocks[0][0].dim(),
                    right: b.dim(),
                });
            }
        }
        Ok(Self { blocks })
    }

    pub fn from_blocks(a: BosonOp, b: BosonOp, c: BosonOp, d: BosonOp) -> Result<Self> {
        Self::new([[a, b], [c, d]])
    }

    pub fn block(&self, r: usize, c: usize) -> &BosonOp {
        &self.blocks[r][c]
    }

    pub fn basis(&self) -> Basis {
        self.blocks[0][0].basis
    }

    /// Dimension of each block.
    pub fn boson_dim(&self) -> usize {
        self.basis().dim()
    }

    pub fn dim(&self) -> usize {
        2 * self.boson_dim()
    }

    pub fn map(&self, f: impl Fn(&BosonOp) -> BosonOp) -> Self {
        Self {
            blocks: [
                [f(&self.blocks[0][0]), f(&self.blocks[0][1])],
                [f(&self.blocks[1][0]), f(&self.blocks[1][1])],
            ],
        }
    }

    pub fn transpose(&self) -> Self {
        let t = |r: usize, c: usize| self.blocks[c][r].transpose();
        Self {
            blocks: [[t(0, 0), t(0, 1)], [t(1, 0), t(1, 1)]],
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|b| b.scale(c))
    }

    /// `(D (x) I) * self`: multiplies every block from the left by `diag`.
    pub fn left_mul(&self, diag: &BosonOp) -> Self {
        self.map(|b| diag * b)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().flatten().fold(0.0, |m, b| m.max(b.max_abs()))
    }

    pub fn window_max_abs(&self, max_fock: usize) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .fold(0.0, |m, b| m.max(b.window_max_abs(max_fock)))
    }

    /// Dense matrix in block-major order (upper qubit state first).
    pub fn to_dense(&self) -> faer::Mat<f64> {
        let n = self.boson_dim();
        let mut m = faer::Mat::zeros(2 * n, 2 * n);
        for r in 0..2 {
            for c in 0..2 {
                for (i, j, v) in self.blocks[r][c].matrix.entries() {
                    m[(r * n + i, c * n + j)] = v;
                }
            }
        }
        m
    }

    /// Matrix-vector product in block-major order.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.boson_dim();
        assert_eq!(x.len(), 2 * n);
        let mut y = vec![0.0; 2 * n];
        for r in 0..2 {
            for c in 0..2 {
                let part = self.blocks[r][c].matrix.matvec(&x[c * n..(c + 1) * n]);
                for (yi, pi) in y[r * n..(r + 1) * n].iter_mut().zip(part) {
                    *yi += pi;
                }
            }
        }
        y
    }

    /// Largest `|M_ij - M_ji|` over the full block matrix.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        (self - &t).max_abs()
    }
}

impl Mul for &BlockOp {
    type Output = BlockOp;

    fn mul(self, rhs: &BlockOp) -> BlockOp {
        let e = |r: usize, c: usize| {
            &(&self.blocks[r][0] * &rhs.blocks[0][c]) + &(&self.blocks[r][1] * &rhs.blocks[1][c])
        };
        BlockOp {
            blocks: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }
}

impl Sub for &BlockOp {
    type Output = BlockOp;

    fn sub(self, rhs: &BlockOp) -> BlockOp {
        let e = |r: usize, c: usize| &self.blocks[r][c] - &rhs.blocks[r][c];
        BlockOp {
            blocks: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }
}

impl Add for &BlockOp {
    type Output = BlockOp;

    fn add(self, rhs: &BlockOp) -> BlockOp {
        let e = |r: usize, c: usize| &self.blocks[r][c] + &rhs.blocks[r][c];
        BlockOp {
            blocks: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_elements() {
        let a = annihilation(8);
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(3, 4), 2.0);
        assert!((0..8).all(|i| a.get(i, 0) == 0.0));
        let ad = creation(8);
        assert_eq!(ad.get(1, 0), 1.0);
        assert_eq!(ad, a.transpose());
        let comm = a.commutator(&ad);
        for n in 0..=6 {
            assert!((comm.get(n, n) - 1.0).abs() < 1e-14);
        }
        // truncation edge
        assert!((comm.get(7, 7) + 7.0).abs() < 1e-12);
    }

    #[test]
    fn bogoliubov_commutator_window() {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        let cutoff = 40;
        let pair = bogoliubov_pair(&p, cutoff).unwrap();
        let w = window_max_fock(cutoff, 2);
        let c = pair.plus.op.commutator(&pair.plus.dag).shift(-1.0);
        assert!(c.window_max_abs(w) < 1e-12);
        // mixed-mode commutator equals 1/beta
        let mixed = pair.minus.op.commutator(&pair.plus.dag).shift(-1.0 / p.beta());
        assert!(mixed.window_max_abs(w) < 1e-12);
    }

    #[test]
    fn su11_vacuum_and_relations() {
        let cutoff = 30;
        let m = Mode::bare(cutoff);
        let k = su11_generators(&m.op, &m.dag).unwrap();
        assert_eq!(k.k0.get(0, 0), 0.25);
        let w = window_max_fock(cutoff, 2);
        let r1 = &k.k0.commutator(&k.k_plus) - &k.k_plus;
        let r2 = &k.k_minus.commutator(&k.k_plus) - &k.k0.scale(2.0);
        assert!(r1.window_max_abs(w) < 1e-12);
        assert!(r2.window_max_abs(w) < 1e-12);
    }

    #[test]
    fn su11_rejects_mismatched_modes() {
        let a = annihilation(6);
        let b = creation(8);
        assert!(matches!(
            su11_generators(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn project_examples() {
        let a = annihilation(12);
        let a2 = &a * &a;
        let p = project_sector(&a2, Sector::Even).unwrap();
        assert_eq!(p.dim(), 6);
        assert!((p.get(0, 1) - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            project_sector(&a, Sector::Even),
            Err(Error::SectorViolation { .. })
        ));
        let n = BosonOp::number(Basis::Full(12));
        let pn = project_sector(&n, Sector::Even).unwrap();
        let diag: Vec<f64> = (0..4).map(|k| pn.get(k, k)).collect();
        assert_eq!(diag, vec![0.0, 2.0, 4.0, 6.0]);
        let po = project_sector(&n, Sector::Odd).unwrap();
        assert_eq!(po.get(0, 0), 1.0);
    }

    #[test]
    fn embed_then_project_round_trips() {
        let a = annihilation(14);
        let x = &(&a * &a) + &(&a.transpose() * &a.transpose());
        for s in Sector::both() {
            let p = project_sector(&x, s).unwrap();
            let back = project_sector(&embed_sector(&p).unwrap(), s).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn z4_phase_entries() {
        let e = z4_phase(Sector::Even, 4);
        let d: Vec<f64> = (0..4).map(|k| e.diag.get(k, k)).collect();
        assert_eq!(d, vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(e.global_phase, 0);
        let o = z4_phase(Sector::Odd, 3);
        let d: Vec<f64> = (0..3).map(|k| o.diag.get(k, k)).collect();
        assert_eq!(d, vec![1.0, -1.0, 1.0]);
        assert_eq!(o.global_phase, 1);
        let sq = &o.diag * &o.diag;
        assert_eq!(sq, BosonOp::identity(o.diag.basis()).trimmed());
    }
}
