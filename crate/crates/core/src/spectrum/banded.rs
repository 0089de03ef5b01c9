//! Eigenvalues and eigenvectors of the low end of a sector Hamiltonian.
//!
//! In the basis ordered `(k, qubit)` the Hamiltonian is block tridiagonal
//! with 2x2 blocks. Eigenvalues come from Sturm-count bisection on the block
//! LDL^T factorization; eigenvectors from inverse iteration with a banded LU.

use crate::band::BandMatrix;
use crate::error::{Error, Result};
use crate::fock::BlockOp;
use crate::linalg::{dot, norm2};

type Block = [[f64; 2]; 2];

#[derive(Debug, Clone)]
pub struct BlockTridiag {
    diag: Vec<Block>,
    /// Coupling between boson states `k` and `k + 1`.
    off: Vec<Block>,
    pivmin: f64,
}

impl BlockTridiag {
    /// Fails unless every boson block couples only neighbouring sector states.
    pub fn from_block_op(h: &BlockOp) -> Result<Self> {
        let n = h.boson_dim();
        for r in 0..2 {
            for c in 0..2 {
                let m = h.block(r, c).matrix();
                if m.lower() > 1 || m.upper() > 1 {
                    return Err(Error::InvalidParams(
                        "operator is not block tridiagonal".into(),
                    ));
                }
            }
        }
        let get = |r: usize, c: usize, i: usize, j: usize| h.block(r, c).get(i, j);
        let diag = (0..n)
            .map(|k| [[get(0, 0, k, k), get(0, 1, k, k)], [get(1, 0, k, k), get(1, 1, k, k)]])
            .collect();
        let off: Vec<Block> = (0..n.saturating_sub(1))
            .map(|k| {
                [
                    [get(0, 0, k, k + 1), get(0, 1, k, k + 1)],
                    [get(1, 0, k, k + 1), get(1, 1, k, k + 1)],
                ]
            })
            .collect();
        let emax = off
            .iter()
            .flat_map(|b: &Block| b.iter().flatten())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        Ok(Self {
            diag,
            off,
            pivmin: f64::MIN_POSITIVE * emax * emax,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.diag.len()
    }

    /// Bounds containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            for r in 0..2 {
                let mut rad = self.diag[k][r][1 - r].abs();
                if k > 0 {
                    rad += self.off[k - 1][0][r].abs() + self.off[k - 1][1][r].abs();
                }
                if k + 1 < n {
                    rad += self.off[k][r][0].abs() + self.off[k][r][1].abs();
                }
                lo = lo.min(self.diag[k][r][r] - rad);
                hi = hi.max(self.diag[k][r][r] + rad);
            }
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.diag.len();
        let mut count = 0;
        let mut s = shifted(&self.diag[0], sigma);
        for k in 0..n {
            let (neg, inv) = inertia_and_inverse(s, self.pivmin);
            count += neg;
            if k + 1 < n {
                let b = &self.off[k];
                // S_{k+1} = A_{k+1} - sigma - B^T S_k^{-1} B
                let mut next = shifted(&self.diag[k + 1], sigma);
                for i in 0..2 {
                    for j in 0..2 {
                        let mut acc = 0.0;
                        for p in 0..2 {
                            for q in 0..2 {
                                acc += b[p][i] * inv[p][q] * b[q][j];
                            }
                        }
                        next[i][j] -= acc;
                    }
                }
                s = next;
            }
        }
        count
    }

    /// The `k` lowest eigenvalues, ascending, to near machine precision.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let k = k.min(self.dim());
        if k == 0 {
            return Vec::new();
        }
        let (glo, ghi) = self.gershgorin();
        let pad = 2.0 * f64::EPSILON * glo.abs().max(ghi.abs()) + self.pivmin;
        let mut lo = vec![glo - pad; k];
        let mut hi = vec![ghi + pad; k];
        for j in 0..k {
            for _ in 0..200 {
                let width = hi[j] - lo[j];
                let tol = 2.0 * f64::EPSILON * lo[j].abs().max(hi[j].abs()) + 4.0 * self.pivmin;
                if width <= tol {
                    break;
                }
                let mid = 0.5 * (lo[j] + hi[j]);
                if mid <= lo[j] || mid >= hi[j] {
                    break;
                }
                let c = self.count_below(mid);
                // every eigenvalue with index < c lies below mid
                for t in j..k {
                    if t < c {
                        hi[t] = hi[t].min(mid);
                    } else {
                        lo[t] = lo[t].max(mid);
                    }
                }
            }
        }
        (0..k).map(|j| 0.5 * (lo[j] + hi[j])).collect()
    }

    /// Same matrix in the interleaved `(k, qubit)` order as a band matrix.
    pub fn to_band(&self) -> BandMatrix {
        let n = self.diag.len();
        BandMatrix::from_fn(2 * n, 3, 3, |i, j| {
            let (ki, ri) = (i / 2, i % 2);
            let (kj, rj) = (j / 2, j % 2);
            if ki == kj {
                self.diag[ki][ri][rj]
            } else if kj == ki + 1 {
                self.off[ki][ri][rj]
            } else if ki == kj + 1 {
                self.off[kj][rj][ri]
            } else {
                0.0
            }
        })
        .trimmed()
    }

    /// Eigenvectors for the given (ascending) eigenvalues, in block-major
    /// order. Close eigenvalues are resolved by orthogonalization followed
    /// by a Rayleigh-Ritz rotation inside the cluster.
    pub fn eigenvectors(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let band = self.to_band();
        let n = band.dim();
        let scale = band.max_abs().max(1.0);
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        let mut cluster_start = 0;
        for (idx, &lambda) in values.iter().enumerate() {
            if idx > 0 && (lambda - values[idx - 1]).abs() > CLUSTER_TOL * scale {
                self.finish_cluster(&band, &mut vecs[cluster_start..]);
                cluster_start = idx;
            }
            let lu = BandLu::factor(&band, lambda);
            let mut x: Vec<f64> = (0..n)
                .map(|i| 1.0 + (((i * 7919 + idx * 104_729) % 1009) as f64) / 1009.0)
                .collect();
            for _ in 0..3 {
                x = lu.solve(&x);
                for q in &vecs[cluster_start..] {
                    let c = dot(&x, q);
                    x.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
                let nx = norm2(&x);
                x.iter_mut().for_each(|a| *a /= nx);
            }
            vecs.push(x);
        }
        let len = vecs.len();
        if len > cluster_start {
            self.finish_cluster(&band, &mut vecs[cluster_start..]);
        }
        vecs.into_iter().map(|v| deinterleave(&v)).collect()
    }

    fn finish_cluster(&self, band: &BandMatrix, vecs: &mut [Vec<f64>]) {
        let m = vecs.len();
        if m < 2 {
            return;
        }
        let hv: Vec<Vec<f64>> = vecs.iter().map(|v| band.matvec(v)).collect();
        let small = faer::Mat::from_fn(m, m, |i, j| 0.5 * (dot(&vecs[i], &hv[j]) + dot(&vecs[j], &hv[i])));
        let Ok((_, rot)) = crate::linalg::symmetric_eigen(&small) else {
            return;
        };
        let old: Vec<Vec<f64>> = vecs.to_vec();
        for (j, v) in vecs.iter_mut().enumerate() {
            for (t, x) in v.iter_mut().enumerate() {
                *x = (0..m).map(|i| rot[(i, j)] * old[i][t]).sum();
            }
        }
    }
}

/// Relative spacing (to the matrix scale) below which eigenvalues are
/// treated as one cluster during inverse iteration.
const CLUSTER_TOL: f64 = 1e-9;

fn shifted(a: &Block, sigma: f64) -> Block {
    [[a[0][0] - sigma, a[0][1]], [a[1][0], a[1][1] - sigma]]
}

/// Negative-eigenvalue count and inverse of a symmetric 2x2 block, with
/// near-zero eigenvalues pushed to `-pivmin`.
fn inertia_and_inverse(s: Block, pivmin: f64) -> (usize, Block) {
    let (mut a, b, mut d) = (s[0][0], 0.5 * (s[0][1] + s[1][0]), s[1][1]);
    let mean = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b);
    let mut big = if mean >= 0.0 { mean + r } else { mean - r };
    let mut small = if big != 0.0 { (a * d - b * b) / big } else { 0.0 };
    if small.abs() < pivmin {
        let delta = small + pivmin;
        a -= delta;
        d -= delta;
        big -= delta;
        small = -pivmin;
    }
    if big.abs() < pivmin {
        let delta = big + pivmin;
        a -= delta;
        d -= delta;
        big = -pivmin;
    }
    let neg = (small < 0.0) as usize + (big < 0.0) as usize;
    let det = small * big;
    (neg, [[d / det, -b / det], [-b / det, a / det]])
}

fn deinterleave(x: &[f64]) -> Vec<f64> {
    let n = x.len() / 2;
    let mut out = vec![0.0; x.len()];
    for k in 0..n {
        out[k] = x[2 * k];
        out[n + k] = x[2 * k + 1];
    }
    out
}

/// Block-major vector to the interleaved order.
pub fn interleave(x: &[f64]) -> Vec<f64> {
    let n = x.len() / 2;
    let mut out = vec![0.0; x.len()];
    for k in 0..n {
        out[2 * k] = x[k];
        out[2 * k + 1] = x[n + k];
    }
    out
}

/// LU factorization with partial pivoting of `A - shift I` for a band `A`.
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    w: usize,
    rows: Vec<f64>,
    mult: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &BandMatrix, shift: f64) -> Self {
        let n = a.dim();
        let kl = a.lower().max(1);
        let ku = a.upper().max(1);
        let w = 2 * kl + ku + 1;
        let mut rows = vec![0.0; n * w];
        for (i, j, v) in a.entries() {
            rows[i * w + (j + kl - i)] = if i == j { v - shift } else { v };
        }
        let tiny = f64::EPSILON * a.max_abs().max(shift.abs()).max(1.0);
        let mut mult = vec![0.0; n * kl];
        let mut piv = vec![0; n];
        let at = |p: usize, c: usize| p * w + (c + kl - p);
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let reach = (j + kl + ku).min(n - 1);
            let mut p = j;
            for r in j + 1..=last {
                if rows[at(r, j)].abs() > rows[at(p, j)].abs() {
                    p = r;
                }
            }
            piv[j] = p;
            if p != j {
                for c in j..=reach {
                    rows.swap(at(j, c), at(p, c));
                }
            }
            let mut pivot = rows[at(j, j)];
            if pivot.abs() < tiny {
                pivot = if pivot < 0.0 { -tiny } else { tiny };
                rows[at(j, j)] = pivot;
            }
            for r in j + 1..=last {
                let m = rows[at(r, j)] / pivot;
                mult[j * kl + (r - j - 1)] = m;
                rows[at(r, j)] = 0.0;
                if m != 0.0 {
                    for c in j + 1..=reach {
                        rows[at(r, c)] -= m * rows[at(j, c)];
                    }
                }
            }
        }
        Self {
            n,
            kl,
            ku,
            w,
            rows,
            mult,
            piv,
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, w) = (self.n, self.kl, self.w);
        let mut y = b.to_vec();
        for j in 0..n {
            y.swap(j, self.piv[j]);
            let last = (j + kl).min(n - 1);
            for r in j + 1..=last {
                y[r] -= self.mult[j * kl + (r - j - 1)] * y[j];
            }
        }
        let mut x = vec![0.0; n];
        for j in (0..n).rev() {
            let reach = (j + kl + self.ku).min(n - 1);
            let mut s = y[j];
            for c in j + 1..=reach {
                s -= self.rows[j * w + (c + kl - j)] * x[c];
            }
            x[j] = s / self.rows[j * w + kl];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_h0_block;
    use crate::params::{ModelParams, Sector};

    #[test]
    fn band_lu_solves() {
        let a = BandMatrix::from_fn(9, 2, 2, |i, j| if i == j { 0.1 * i as f64 } else { 1.0 / (1 + i + j) as f64 });
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let b = a.shift(-0.37).matvec(&x);
        let lu = BandLu::factor(&a, 0.37);
        let y = lu.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn bisection_matches_dense() {
        let p = ModelParams::new(1.7, 0.9, 0.33).unwrap();
        let h = build_h0_block(&p, Sector::Even, 60).unwrap();
        let bt = BlockTridiag::from_block_op(&h).unwrap();
        let fast = bt.lowest_eigenvalues(12);
        let (dense, _) = crate::linalg::symmetric_eigen(&h.to_dense()).unwrap();
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
        let vecs = bt.eigenvectors(&fast);
        for (v, &e) in vecs.iter().zip(&fast) {
            let hv = h.apply(v);
            let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
            assert!(r < 1e-9, "residual {r:e}");
        }
    }
}
