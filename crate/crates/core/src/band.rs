//! Square band matrices.
//!
//! Every operator in this crate is a polynomial in ladder operators, so it
//! only couples Fock states a bounded distance apart. Products keep the
//! exact semantics of dense products of the truncated matrices; only the
//! storage is banded.

use faer::Mat;

#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    // row-major, entry (i, j) lives at i * width + (j + lower - i)
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let lower = lower.min(n.saturating_sub(1));
        let upper = upper.min(n.saturating_sub(1));
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            n: diag.len(),
            lower: 0,
            upper: 0,
            data: diag.to_vec(),
        }
    }

    /// Builds from a closure evaluated on the band only.
    pub fn from_fn(
        n: usize,
        lower: usize,
        upper: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut m = Self::zeros(n, lower, upper);
        for i in 0..n {
            for j in m.row_range(i) {
                let v = f(i, j);
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    /// Column range of row `i` that lies inside the band.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.n)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.n || j >= self.n || j + self.lower < i || j > i + self.upper {
            0.0
        } else {
            self.data[i * self.width() + (j + self.lower - i)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.lower >= i && j <= i + self.upper,
            "({i}, {j}) outside band"
        );
        let w = self.width();
        self.data[i * w + (j + self.lower - i)] = v;
    }

    /// Copy with a wider band; existing entries are kept.
    pub fn widened(&self, lower: usize, upper: usize) -> Self {
        if lower <= self.lower && upper <= self.upper {
            return self.clone();
        }
        let mut out = Self::zeros(self.n, lower.max(self.lower), upper.max(self.upper));
        for i in 0..self.n {
            for j in self.row_range(i) {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Drops outer diagonals that are exactly zero.
    pub fn trimmed(&self) -> Self {
        let n = self.n;
        let diag_is_zero = |off: isize| {
            (0..n).all(|i| {
                let j = i as isize + off;
                j < 0 || j >= n as isize || self.get(i, j as usize) == 0.0
            })
        };
        let mut lower = self.lower;
        while lower > 0 && diag_is_zero(-(lower as isize)) {
            lower -= 1;
        }
        let mut upper = self.upper;
        while upper > 0 && diag_is_zero(upper as isize) {
            upper -= 1;
        }
        if lower == self.lower && upper == self.upper {
            return self.clone();
        }
        Self::from_fn(n, lower, upper, |i, j| self.get(i, j))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.upper, self.lower, |i, j| self.get(j, i))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    /// `self + c * I`
    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.set(i, i, self.get(i, i) + c);
        }
        out
    }

    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.widened(other.lower, other.upper);
        for i in 0..other.n {
            for j in other.row_range(i) {
                out.set(i, j, out.get(i, j) + c * other.get(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n, self.lower + other.lower, self.upper + other.upper);
        let w = out.width();
        let ow = other.width();
        for i in 0..n {
            for k in self.row_range(i) {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let base = k * ow + other.lower - k;
                for j in other.row_range(k) {
                    // j + out.lower >= i holds because j >= k - other.lower >= i - lower_sum
                    out.data[i * w + (j + out.lower - i)] += a * other.data[base + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Restriction to the given rows and columns (same index list for both).
    pub fn select(&self, idx: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (a, &i) in idx.iter().enumerate() {
            pos[i] = a;
        }
        let kept = || {
            self.entries()
                .filter(|&(i, j, v)| v != 0.0 && pos[i] != usize::MAX && pos[j] != usize::MAX)
                .map(|(i, j, v)| (pos[i], pos[j], v))
        };
        let (mut lower, mut upper) = (0, 0);
        for (a, b, _) in kept() {
            if b < a {
                lower = lower.max(a - b);
            } else {
                upper = upper.max(b - a);
            }
        }
        let mut out = Self::zeros(idx.len(), lower, upper);
        for (a, b, v) in kept() {
            out.set(a, b, v);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest entry over rows and columns accepted by `keep`.
    pub fn max_abs_where(&self, keep: impl Fn(usize) -> bool) -> f64 {
        let mut m: f64 = 0.0;
        for i in (0..self.n).filter(|&i| keep(i)) {
            for j in self.row_range(i).filter(|&j| keep(j)) {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    pub fn to_dense(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Iterator over stored `(i, j, value)` triples.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row_range(i).map(move |j| (i, j, self.get(i, j))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_product(a: &BandMatrix, b: &BandMatrix) -> Vec<f64> {
        let n = a.dim();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum();
            }
        }
        out
    }

    fn arb_band() -> impl Strategy<Value = BandMatrix> {
        (2usize..9, 0usize..3, 0usize..3).prop_flat_map(|(n, l, u)| {
            let lw = l.min(n - 1);
            let uw = u.min(n - 1);
            prop::collection::vec(-3.0f64..3.0, n * (lw + uw + 1)).prop_map(move |vals| {
                let mut it = vals.into_iter();
                BandMatrix::from_fn(n, lw, uw, |_, _| it.next().unwrap())
            })
        })
    }

    proptest! {
        #[test]
        fn banded_product_matches_dense(a in arb_band(), seed in 0u64..1000) {
            let n = a.dim();
            let b = BandMatrix::from_fn(n, 1, 2, |i, j| ((i * 7 + j * 3) as u64 ^ seed) as f64 % 5.0 - 2.0);
            let p = a.matmul(&b);
            let d = dense_product(&a, &b);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((p.get(i, j) - d[i * n + j]).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn transpose_is_involution(a in arb_band()) {
            prop_assert_eq!(a.transpose().transpose(), a);
        }
    }

    #[test]
    fn select_every_other_index() {
        let m = BandMatrix::from_fn(6, 2, 2, |i, j| (10 * i + j) as f64);
        let s = m.select(&[0, 2, 4]);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.get(0, 1), 2.0);
        assert_eq!(s.get(2, 1), 42.0);
        assert_eq!(s.get(0, 2), 0.0);
    }

    #[test]
    fn trimmed_drops_zero_diagonals() {
        let m = BandMatrix::identity(4).widened(3, 3);
        let t = m.trimmed();
        assert_eq!((t.lower(), t.upper()), (0, 0));
        assert_eq!(t.get(2, 2), 1.0);
    }
}
