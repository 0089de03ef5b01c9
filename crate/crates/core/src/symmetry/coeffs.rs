//! Expansion coefficients `M_{n,m}` of the four blocks of `Q`.
//!
//! Each block is `M = sum_{n+m even, n+m <= 2N} M_{n,m} 2^{-(n+m)/2} (a_+^dag)^n (a_-)^m`,
//! the ladder-operator spelling of `(K_+^{a_+})^{n/2} (K_-^{a_-})^{m/2}`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub enum Element {
    A,
    B,
    C,
    D,
}

impl Element {
    pub const ALL: [Element; 4] = [Element::A, Element::B, Element::C, Element::D];

    /// `(row, column)` of the block inside `Q`.
    pub fn position(self) -> (usize, usize) {
        match self {
            Element::A => (0, 0),
            Element::B => (0, 1),
            Element::C => (1, 0),
            Element::D => (1, 1),
        }
    }

    /// Block whose coefficients are tied to this one by self-adjointness.
    pub fn adjoint_partner(self) -> Element {
        match self {
            Element::A => Element::A,
            Element::B => Element::C,
            Element::C => Element::B,
            Element::D => Element::D,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Index pairs `(n, m)` with `n + m` even and at most `2N`, ordered by
/// total degree and then by `n`.
pub fn lattice(n_bias: u32) -> Vec<(u32, u32)> {
    (0..=n_bias)
        .flat_map(|half| {
            let s = 2 * half;
            (0..=s).map(move |n| (n, s - n))
        })
        .collect()
}

/// Sign relating `M_{n,m}` to the adjoint partner's `M'_{m,n}`:
/// `M_{n,m} = (-1)^{(n-m)/2} M'_{m,n}`.
pub fn adjoint_sign(n: u32, m: u32) -> f64 {
    let d = (n as i64 - m as i64) / 2;
    if d.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sparse table of coefficients; absent entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub n_bias: u32,
    pub params: ModelParams,
    entries: BTreeMap<(Element, u32, u32), f64>,
}

impl CoeffTable {
    pub fn new(n_bias: u32, params: ModelParams) -> Self {
        Self {
            n_bias,
            params,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, elem: Element, n: u32, m: u32) -> f64 {
        self.entries.get(&(elem, n, m)).copied().unwrap_or(0.0)
    }

    /// Sets an entry. Panics outside the lattice.
    pub fn set(&mut self, elem: Element, n: u32, m: u32, value: f64) {
        assert!(
            (n + m).is_multiple_of(2) && n + m <= 2 * self.n_bias,
            "({n}, {m}) outside the N = {} lattice",
            self.n_bias
        );
        self.entries.insert((elem, n, m), value);
    }

    /// Non-zero entries in stable order.
    pub fn iter(&self) -> impl Iterator<Item = (Element, u32, u32, f64)> + '_ {
        self.entries
            .iter()
            .filter(|(_, v)| **v != 0.0)
            .map(|(&(e, n, m), &v)| (e, n, m, v))
    }

    /// Every lattice entry, zero or not.
    pub fn dense_iter(&self) -> impl Iterator<Item = (Element, u32, u32, f64)> + '_ {
        let lat = lattice(self.n_bias);
        Element::ALL
            .into_iter()
            .flat_map(move |e| lat.clone().into_iter().map(move |(n, m)| (e, n, m)))
            .map(|(e, n, m)| (e, n, m, self.get(e, n, m)))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest violation of `M_{n,m} = (-1)^{(n-m)/2} M'_{m,n}`.
    pub fn hermiticity_violation(&self) -> f64 {
        self.dense_iter()
            .map(|(e, n, m, v)| (v - adjoint_sign(n, m) * self.get(e.adjoint_partner(), m, n)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_{n,2N-n}|`, `|D_{n,2N-n}|` over the top tier.
    pub fn top_tier_ad(&self) -> f64 {
        let s = 2 * self.n_bias;
        (0..=s)
            .flat_map(|n| [Element::A, Element::D].map(|e| self.get(e, n, s - n).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest `|x - y| / max(|y|, 1)` over the union of both lattices,
    /// with `other` as the reference.
    pub fn max_relative_error(&self, other: &CoeffTable) -> f64 {
        let n = self.n_bias.max(other.n_bias);
        let lat = lattice(n);
        Element::ALL
            .iter()
            .flat_map(|&e| lat.iter().map(move |&(a, b)| (e, a, b)))
            .map(|(e, a, b)| {
                let x = self.get(e, a, b);
                let y = other.get(e, a, b);
                (x - y).abs() / y.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Stable JSON document with 17 significant digits per value.
    pub fn to_json(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = write!(
            s,
            "{{\n  \"N\": {},\n  \"params\": {{\"delta\": {}, \"epsilon\": {}, \"g\": {}, \"omega\": {}, \"beta\": {}}},\n  \"entries\": [",
            self.n_bias,
            fmt17(p.delta()),
            fmt17(p.epsilon()),
            fmt17(p.g()),
            fmt17(p.omega()),
            fmt17(p.beta()),
        );
        let mut first = true;
        for (e, n, m, v) in self.dense_iter() {
            s.push_str(if first { "\n" } else { ",\n" });
            first = false;
            let _ = write!(
                s,
                "    {{\"elem\": \"{e}\", \"n\": {n}, \"m\": {m}, \"value\": {}}}",
                fmt17(v)
            );
        }
        s.push_str("\n  ]\n}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Params {
            delta: f64,
            epsilon: f64,
            g: f64,
            #[serde(default = "one")]
            omega: f64,
        }
        fn one() -> f64 {
            1.0
        }
        #[derive(Deserialize)]
        struct Entry {
            elem: Element,
            n: u32,
            m: u32,
            value: f64,
        }
        #[derive(Deserialize)]
        struct Doc {
            #[serde(rename = "N")]
            n_bias: u32,
            params: Params,
            entries: Vec<Entry>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let params =
            ModelParams::relaxed(doc.params.delta, doc.params.epsilon, doc.params.g, doc.params.omega)?;
        let mut table = CoeffTable::new(doc.n_bias, params);
        for e in doc.entries {
            if (e.n + e.m) % 2 != 0 || e.n + e.m > 2 * doc.n_bias {
                return Err(Error::Config(format!(
                    "entry ({}, {}) outside the N = {} lattice",
                    e.n, e.m, doc.n_bias
                )));
            }
            table.set(e.elem, e.n, e.m, e.value);
        }
        Ok(table)
    }
}

/// Decimal scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // keeps -0.0 and 0.0 byte-identical
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// Hard-coded symmetry operators for `N = 0..=3`, transcribed from their
/// closed forms in terms of `K_+^{a_+}` and `K_-^{a_-}`.
pub fn closed_form_coeffs(n_bias: u32, params: &ModelParams) -> Result<CoeffTable> {
    use Element::*;
    params.validate()?;
    let delta = params.delta();
    let g = params.g();
    let beta = params.beta();
    let mut t = CoeffTable::new(n_bias, params.with_epsilon(2.0 * n_bias as f64 * beta));
    match n_bias {
        0 => {
            t.set(B, 0, 0, 1.0);
            t.set(C, 0, 0, 1.0);
        }
        1 => {
            let a00 = delta / (8.0 * g * beta);
            t.set(A, 0, 0, a00);
            t.set(D, 0, 0, a00);
            t.set(B, 0, 2, 1.0);
            t.set(C, 2, 0, -1.0);
        }
        2 => {
            let k = delta / (8.0 * g * beta);
            let c0 = delta / (16.0 * g * g * beta);
            let b00 = delta * delta / (64.0 * g * g * beta * beta);
            t.set(A, 2, 0, -k);
            t.set(A, 0, 2, k);
            t.set(A, 0, 0, -c0);
            t.set(D, 2, 0, -k);
            t.set(D, 0, 2, k);
            t.set(D, 0, 0, c0);
            t.set(B, 0, 4, 1.0);
            t.set(B, 0, 0, b00);
            t.set(C, 4, 0, 1.0);
            t.set(C, 0, 0, b00);
        }
        3 => {
            let k = delta / (8.0 * g * beta);
            let k2 = delta / (8.0 * g * g * beta);
            let q = delta * delta / (32.0 * g * g * beta * beta);
            let c0 = delta / (16.0 * g.powi(3) * beta) + delta.powi(3) / (512.0 * g.powi(3) * beta.powi(3));
            for (e, s) in [(A, 1.0), (D, -1.0)] {
                t.set(e, 4, 0, k);
                t.set(e, 2, 2, -k);
                t.set(e, 0, 4, k);
                t.set(e, 2, 0, s * k2);
                t.set(e, 0, 2, -s * k2);
            }
            t.set(A, 1, 1, -delta / (4.0 * g * beta * beta));
            t.set(A, 0, 0, c0 - delta / (16.0 * g * beta.powi(3)));
            t.set(D, 0, 0, c0);
            t.set(B, 0, 6, 1.0);
            t.set(B, 2, 0, -q / 2.0);
            t.set(B, 0, 2, q);
            t.set(C, 6, 0, -1.0);
            t.set(C, 2, 0, -q);
            t.set(C, 0, 2, q / 2.0);
        }
        n => return Err(Error::UnsupportedBias(n)),
    }
    Ok(t)
}
