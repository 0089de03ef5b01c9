//! Parity labels of eigenstates from the symmetry operator.

use std::fmt;

use serde::{Serialize, Serializer};

use super::jsquare::JSquarePoly;
use super::operator::SymmetryOperator;
use crate::error::{Error, Result};
use crate::fock::BlockOp;
use crate::linalg::{dot, norm2};
use crate::spectrum::Eigensystem;

/// Levels closer than `DEGENERACY_TOL * max(1, |E|)` are labeled jointly.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Positive,
    Negative,
    Unlabeled,
}

impl Parity {
    pub fn from_sign(x: f64) -> Self {
        if x > 0.0 {
            Parity::Positive
        } else if x < 0.0 {
            Parity::Negative
        } else {
            Parity::Unlabeled
        }
    }

    /// `1`, `-1` or `0`.
    pub fn value(self) -> i8 {
        match self {
            Parity::Positive => 1,
            Parity::Negative => -1,
            Parity::Unlabeled => 0,
        }
    }

    pub fn is_labeled(self) -> bool {
        self != Parity::Unlabeled
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Parity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

/// Labels together with `<v|J|v>` and `|J v|` for each state.
#[derive(Debug, Clone)]
pub struct StateLabels {
    pub labels: Vec<Parity>,
    pub expectations: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Labels the eigenstates by the sign of `<v|J|v>`. Near-degenerate pairs
/// are resolved by diagonalizing `J` inside the pair. A state whose
/// expectation is less than half of `|J v|` is not a `J` eigenstate and
/// stays unlabeled.
pub fn label_states(j_real: &BlockOp, es: &Eigensystem) -> StateLabels {
    let n = es.len();
    let jv: Vec<Vec<f64>> = es.vectors.iter().map(|v| j_real.apply(v)).collect();
    let norms: Vec<f64> = jv.iter().map(|x| norm2(x)).collect();
    let mut expectations: Vec<f64> = es.vectors.iter().zip(&jv).map(|(v, x)| dot(v, x)).collect();
    let mut i = 0;
    while i + 1 < n {
        let (e0, e1) = (es.values[i], es.values[i + 1]);
        if (e1 - e0).abs() < DEGENERACY_TOL * e0.abs().max(1.0) {
            let off = 0.5 * (dot(&es.vectors[i], &jv[i + 1]) + dot(&es.vectors[i + 1], &jv[i]));
            let (a, d) = (expectations[i], expectations[i + 1]);
            let mean = 0.5 * (a + d);
            let r = (0.5 * (a - d)).hypot(off);
            // rotation angle of the eigenvector closest to the first state
            let theta = 0.5 * (2.0 * off).atan2(a - d);
            let (c, s) = (theta.cos(), theta.sin());
            let first = if c * c >= s * s { mean + r } else { mean - r };
            expectations[i] = first;
            expectations[i + 1] = 2.0 * mean - first;
            i += 2;
        } else {
            i += 1;
        }
    }
    let labels = expectations
        .iter()
        .zip(&norms)
        .map(|(&x, &nrm)| {
            if nrm > 0.0 && x.abs() >= 0.5 * nrm {
                Parity::from_sign(x)
            } else {
                Parity::Unlabeled
            }
        })
        .collect();
    StateLabels {
        labels,
        expectations,
        norms,
    }
}

/// Labels from the rescaled operator `J / sqrt(P(H))`.
#[derive(Debug, Clone)]
pub struct ParityLabels {
    pub labels: Vec<Parity>,
    /// `<v| J / sqrt(P(E)) |v>`, which is `+-1` for converged states.
    pub pi_values: Vec<f64>,
}

/// Applies the rescaled parity to the first `count` states of `es`.
pub fn parity_operator(
    j: &SymmetryOperator,
    es: &Eigensystem,
    poly: &JSquarePoly,
    count: usize,
) -> Result<ParityLabels> {
    let count = count.min(es.len());
    let sub = Eigensystem {
        values: es.values[..count].to_vec(),
        vectors: es.vectors[..count].to_vec(),
    };
    for &e in &sub.values {
        let value = poly.eval(e);
        if !(value > 0.0) {
            return Err(Error::NonPositivePoly { energy: e, value });
        }
    }
    let raw = label_states(&j.j_real, &sub);
    let pi_values: Vec<f64> = raw
        .expectations
        .iter()
        .zip(&sub.values)
        .map(|(x, &e)| x / poly.eval(e).sqrt())
        .collect();
    Ok(ParityLabels {
        labels: raw.labels,
        pi_values,
    })
}
