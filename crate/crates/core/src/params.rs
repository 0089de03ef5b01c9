//! Physical parameters of the biased two-photon Rabi model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether `epsilon / (2 beta)` is an integer.
pub const INTEGER_BIAS_TOL: f64 = 1e-9;

/// Parity sector of the bosonic Fock space under `exp(i pi a^dag a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// Even occupations, the q = 1/4 subspace.
    Even,
    /// Odd occupations, the q = 3/4 subspace.
    Odd,
}

impl Sector {
    /// Fock occupation of the `k`-th state of the sector.
    pub fn fock_index(self, k: usize) -> usize {
        match self {
            Sector::Even => 2 * k,
            Sector::Odd => 2 * k + 1,
        }
    }

    pub fn contains(self, fock: usize) -> bool {
        (fock % 2 == 1) == (self == Sector::Odd)
    }

    pub fn both() -> [Sector; 2] {
        [Sector::Even, Sector::Odd]
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
        })
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(Sector::Even),
            "odd" => Ok(Sector::Odd),
            other => Err(Error::Config(format!("unknown sector {other:?}"))),
        }
    }
}

/// Qubit splitting, bias, coupling and cavity frequency.
///
/// All four are energies in the same unit. Everything in the transformed
/// frame assumes `omega = 1`; use [`ModelParams::in_cavity_units`] to get
/// there from a general `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    delta: f64,
    epsilon: f64,
    g: f64,
    omega: f64,
}

impl ModelParams {
    /// Strict constructor: `delta > 0`, `0 < g < 1/2`, `omega = 1`.
    pub fn new(delta: f64, epsilon: f64, g: f64) -> Result<Self> {
        let p = Self {
            delta,
            epsilon,
            g,
            omega: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Strict parameters with the bias set to `epsilon = 2 * ratio * beta`.
    pub fn with_bias_ratio(delta: f64, ratio: f64, g: f64) -> Result<Self> {
        let beta = beta_of(g, 1.0)?;
        Self::new(delta, 2.0 * ratio * beta, g)
    }

    /// Admits the decoupled limits `g = 0` and `delta = 0`, and a general
    /// `omega`. Only the Hamiltonian builders accept these; everything that
    /// divides by `g` or `delta` calls [`ModelParams::validate`] first.
    pub fn relaxed(delta: f64, epsilon: f64, g: f64, omega: f64) -> Result<Self> {
        let p = Self {
            delta,
            epsilon,
            g,
            omega,
        };
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParams(format!("delta must be >= 0, got {delta}")));
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidParams("epsilon must be finite".into()));
        }
        if !(g >= 0.0 && g < 0.5 * omega) {
            return Err(Error::InvalidParams(format!(
                "coupling must satisfy 0 <= g < omega/2, got g = {g}"
            )));
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega != 1.0 {
            return Err(Error::NonUnitOmega(self.omega));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::InvalidParams("epsilon must be finite".into()));
        }
        if !(self.g > 0.0 && self.g < 0.5) {
            return Err(Error::InvalidParams(format!(
                "coupling must satisfy 0 < g < 1/2, got g = {}",
                self.g
            )));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Renormalized cavity frequency in units of omega, `sqrt(1 - 4 (g/omega)^2)`.
    pub fn beta(&self) -> f64 {
        let x = self.g / self.omega;
        (1.0 - 4.0 * x * x).sqrt()
    }

    /// Bogoliubov coefficients `(u, v)` with `u^2 - v^2 = 1`.
    pub fn bogoliubov_uv(&self) -> (f64, f64) {
        let beta = self.beta();
        (
            ((1.0 + beta) / (2.0 * beta)).sqrt(),
            ((1.0 - beta) / (2.0 * beta)).sqrt(),
        )
    }

    /// `epsilon / (2 beta)` in cavity units.
    pub fn bias_ratio(&self) -> f64 {
        self.epsilon / self.omega / (2.0 * self.beta())
    }

    /// `N` when the bias is an exact even multiple of beta, otherwise `None`.
    pub fn n_bias(&self) -> Option<u32> {
        integer_ratio(self.bias_ratio())
    }

    /// Same physics with every energy divided by omega.
    pub fn in_cavity_units(&self) -> Self {
        Self {
            delta: self.delta / self.omega,
            epsilon: self.epsilon / self.omega,
            g: self.g / self.omega,
            omega: 1.0,
        }
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.delta, self.epsilon, g)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    /// Requires the bias to equal `2 N beta`.
    pub fn check_bias(&self, n_bias: u32) -> Result<()> {
        let target = 2.0 * n_bias as f64 * self.beta();
        if (self.epsilon - target).abs() > INTEGER_BIAS_TOL * target.abs().max(1.0) {
            return Err(Error::BiasMismatch {
                n_bias,
                epsilon: self.epsilon,
                beta: self.beta(),
            });
        }
        Ok(())
    }
}

/// `Some(n)` when `ratio` is a non-negative integer within [`INTEGER_BIAS_TOL`].
pub fn integer_ratio(ratio: f64) -> Option<u32> {
    let r = ratio.round();
    if r >= 0.0 && (ratio - r).abs() <= INTEGER_BIAS_TOL * r.max(1.0) {
        Some(r as u32)
    } else {
        None
    }
}

fn beta_of(g: f64, omega: f64) -> Result<f64> {
    if !(g > 0.0 && g < 0.5 * omega) {
        return Err(Error::InvalidParams(format!(
            "coupling must satisfy 0 < g < omega/2, got g = {g}"
        )));
    }
    let x = g / omega;
    Ok((1.0 - 4.0 * x * x).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_and_uv_at_g_03() {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        assert!((p.beta() - 0.8).abs() < 1e-15);
        let (u, v) = p.bogoliubov_uv();
        assert!((u - 1.060_660_2).abs() < 1e-7);
        assert!((v - 0.353_553_4).abs() < 1e-7);
        assert!((u * u - v * v - 1.0).abs() < 1e-14);
        assert!((p.beta().powi(2) + 4.0 * 0.09 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_collapse_point_and_nonpositive_delta() {
        assert!(ModelParams::new(1.0, 0.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, 0.2).is_err());
        assert!(ModelParams::relaxed(0.0, 0.0, 0.0, 1.0).is_ok());
        assert!(ModelParams::relaxed(1.0, 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn integer_bias_detection() {
        let p = ModelParams::with_bias_ratio(1.0, 2.0, 0.3).unwrap();
        assert_eq!(p.n_bias(), Some(2));
        assert!(p.check_bias(2).is_ok());
        assert!(p.check_bias(1).is_err());
        let half = ModelParams::with_bias_ratio(1.0, 0.5, 0.3).unwrap();
        assert_eq!(half.n_bias(), None);
    }

    #[test]
    fn cavity_units_rescale() {
        let p = ModelParams::relaxed(2.0, 1.0, 0.6, 2.0).unwrap();
        let q = p.in_cavity_units();
        assert_eq!(q.omega(), 1.0);
        assert!((q.g() - 0.3).abs() < 1e-15);
        assert!((p.beta() - q.beta()).abs() < 1e-15);
    }
}
