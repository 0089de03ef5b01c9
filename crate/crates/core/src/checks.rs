//! Named numerical checks with their tolerances, shared by the `verify`
//! command and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{bogoliubov_pair, su11_generators, window_max_fock, BosonOp, Mode};
use crate::model::build_h0;
use crate::params::{ModelParams, Sector};
use crate::symmetry::coeffs::{closed_form_coeffs, Element};
use crate::symmetry::operator::min_cutoff;
use crate::symmetry::{nullspace_symmetry, solve_recurrence, symmetry_operator};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        a
    }
}

/// `count` parameter sets with `delta` and `g` drawn uniformly from the given
/// ranges. Same seed, same sets.
pub fn sample_params(
    seed: u64,
    count: usize,
    delta: (f64, f64),
    g: (f64, f64),
) -> Result<Vec<ModelParams>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.random_range(delta.0..=delta.1);
            let gg = rng.random_range(g.0..=g.1);
            ModelParams::new(d, 0.0, gg)
        })
        .collect()
}

/// Recurrence against the closed forms and the nullspace oracle for
/// `N = 1..=3` over `count` seeded parameter sets.
pub fn oracle_checks(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, p) in sample_params(seed, count, (0.2, 3.0), (0.05, 0.45))?.iter().enumerate() {
        for n in 1..=3 {
            let table = solve_recurrence(n, p)?.table;
            let closed = closed_form_coeffs(n, &table.params)?;
            out.push(Check::at_most(
                format!("random[{i}].N{n}.closed_form"),
                table.max_relative_error(&closed),
                1e-8,
            ));
            let ns = nullspace_symmetry(n, &table.params, Sector::Even, min_cutoff(n) + 4)?;
            out.push(Check::at_most(
                format!("random[{i}].N{n}.nullspace"),
                ns.table.max_relative_error(&table),
                1e-8,
            ));
        }
    }
    Ok(out)
}

/// Commutators, su(1,1) relations and power relations of `a`, `a_+`, `a_-`
/// on a full basis of `fock_dim` states, for powers `1..=n_max`.
pub fn algebra_checks(params: &ModelParams, fock_dim: usize, n_max: u32) -> Result<Vec<Check>> {
    let pair = bogoliubov_pair(params, fock_dim)?;
    let modes = [
        ("a", Mode::bare(fock_dim)),
        ("a_plus", pair.plus.clone()),
        ("a_minus", pair.minus.clone()),
    ];
    let w2 = window_max_fock(fock_dim, 2);
    let mut out = Vec::new();
    for (name, m) in &modes {
        let c = m.op.commutator(&m.dag).shift(-1.0);
        out.push(Check::at_most(format!("commutator[{name}]"), c.window_max_abs(w2), 1e-10));
        let k = su11_generators(&m.op, &m.dag)?;
        let r1 = &k.k0.commutator(&k.k_plus) - &k.k_plus;
        let r2 = &k.k0.commutator(&k.k_minus) + &k.k_minus;
        let r3 = &k.k_minus.commutator(&k.k_plus) - &k.k0.scale(2.0);
        let rel = |r: &BosonOp, s: &BosonOp| ratio(r.window_max_abs(w2), s.window_max_abs(w2));
        out.push(Check::at_most(format!("su11[{name}].k0_kplus"), rel(&r1, &k.k_plus), 1e-10));
        out.push(Check::at_most(format!("su11[{name}].k0_kminus"), rel(&r2, &k.k_minus), 1e-10));
        out.push(Check::at_most(format!("su11[{name}].kminus_kplus"), rel(&r3, &k.k0), 1e-10));
        for n in 1..=n_max {
            let w = window_max_fock(fock_dim, 2 * n as usize + 2);
            let km_n = k.k_minus.pow(n);
            let r = &km_n.commutator(&k.k0) - &km_n.scale(n as f64);
            out.push(Check::at_most(
                format!("power[{name}].kminus^{n}"),
                ratio(r.window_max_abs(w), km_n.window_max_abs(w)),
                1e-10,
            ));
            let kp_n = k.k_plus.scale(-1.0).pow(n);
            let r = &k.k0.commutator(&kp_n) - &kp_n.scale(n as f64);
            out.push(Check::at_most(
                format!("power[{name}].kplus^{n}"),
                ratio(r.window_max_abs(w), kp_n.window_max_abs(w)),
                1e-10,
            ));
        }
    }
    Ok(out)
}

/// Every property of `J_N` at one parameter point. `params` supplies
/// `delta` and `g`; the bias is set to `2 N beta`.
pub fn symmetry_checks(n: u32, params: &ModelParams, sector: Sector, cutoff: usize) -> Result<Vec<Check>> {
    let sol = solve_recurrence(n, params)?;
    let table = &sol.table;
    let p = table.params;
    let mut out = vec![
        Check::at_most("recurrence.residual", sol.residual, 1e-8),
        Check::at_most(
            "recurrence.hermiticity",
            ratio(table.hermiticity_violation(), table.max_abs().max(1.0)),
            1e-12,
        ),
    ];
    let top = 2 * n;
    for k in 0..=top {
        for e in [Element::A, Element::D] {
            out.push(Check::at_most(
                format!("top_tier.{e}[{k},{}]", top - k),
                table.get(e, k, top - k).abs(),
                1e-10,
            ));
        }
    }
    if n <= 3 {
        let closed = closed_form_coeffs(n, &p)?;
        out.push(Check::at_most(
            "oracle.closed_form",
            table.max_relative_error(&closed),
            1e-10,
        ));
    }
    let ns = nullspace_symmetry(n, &p, sector, min_cutoff(n) + 4)?;
    out.push(Check::at_most("oracle.nullspace", ns.table.max_relative_error(table), 1e-8));

    let set = build_h0(&p, sector, cutoff)?;
    out.push(Check::at_most("h0.lie_form", set.lie_form_residual, 1e-11));
    let j = symmetry_operator(table, sector, cutoff)?;
    let (r, s) = j.intertwining_residual(&set);
    out.push(Check::at_most("intertwining", ratio(r, s), 1e-9));
    let (c, s) = j.commutator_residual(&set);
    out.push(Check::at_most("commutator", ratio(c, s), 1e-9));
    out.push(Check::at_most(
        "j.asymmetry",
        ratio(j.asymmetry(), j.j_real.window_max_abs(j.window())),
        1e-10,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_suite_passes() {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        let checks = algebra_checks(&p, 60, 3).unwrap();
        for c in &checks {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_params(7, 4, (1.0, 3.0), (0.05, 0.45)).unwrap();
        let b = sample_params(7, 4, (1.0, 3.0), (0.05, 0.45)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (1.0..=3.0).contains(&p.delta())));
        assert_ne!(a, sample_params(8, 4, (1.0, 3.0), (0.05, 0.45)).unwrap());
    }

    #[test]
    fn random_oracles_agree() {
        for c in oracle_checks(3, 2).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn symmetry_suite_passes_for_n1() {
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        for c in symmetry_checks(1, &p, Sector::Even, 40).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }
}
