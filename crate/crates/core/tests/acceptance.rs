//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::Instant;

use rabi_sym::checks::{algebra_checks, sample_params};
use rabi_sym::fock::{z4_phase, BlockOp, BosonOp};
use rabi_sym::model::build_h0;
use rabi_sym::spectrum::eigen::{converged_levels, lab_levels};
use rabi_sym::spectrum::{detect_crossings, linspace, sweep, BiasMode, CrossingKind, ScanSpec};
use rabi_sym::symmetry::coeffs::Element;
use rabi_sym::symmetry::jsquare::{j1_square_analytic, DEFAULT_FIT_STATES};
use rabi_sym::symmetry::operator::min_cutoff;
use rabi_sym::symmetry::{
    closed_form_coeffs, jsquare_poly, jsquare_setup, nullspace_symmetry, solve_recurrence,
    symmetry_operator, Parity,
};
use rabi_sym::{Error, ModelParams, Sector};

const CUTOFF: usize = 300;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: Error) -> String {
    format!("{} ({})", err, err.kind())
}

fn at_bias(p: &ModelParams, n: u32) -> ModelParams {
    p.with_epsilon(2.0 * n as f64 * p.beta())
}

fn parity_recovery() -> Outcome {
    let p = ModelParams::new(1.0, 0.0, 0.3).map_err(e)?;
    let mut worst_sq: f64 = 0.0;
    let mut worst_form: f64 = 0.0;
    for sector in Sector::both() {
        let table = solve_recurrence(0, &p).map_err(e)?.table;
        let j = symmetry_operator(&table, sector, CUTOFF).map_err(e)?;
        let z = z4_phase(sector, CUTOFF);
        let zero = BosonOp::zeros(z.diag.basis());
        let expect = BlockOp::from_blocks(zero.clone(), z.diag.clone(), z.diag.clone(), zero).map_err(e)?;
        worst_form = worst_form.max((&j.j_real - &expect).max_abs());
        let id = BlockOp::from_blocks(
            BosonOp::identity(z.diag.basis()),
            BosonOp::zeros(z.diag.basis()),
            BosonOp::zeros(z.diag.basis()),
            BosonOp::identity(z.diag.basis()),
        )
        .map_err(e)?;
        worst_sq = worst_sq.max((&(&j.j_real * &j.j_real) - &id).max_abs());
    }
    ensure(worst_form <= 1e-12, format!("J0 differs from the parity operator by {worst_form:e}"))?;
    ensure(worst_sq <= 1e-12, format!("max |J0^2 - I| = {worst_sq:e}"))?;

    let spec = ScanSpec {
        delta: 2.0,
        bias: BiasMode::Ratio(0.0),
        sector: Sector::Even,
        cutoff: CUTOFF,
        n_levels: 6,
    };
    let scan = sweep(&spec, &linspace(0.05, 0.45, 400)).map_err(e)?;
    let both = scan.labels.iter().flatten().any(|&l| l == Parity::Positive)
        && scan.labels.iter().flatten().any(|&l| l == Parity::Negative);
    ensure(both, "epsilon = 0 scan does not show both parities")?;
    let events = detect_crossings(&scan).map_err(e)?;
    let n_true = events.iter().filter(|c| c.kind == CrossingKind::True).count();
    ensure(n_true >= 1, "no true crossing at epsilon = 0")?;
    check_opposite(&spec, &events)?;
    Ok(format!(
        "max |J0^2 - I| = {worst_sq:.1e}, |J0 - parity| = {worst_form:.1e}, {n_true} opposite-parity crossings"
    ))
}

/// Relabels each true crossing at its refined coupling.
fn check_opposite(spec: &ScanSpec, events: &[rabi_sym::spectrum::CrossingEvent]) -> Result<(), String> {
    for c in events.iter().filter(|c| c.kind == CrossingKind::True) {
        let (_, labels) = spec.solve_point(c.g_star).map_err(e)?;
        let (a, b) = (labels[c.pair.0], labels[c.pair.1]);
        ensure(
            a.is_labeled() && b.is_labeled() && a != b,
            format!("crossing {:?} at g = {} has labels {a} and {b}", c.pair, c.g_star),
        )?;
    }
    Ok(())
}

fn closed_form_oracle() -> Outcome {
    let sets = sample_params(2, 20, (0.2, 3.0), (0.05, 0.45)).map_err(e)?;
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for p in &sets {
        for n in 1..=3 {
            let table = solve_recurrence(n, p).map_err(e)?.table;
            let closed = closed_form_coeffs(n, &table.params).map_err(e)?;
            worst = worst.max(table.max_relative_error(&closed));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-10, format!("max relative error {worst:e}"))?;
    ensure(secs < 1.0, format!("took {secs:.2} s"))?;
    Ok(format!("max relative error {worst:.1e} over 60 tables in {secs:.3} s"))
}

fn nullspace_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in &sample_params(3, 5, (0.2, 3.0), (0.05, 0.45)).map_err(e)? {
        for n in 1..=3 {
            let q = at_bias(p, n);
            let rec = solve_recurrence(n, &q).map_err(e)?.table;
            let ns = nullspace_symmetry(n, &q, Sector::Even, min_cutoff(n) + 4).map_err(e)?;
            worst = worst.max(ns.table.max_relative_error(&rec));
        }
    }
    ensure(worst <= 1e-8, format!("max relative error {worst:e}"))?;
    let p = ModelParams::new(1.0, 0.0, 0.3).map_err(e)?;
    let mut smallest = Vec::new();
    for r in [0.5, 1.5] {
        let q = p.with_epsilon(2.0 * r * p.beta());
        let n = r.ceil() as u32;
        match nullspace_symmetry(n, &q, Sector::Even, min_cutoff(n) + 4) {
            Err(Error::EmptyNullspace { smallest: s }) => smallest.push(s),
            Ok(_) => return Err(format!("ratio {r}: nullspace not empty")),
            Err(other) => return Err(e(other)),
        }
    }
    Ok(format!(
        "max relative error {worst:.1e}; ratio 0.5, 1.5 empty (smallest singular values {:.1e}, {:.1e})",
        smallest[0], smallest[1]
    ))
}

fn commutation() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in &sample_params(4, 5, (0.2, 3.0), (0.05, 0.45)).map_err(e)? {
        for n in 0..=3 {
            let q = at_bias(p, n);
            let table = solve_recurrence(n, &q).map_err(e)?.table;
            for sector in Sector::both() {
                let set = build_h0(&q, sector, CUTOFF).map_err(e)?;
                let j = symmetry_operator(&table, sector, CUTOFF).map_err(e)?;
                let (c, scale) = j.commutator_residual(&set);
                worst = worst.max(c / scale);
            }
        }
    }
    ensure(worst <= 1e-9, format!("max relative commutator {worst:e}"))?;
    Ok(format!("max ||[J,H]|| / (||J|| ||H||) = {worst:.1e}"))
}

fn jsquare() -> Outcome {
    let mut sets = vec![ModelParams::new(1.0, 0.0, 0.3).map_err(e)?];
    sets.extend(sample_params(5, 5, (0.2, 3.0), (0.05, 0.45)).map_err(e)?);
    let mut worst: f64 = 0.0;
    for p in &sets {
        let setup = jsquare_setup(1, p, Sector::Even, CUTOFF, DEFAULT_FIT_STATES).map_err(e)?;
        let poly = jsquare_poly(&setup.samples, 1, 2).map_err(e)?;
        let analytic = j1_square_analytic(&at_bias(p, 1));
        for (y, a) in poly.coeffs.iter().zip(analytic) {
            worst = worst.max((y - a).abs());
        }
    }
    ensure(worst <= 1e-8, format!("N = 1 fit vs analytic {worst:e}"))?;
    let p = ModelParams::new(1.0, 0.0, 0.3).map_err(e)?;
    let mut notes = Vec::new();
    for n in [2, 3] {
        let setup = jsquare_setup(n, &p, Sector::Even, CUTOFF, DEFAULT_FIT_STATES).map_err(e)?;
        let d = 2 * n as usize;
        let fit = jsquare_poly(&setup.samples, n, d).map_err(e)?;
        let lower = jsquare_poly(&setup.samples, n, d - 1).map_err(e)?;
        ensure(fit.residual <= 1e-8, format!("N = {n} degree {d} residual {:e}", fit.residual))?;
        ensure(lower.residual > 1e-3, format!("N = {n} degree {} residual {:e}", d - 1, lower.residual))?;
        notes.push(format!("N={n}: {:.1e} / {:.1e}", fit.residual, lower.residual));
    }
    Ok(format!("N = 1 max abs error {worst:.1e}; {}", notes.join(", ")))
}

fn crossing_phenomenology() -> Outcome {
    let deltas = sample_params(6, 3, (1.0, 3.0), (0.05, 0.45))
        .map_err(e)?
        .iter()
        .map(|p| p.delta())
        .collect::<Vec<_>>();
    let grid = linspace(0.05, 0.48, 400);
    let mut counts = Vec::new();
    for ratio in [1.0, 2.0] {
        for &delta in &deltas {
            let spec = ScanSpec {
                delta,
                bias: BiasMode::Ratio(ratio),
                sector: Sector::Even,
                cutoff: CUTOFF,
                n_levels: 6,
            };
            let scan = sweep(&spec, &grid).map_err(e)?;
            let events = detect_crossings(&scan).map_err(e)?;
            let trues: Vec<_> = events.iter().filter(|c| c.kind == CrossingKind::True).collect();
            ensure(
                !trues.is_empty(),
                format!("ratio {ratio}, delta {delta:.3}: no true crossing"),
            )?;
            ensure(
                trues.iter().all(|c| c.min_gap < 1e-6),
                format!("ratio {ratio}, delta {delta:.3}: true crossing gap too large"),
            )?;
            check_opposite(&spec, &events)?;
            counts.push(trues.len());
        }
    }
    let mut min_gap = f64::INFINITY;
    for &delta in &deltas {
        let spec = ScanSpec {
            delta,
            bias: BiasMode::Ratio(0.5),
            sector: Sector::Even,
            cutoff: CUTOFF,
            n_levels: 6,
        };
        let scan = sweep(&spec, &grid).map_err(e)?;
        let events = detect_crossings(&scan).map_err(e)?;
        ensure(
            events.iter().all(|c| c.kind == CrossingKind::Avoided),
            format!("ratio 0.5, delta {delta:.3}: true crossing"),
        )?;
        min_gap = events.iter().map(|c| c.min_gap).fold(min_gap, f64::min);
    }
    ensure(min_gap > 1e-3, format!("ratio 0.5 gap minimum {min_gap:e}"))?;
    Ok(format!(
        "true crossings per scan (ratio 1, 2) {counts:?}; ratio 0.5 smallest gap minimum {min_gap:.3}"
    ))
}

fn frame_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let sets = sample_params(7, 5, (0.2, 3.0), (0.05, 0.45)).map_err(e)?;
    for (i, p) in sets.iter().enumerate() {
        let p = p.with_epsilon(0.4 * i as f64);
        for sector in Sector::both() {
            let t = converged_levels(&p, sector, CUTOFF, 10).map_err(e)?;
            ensure(t.len() == 10, format!("only {} converged levels", t.len()))?;
            let lab = lab_levels(&p, sector, CUTOFF, 10).map_err(e)?;
            for (a, b) in t.iter().zip(&lab) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure(worst <= 1e-10, format!("max level difference {worst:e}"))?;
    Ok(format!("max level difference {worst:.1e}"))
}

fn algebra() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in &sample_params(8, 3, (0.2, 3.0), (0.05, 0.45)).map_err(e)? {
        for c in algebra_checks(p, 2 * CUTOFF, 4).map_err(e)? {
            ensure(c.pass, format!("{} = {:e}", c.name, c.value))?;
            worst = worst.max(c.value);
            count += 1;
        }
    }
    Ok(format!("{count} relations, worst relative residual {worst:.1e}"))
}

fn ad_emergence() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in &sample_params(9, 5, (0.2, 3.0), (0.05, 0.45)).map_err(e)? {
        for n in [2, 3] {
            let table = solve_recurrence(n, p).map_err(e)?.table;
            for k in 0..=2 * n {
                for el in [Element::A, Element::D] {
                    worst = worst.max(table.get(el, k, 2 * n - k).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-10, format!("max top-tier |A|, |D| = {worst:e}"))?;
    Ok(format!("max top-tier |A|, |D| = {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("parity recovery (N = 0)", parity_recovery),
        ("closed-form oracle", closed_form_oracle),
        ("nullspace oracle", nullspace_oracle),
        ("commutation", commutation),
        ("J^2 polynomial", jsquare),
        ("crossing phenomenology", crossing_phenomenology),
        ("frame equivalence", frame_equivalence),
        ("algebra relations", algebra),
        ("top-tier A/D emergence", ad_emergence),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} PASS  {name}: {msg} [{secs:.1} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {msg} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
