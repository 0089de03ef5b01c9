//! Command-line front end.

pub mod config;
pub mod plot;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::checks::{algebra_checks, oracle_checks, symmetry_checks, Check};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectrum::{detect_crossings, linspace, sweep, CrossingKind, ScanSpec, SpectrumScan};
use crate::spectrum::crossings::crossings_json;
use crate::symmetry::jsquare::{j1_square_analytic, DEFAULT_FIT_STATES};
use crate::symmetry::operator::check_cutoff;
use crate::symmetry::{
    closed_form_coeffs, jsquare_poly, jsquare_setup, solve_recurrence, solve_recurrence_at_ratio,
};
pub use config::{ConfigLayer, RunConfig};

/// Randomized parameter sets drawn from `--seed` by `verify`.
pub const VERIFY_RANDOM_SETS: usize = 3;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "RABI_SYM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rabi-sym", version, about = "Hidden symmetries of the biased two-photon Rabi model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: ConfigLayer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sweep g, write spectrum.csv, spectrum.svg and crossings.json
    Spectrum,
    /// Solve for the coefficients of J_N and compare with closed forms
    Coeffs,
    /// Run the invariant checks and write verify.json
    Verify,
    /// Fit J^2 as a polynomial in H and write jsquare_N.json
    Jsquare,
    /// Sweep g and write crossings.json only
    Crossings,
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 when every requested check passes, 1 when a check fails, 2 on errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    let result = RunConfig::resolve(&cli.options).and_then(|cfg| execute(cli.command, &cfg));
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            2
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<bool> {
    std::fs::create_dir_all(&cfg.out)?;
    match command {
        Command::Spectrum => cmd_spectrum(cfg, true),
        Command::Crossings => cmd_spectrum(cfg, false),
        Command::Coeffs => cmd_coeffs(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Jsquare => cmd_jsquare(cfg),
    }
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_atomic(path, &s)
}

fn out(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

fn params_json(p: &ModelParams) -> Value {
    json!({"delta": p.delta(), "epsilon": p.epsilon(), "g": p.g(), "beta": p.beta()})
}

fn checks_json(checks: &[Check]) -> Value {
    serde_json::to_value(checks).expect("checks serialize")
}

fn diagnostic(e: &Error) -> Value {
    let mut v = json!({"error": e.kind(), "message": e.to_string()});
    match e {
        Error::NoSolution { residual } => v["residual"] = json!(residual),
        Error::GaugeAmbiguity { extra_dims, .. } => v["extra_dims"] = json!(extra_dims),
        Error::EmptyNullspace { smallest } => v["smallest_singular_value"] = json!(smallest),
        Error::IllConditioned { condition } => v["condition"] = json!(condition),
        _ => {}
    }
    v
}

fn require_integer_bias(cfg: &RunConfig) -> Result<u32> {
    cfg.n_bias()?.ok_or_else(|| {
        Error::Config(format!(
            "this command needs an integer bias ratio, got {}",
            cfg.ratio().unwrap_or(f64::NAN)
        ))
    })
}

pub fn run_scan(cfg: &RunConfig) -> Result<SpectrumScan> {
    let spec = ScanSpec {
        delta: cfg.delta,
        bias: cfg.bias,
        sector: cfg.sector,
        cutoff: cfg.cutoff,
        n_levels: cfg.levels,
    };
    sweep(&spec, &linspace(cfg.g_min, cfg.g_max, cfg.g_steps))
}

fn cmd_spectrum(cfg: &RunConfig, full: bool) -> Result<bool> {
    let scan = run_scan(cfg)?;
    if full {
        write_atomic(&out(cfg, "spectrum.csv"), &scan.to_csv())?;
        write_atomic(&out(cfg, "spectrum.svg"), &plot::spectrum_svg(&scan))?;
    }
    let events = detect_crossings(&scan)?;
    write_atomic(&out(cfg, "crossings.json"), &crossings_json(&events))?;
    let n_true = events.iter().filter(|e| e.kind == CrossingKind::True).count();
    println!(
        "{} grid points, {} levels, {} crossings ({} true)",
        scan.g_grid.len(),
        scan.n_levels(),
        events.len(),
        n_true
    );
    Ok(true)
}

fn cmd_coeffs(cfg: &RunConfig) -> Result<bool> {
    let params = cfg.params()?;
    let Some(n) = cfg.n_bias()? else {
        let err = match solve_recurrence_at_ratio(cfg.ratio()?, &params) {
            Err(e) => e,
            Ok(sol) => Error::Config(format!(
                "unexpected solution at non-integer bias (residual {:e})",
                sol.residual
            )),
        };
        write_json(&out(cfg, "coeffs_diagnostic.json"), &diagnostic(&err))?;
        eprintln!("no symmetry operator: {err}");
        return Ok(false);
    };
    let sol = match solve_recurrence(n, &params) {
        Ok(s) => s,
        Err(e @ (Error::NoSolution { .. } | Error::GaugeAmbiguity { .. })) => {
            if let Error::GaugeAmbiguity { representative, .. } = &e {
                write_atomic(&out(cfg, &format!("coeffs_{n}.json")), &representative.to_json())?;
            }
            write_json(&out(cfg, "coeffs_diagnostic.json"), &diagnostic(&e))?;
            eprintln!("{e}");
            return Ok(false);
        }
        Err(e) => return Err(e),
    };
    write_atomic(&out(cfg, &format!("coeffs_{n}.json")), &sol.table.to_json())?;
    println!("N = {n}: residual {:.3e}", sol.residual);
    if n > 3 {
        return Ok(true);
    }
    let closed = closed_form_coeffs(n, &params)?;
    write_atomic(&out(cfg, &format!("coeffs_{n}_closed.json")), &closed.to_json())?;
    let err = sol.table.max_relative_error(&closed);
    let tol = 1e-10;
    let pass = err <= tol;
    write_json(
        &out(cfg, &format!("coeffs_{n}_diff.json")),
        &json!({"N": n, "max_relative_error": err, "tolerance": tol, "pass": pass}),
    )?;
    println!("closed-form max relative error {err:.3e} ({})", if pass { "pass" } else { "FAIL" });
    Ok(pass)
}

fn cmd_verify(cfg: &RunConfig) -> Result<bool> {
    let n = require_integer_bias(cfg)?;
    check_cutoff(n, cfg.cutoff)?;
    let params = cfg.params()?;
    let mut checks = algebra_checks(&params, 2 * cfg.cutoff, n.max(1))?;
    checks.extend(symmetry_checks(n, &params, cfg.sector, cfg.cutoff)?);
    checks.extend(oracle_checks(cfg.seed, VERIFY_RANDOM_SETS)?);
    let pass = checks.iter().all(|c| c.pass);
    write_json(
        &out(cfg, "verify.json"),
        &json!({
            "N": n,
            "sector": cfg.sector.to_string(),
            "cutoff": cfg.cutoff,
            "seed": cfg.seed,
            "params": params_json(&params),
            "pass": pass,
            "checks": checks_json(&checks),
        }),
    )?;
    for c in checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: {:e} > {:e}", c.name, c.value, c.tolerance);
    }
    println!(
        "{}/{} checks pass",
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    Ok(pass)
}

fn cmd_jsquare(cfg: &RunConfig) -> Result<bool> {
    let n = require_integer_bias(cfg)?;
    check_cutoff(n, cfg.cutoff)?;
    let params = cfg.params()?;
    let setup = jsquare_setup(n, &params, cfg.sector, cfg.cutoff, DEFAULT_FIT_STATES)?;
    let degree = 2 * n as usize;
    let poly = jsquare_poly(&setup.samples, n, degree)?;
    let tol = 1e-8;
    let mut pass = poly.residual <= tol && setup.samples.off_diagonal <= tol;
    let mut doc = json!({
        "N": n,
        "sector": cfg.sector.to_string(),
        "params": params_json(&params),
        "states": setup.samples.energies.len(),
        "degree": degree,
        "y": poly.coeffs,
        "residual": poly.residual,
        "off_diagonal": setup.samples.off_diagonal,
        "tolerance": tol,
    });
    if n >= 1 {
        let lower = jsquare_poly(&setup.samples, n, degree - 1)?;
        pass &= lower.residual > 1e-3;
        doc["lower_degree"] = json!({"degree": degree - 1, "residual": lower.residual, "minimum": 1e-3});
    }
    if n == 1 {
        let analytic = j1_square_analytic(&params);
        let errors: Vec<f64> = poly.coeffs.iter().zip(analytic).map(|(a, b)| (a - b).abs()).collect();
        pass &= errors.iter().all(|&e| e <= tol);
        doc["analytic"] = json!({"y": analytic, "abs_error": errors});
    }
    doc["pass"] = json!(pass);
    write_json(&out(cfg, &format!("jsquare_{n}.json")), &doc)?;
    println!(
        "N = {n}: degree {degree} residual {:.3e} ({})",
        poly.residual,
        if pass { "pass" } else { "FAIL" }
    );
    Ok(pass)
}
