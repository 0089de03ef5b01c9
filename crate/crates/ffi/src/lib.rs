//! C interface to `rabi_sym`.
//!
//! Objects are opaque handles created by `*_new`/`*_solve` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`RabiStatus`]; on failure [`rabi_last_error`] describes the problem.
//! Strings handed to the caller are released with [`rabi_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rabi_sym::spectrum::crossings::crossings_json;
use rabi_sym::spectrum::{detect_crossings, linspace, sweep, BiasMode, CrossingKind, ScanSpec, SpectrumScan};
use rabi_sym::symmetry::coeffs::Element;
use rabi_sym::symmetry::{closed_form_coeffs, solve_recurrence, symmetry_operator, CoeffTable};
use rabi_sym::{Error, ModelParams, Sector};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RabiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidParams = 3,
    CutoffTooSmall = 4,
    NoSolution = 5,
    GaugeAmbiguity = 6,
    EmptyNullspace = 7,
    UnsupportedBias = 8,
    IllConditioned = 9,
    Unconverged = 10,
    UnlabeledScan = 11,
    Numerical = 12,
    Io = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RabiSector {
    Even = 0,
    Odd = 1,
}

impl From<RabiSector> for Sector {
    fn from(s: RabiSector) -> Self {
        match s {
            RabiSector::Even => Sector::Even,
            RabiSector::Odd => Sector::Odd,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RabiElement {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

impl From<RabiElement> for Element {
    fn from(e: RabiElement) -> Self {
        match e {
            RabiElement::A => Element::A,
            RabiElement::B => Element::B,
            RabiElement::C => Element::C,
            RabiElement::D => Element::D,
        }
    }
}

/// Model parameters `delta`, `epsilon`, `g` with `omega = 1`.
pub struct RabiParams(ModelParams);

/// Coefficient table of a symmetry operator.
pub struct RabiCoeffTable(CoeffTable);

/// Spectrum of a coupling sweep.
pub struct RabiScan(SpectrumScan);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RabiStatus {
    match e {
        Error::InvalidParams(_) | Error::BiasMismatch { .. } | Error::NonUnitOmega(_) => RabiStatus::InvalidParams,
        Error::CutoffTooSmall { .. } => RabiStatus::CutoffTooSmall,
        Error::NoSolution { .. } => RabiStatus::NoSolution,
        Error::GaugeAmbiguity { .. } => RabiStatus::GaugeAmbiguity,
        Error::EmptyNullspace { .. } => RabiStatus::EmptyNullspace,
        Error::UnsupportedBias(_) => RabiStatus::UnsupportedBias,
        Error::IllConditioned { .. } | Error::NonPositivePoly { .. } => RabiStatus::IllConditioned,
        Error::Unconverged { .. } => RabiStatus::Unconverged,
        Error::UnlabeledScan => RabiStatus::UnlabeledScan,
        Error::Config(_) => RabiStatus::InvalidArgument,
        Error::Io(_) | Error::Json(_) => RabiStatus::Io,
        Error::DimensionMismatch { .. }
        | Error::SectorViolation { .. }
        | Error::NotSymmetric { .. }
        | Error::Eigensolver(_) => RabiStatus::Numerical,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (RabiStatus, String)>) -> RabiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RabiStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RabiStatus::Panic
        }
    }
}

fn lib(e: Error) -> (RabiStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RabiStatus, String) {
    (RabiStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RabiStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (RabiStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn c_string(s: String) -> Result<*mut c_char, (RabiStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| (RabiStatus::Numerical, "string contains NUL".into()))
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rabi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rabi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates parameters with a fixed bias `epsilon`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_new(delta: f64, epsilon: f64, g: f64, out: *mut *mut RabiParams) -> RabiStatus {
    guard(|| {
        let p = ModelParams::new(delta, epsilon, g).map_err(lib)?;
        put(out, boxed(RabiParams(p)), "out")
    })
}

/// Creates parameters with `epsilon = 2 * ratio * beta`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_with_bias_ratio(
    delta: f64,
    ratio: f64,
    g: f64,
    out: *mut *mut RabiParams,
) -> RabiStatus {
    guard(|| {
        let p = ModelParams::with_bias_ratio(delta, ratio, g).map_err(lib)?;
        put(out, boxed(RabiParams(p)), "out")
    })
}

/// # Safety
/// `p` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_free(p: *mut RabiParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `beta = sqrt(1 - 4 g^2)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_beta(p: *const RabiParams, out: *mut f64) -> RabiStatus {
    guard(|| put(out, deref(p, "params")?.0.beta(), "out"))
}

/// `epsilon / (2 beta)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_bias_ratio(p: *const RabiParams, out: *mut f64) -> RabiStatus {
    guard(|| put(out, deref(p, "params")?.0.bias_ratio(), "out"))
}

/// Solves for the coefficients of `J_N`. The bias of `p` is ignored and
/// set to `2 N beta`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_solve(
    p: *const RabiParams,
    n_bias: u32,
    out: *mut *mut RabiCoeffTable,
) -> RabiStatus {
    guard(|| {
        let sol = solve_recurrence(n_bias, &deref(p, "params")?.0).map_err(lib)?;
        put(out, boxed(RabiCoeffTable(sol.table)), "out")
    })
}

/// Tabulated closed forms, `N <= 3`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_closed_form(
    p: *const RabiParams,
    n_bias: u32,
    out: *mut *mut RabiCoeffTable,
) -> RabiStatus {
    guard(|| {
        let t = closed_form_coeffs(n_bias, &deref(p, "params")?.0).map_err(lib)?;
        put(out, boxed(RabiCoeffTable(t)), "out")
    })
}

/// # Safety
/// `t` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_free(t: *mut RabiCoeffTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_n_bias(t: *const RabiCoeffTable, out: *mut u32) -> RabiStatus {
    guard(|| put(out, deref(t, "table")?.0.n_bias, "out"))
}

/// Coefficient of `(a_+^dag)^n (a_-)^m` in the given block. Indices off
/// the lattice `n + m <= 2N`, `n + m` even, are rejected.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_get(
    t: *const RabiCoeffTable,
    elem: RabiElement,
    n: u32,
    m: u32,
    out: *mut f64,
) -> RabiStatus {
    guard(|| {
        let t = &deref(t, "table")?.0;
        if !(n + m).is_multiple_of(2) || n + m > 2 * t.n_bias {
            return Err((RabiStatus::InvalidArgument, format!("({n}, {m}) is off the lattice")));
        }
        put(out, t.get(elem.into(), n, m), "out")
    })
}

/// Largest entrywise `|x - y| / max(|y|, 1)` against `reference`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_max_relative_error(
    t: *const RabiCoeffTable,
    reference: *const RabiCoeffTable,
    out: *mut f64,
) -> RabiStatus {
    guard(|| {
        let a = &deref(t, "table")?.0;
        let b = &deref(reference, "reference")?.0;
        if a.n_bias != b.n_bias {
            return Err((RabiStatus::InvalidArgument, "tables have different N".into()));
        }
        put(out, a.max_relative_error(b), "out")
    })
}

/// JSON serialization; free with [`rabi_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_to_json(t: *const RabiCoeffTable, out: *mut *mut c_char) -> RabiStatus {
    guard(|| {
        let s = c_string(deref(t, "table")?.0.to_json())?;
        put(out, s, "out")
    })
}

/// Parses a table produced by [`rabi_coeffs_to_json`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_from_json(json: *const c_char, out: *mut *mut RabiCoeffTable) -> RabiStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (RabiStatus::InvalidArgument, "json is not UTF-8".into()))?;
        let t = CoeffTable::from_json(text).map_err(lib)?;
        put(out, boxed(RabiCoeffTable(t)), "out")
    })
}

/// Relative commutator `||[J, H]|| / (||J|| ||H||)` on the truncation
/// window at `cutoff` sector states.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_coeffs_commutator_residual(
    t: *const RabiCoeffTable,
    sector: RabiSector,
    cutoff: usize,
    out: *mut f64,
) -> RabiStatus {
    guard(|| {
        let t = &deref(t, "table")?.0;
        let sector = Sector::from(sector);
        let set = rabi_sym::model::build_h0(&t.params, sector, cutoff).map_err(lib)?;
        let j = symmetry_operator(t, sector, cutoff).map_err(lib)?;
        let (c, s) = j.commutator_residual(&set);
        put(out, if s > 0.0 { c / s } else { c }, "out")
    })
}

/// Sweeps `g` over `steps` evenly spaced points of `[g_min, g_max]` with the
/// bias held at `epsilon = 2 * bias_ratio * beta(g)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn rabi_scan_new(
    delta: f64,
    bias_ratio: f64,
    sector: RabiSector,
    cutoff: usize,
    n_levels: usize,
    g_min: f64,
    g_max: f64,
    steps: usize,
    out: *mut *mut RabiScan,
) -> RabiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if steps < 3 || !(g_min < g_max) {
            return Err((RabiStatus::InvalidArgument, "need steps >= 3 and g_min < g_max".into()));
        }
        let spec = ScanSpec {
            delta,
            bias: BiasMode::Ratio(bias_ratio),
            sector: sector.into(),
            cutoff,
            n_levels,
        };
        let scan = sweep(&spec, &linspace(g_min, g_max, steps)).map_err(lib)?;
        put(out, boxed(RabiScan(scan)), "out")
    })
}

/// # Safety
/// `s` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rabi_scan_free(s: *mut RabiScan) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of grid points and levels per point.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_scan_shape(s: *const RabiScan, points: *mut usize, levels: *mut usize) -> RabiStatus {
    guard(|| {
        let s = &deref(s, "scan")?.0;
        put(points, s.g_grid.len(), "points")?;
        put(levels, s.n_levels(), "levels")
    })
}

/// Coupling, rescaled energy `(E + 1/2) / beta` and parity (`1`, `-1`, or
/// `0` when unlabeled) of one level at one grid point.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_scan_level(
    s: *const RabiScan,
    point: usize,
    level: usize,
    g: *mut f64,
    energy: *mut f64,
    parity: *mut i8,
) -> RabiStatus {
    guard(|| {
        let s = &deref(s, "scan")?.0;
        if point >= s.g_grid.len() || level >= s.n_levels() {
            return Err((RabiStatus::InvalidArgument, format!("index ({point}, {level}) out of range")));
        }
        put(g, s.g_grid[point], "g")?;
        put(energy, s.levels[point][level], "energy")?;
        put(parity, s.labels[point][level].value(), "parity")
    })
}

/// CSV serialization; free with [`rabi_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabi_scan_to_csv(s: *const RabiScan, out: *mut *mut c_char) -> RabiStatus {
    guard(|| {
        let csv = c_string(deref(s, "scan")?.0.to_csv())?;
        put(out, csv, "out")
    })
}

/// Detects crossings. Writes the JSON list to `json` (free with
/// [`rabi_string_free`]; may be null to skip) and the number of true
/// crossings to `n_true` (may be null).
///
/// # Safety
/// `s` must be valid; output pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn rabi_scan_crossings(s: *const RabiScan, json: *mut *mut c_char, n_true: *mut usize) -> RabiStatus {
    guard(|| {
        let events = detect_crossings(&deref(s, "scan")?.0).map_err(lib)?;
        if !n_true.is_null() {
            n_true.write(events.iter().filter(|e| e.kind == CrossingKind::True).count());
        }
        if !json.is_null() {
            json.write(c_string(crossings_json(&events))?);
        }
        Ok(())
    })
}
