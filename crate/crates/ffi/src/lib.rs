//! C ABI over the stochos kernels.
//!
//! Every fallible call returns a `StochosStatus`; `STOCHOS_STATUS_OK` is zero
//! so the codes double as process exit codes, and the assertion/config values
//! match the CLI (1 and 2). On failure a human-readable message is stored in
//! thread-local storage and can be copied out with `stochos_last_error`.
//! Handles returned through out-pointers are owned by the caller and must be
//! released with the matching `_free` function; all other out-parameters are
//! plain value writes. No function keeps references to caller memory after it
//! returns.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use stochos::dirac::{dispersion_frequency, TelegraphState};
use stochos::gauge::SuNAlgebra;
use stochos::harness::{run, ConfigMap, Subcommand};
use stochos::network::{foam_amplitude, read_foam_json, FoamStrategy};
use stochos::numerics::{Boundary, Grid1D};
use stochos::schrodinger::free_packet_variance;
use stochos::Error;

/// Status codes for every fallible entry point. Zero is success; 1 and 2
/// match the CLI exit codes for failed assertions and bad configuration, and
/// the remaining library error variants get one code each.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochosStatus {
    Ok = 0,
    Assertion = 1,
    Config = 2,
    Io = 3,
    Json = 4,
    Dimension = 5,
    Numeric = 6,
    Domain = 7,
    Stability = 8,
    DegenerateState = 9,
    Capacity = 10,
    /// A required pointer argument was null.
    NullPointer = 11,
    /// A string argument was not valid UTF-8 or named an unknown option.
    InvalidArgument = 12,
    /// An internal invariant failed; the library state is still consistent.
    Panic = 13,
}

/// su(N) structure constant table behind an opaque handle.
pub struct StochosAlgebra(SuNAlgebra);

/// Two-component telegraph density on a periodic grid behind an opaque handle.
pub struct StochosTelegraph(TelegraphState);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(clean).unwrap());
}

fn fail(status: StochosStatus, msg: &str) -> StochosStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> StochosStatus {
    match err {
        Error::Dimension(_) => StochosStatus::Dimension,
        Error::Numeric(_) => StochosStatus::Numeric,
        Error::Domain(_) => StochosStatus::Domain,
        Error::Config(_) => StochosStatus::Config,
        Error::Stability(_) => StochosStatus::Stability,
        Error::DegenerateState(_) => StochosStatus::DegenerateState,
        Error::Capacity(_) => StochosStatus::Capacity,
        Error::Assertion(_) => StochosStatus::Assertion,
        Error::Io(_) => StochosStatus::Io,
        Error::Json(_) => StochosStatus::Json,
    }
}

fn report(err: Error) -> StochosStatus {
    fail(status_of(&err), &err.to_string())
}

fn guarded(f: impl FnOnce() -> StochosStatus) -> StochosStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(StochosStatus::Panic, "internal panic"),
    }
}

/// Reads a required UTF-8 C string argument.
///
/// # Safety
/// `ptr`, when non-null, must point at a NUL-terminated string.
unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, StochosStatus> {
    if ptr.is_null() {
        return Err(fail(StochosStatus::NullPointer, &format!("{what} is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        fail(
            StochosStatus::InvalidArgument,
            &format!("{what} is not valid UTF-8"),
        )
    })
}

/// Library version as a static NUL-terminated string; never null, never freed.
#[no_mangle]
pub extern "C" fn stochos_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the message of the most recent failure on this thread into `buf`
/// (always NUL-terminated when `capacity > 0`) and returns the full message
/// length including the terminator. A return value larger than `capacity`
/// means the copy was truncated. `buf` may be null to query the length.
///
/// # Safety
/// `buf`, when non-null, must point at `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn stochos_last_error(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Executes one named run (`nelson`, `telegraph`, `checkerboard`, `rs-photon`,
/// `rs-field`, `network`, `foam`, or `all`) and writes its artifacts under
/// `out_dir/<name>/<config hash>/`. `config_text` uses the same `key = value`
/// line format as the CLI config files and may be null for defaults. Returns
/// `STOCHOS_STATUS_ASSERTION` when the run completes but a check fails.
///
/// # Safety
/// `subcommand` and `out_dir` must be NUL-terminated strings; `config_text`
/// may be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn stochos_run(
    subcommand: *const c_char,
    config_text: *const c_char,
    out_dir: *const c_char,
) -> StochosStatus {
    let name = match text(subcommand, "subcommand") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let Some(sub) = Subcommand::parse(name) else {
        return fail(
            StochosStatus::InvalidArgument,
            &format!("unknown subcommand '{name}'"),
        );
    };
    let cfg = if config_text.is_null() {
        ConfigMap::empty()
    } else {
        match text(config_text, "config_text").map(ConfigMap::parse) {
            Ok(Ok(cfg)) => cfg,
            Ok(Err(err)) => return report(err),
            Err(status) => return status,
        }
    };
    let out = match text(out_dir, "out_dir") {
        Ok(s) => Path::new(s),
        Err(status) => return status,
    };
    guarded(|| match run(sub, &cfg, out) {
        Ok(manifest) if manifest.passed => StochosStatus::Ok,
        Ok(manifest) => {
            let failed: Vec<&str> = manifest
                .assertions
                .iter()
                .filter(|a| !a.passed)
                .map(|a| a.name.as_str())
                .collect();
            fail(
                StochosStatus::Assertion,
                &format!("assertions failed: {}", failed.join(", ")),
            )
        }
        Err(err) => report(err),
    })
}

/// Builds the su(N) structure constant table for `n >= 2`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that the
/// caller must release with `stochos_algebra_free`.
#[no_mangle]
pub unsafe extern "C" fn stochos_algebra_new(
    n: usize,
    out: *mut *mut StochosAlgebra,
) -> StochosStatus {
    if out.is_null() {
        return fail(StochosStatus::NullPointer, "out is null");
    }
    guarded(|| match SuNAlgebra::new(n) {
        Ok(algebra) => {
            *out = Box::into_raw(Box::new(StochosAlgebra(algebra)));
            StochosStatus::Ok
        }
        Err(err) => report(err),
    })
}

/// Releases a handle from `stochos_algebra_new`. Null is ignored.
///
/// # Safety
/// `algebra` must be null or a handle not already freed.
#[no_mangle]
pub unsafe extern "C" fn stochos_algebra_free(algebra: *mut StochosAlgebra) {
    if !algebra.is_null() {
        drop(Box::from_raw(algebra));
    }
}

/// Adjoint dimension N^2 - 1, the valid index range for the structure
/// constants. Returns 0 for a null handle.
///
/// # Safety
/// `algebra` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochos_algebra_dim(algebra: *const StochosAlgebra) -> usize {
    algebra.as_ref().map_or(0, |a| a.0.dim())
}

/// Writes f^{abc} to `out`. Indices are zero-based and must be below the
/// adjoint dimension.
///
/// # Safety
/// `algebra` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stochos_algebra_structure_constant(
    algebra: *const StochosAlgebra,
    a: usize,
    b: usize,
    c: usize,
    out: *mut f64,
) -> StochosStatus {
    let Some(handle) = algebra.as_ref() else {
        return fail(StochosStatus::NullPointer, "algebra is null");
    };
    if out.is_null() {
        return fail(StochosStatus::NullPointer, "out is null");
    }
    let dim = handle.0.dim();
    if a >= dim || b >= dim || c >= dim {
        return fail(
            StochosStatus::Domain,
            &format!("indices ({a}, {b}, {c}) exceed adjoint dimension {dim}"),
        );
    }
    *out = handle.0.f(a, b, c);
    StochosStatus::Ok
}

/// Builds a telegraph state on a periodic grid over `[x_min, x_max)` with
/// `n_points` cells from the two direction densities.
///
/// # Safety
/// `p_plus` and `p_minus` must point at `n_points` readable doubles and `out`
/// must be a valid pointer; on success it receives a handle that the caller
/// must release with `stochos_telegraph_free`.
#[no_mangle]
pub unsafe extern "C" fn stochos_telegraph_new(
    x_min: f64,
    x_max: f64,
    n_points: usize,
    speed: f64,
    rate: f64,
    p_plus: *const f64,
    p_minus: *const f64,
    out: *mut *mut StochosTelegraph,
) -> StochosStatus {
    if p_plus.is_null() || p_minus.is_null() || out.is_null() {
        return fail(
            StochosStatus::NullPointer,
            "p_plus, p_minus, out must be non-null",
        );
    }
    let plus = std::slice::from_raw_parts(p_plus, n_points).to_vec();
    let minus = std::slice::from_raw_parts(p_minus, n_points).to_vec();
    guarded(|| {
        let grid = match Grid1D::new(x_min, x_max, n_points, Boundary::Periodic) {
            Ok(grid) => grid,
            Err(err) => return report(err),
        };
        match TelegraphState::new(grid, plus.clone(), minus.clone(), speed, rate) {
            Ok(state) => {
                *out = Box::into_raw(Box::new(StochosTelegraph(state)));
                StochosStatus::Ok
            }
            Err(err) => report(err),
        }
    })
}

/// Releases a handle from `stochos_telegraph_new`. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not already freed.
#[no_mangle]
pub unsafe extern "C" fn stochos_telegraph_free(state: *mut StochosTelegraph) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of grid cells in each direction density. Returns 0 for a null
/// handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochos_telegraph_len(state: *const StochosTelegraph) -> usize {
    state.as_ref().map_or(0, |s| s.0.grid().len())
}

/// Advances the densities by one explicit step of size `dt > 0` (upwind
/// transport plus direction exchange).
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochos_telegraph_step(
    state: *mut StochosTelegraph,
    dt: f64,
) -> StochosStatus {
    let Some(handle) = state.as_mut() else {
        return fail(StochosStatus::NullPointer, "state is null");
    };
    guarded(|| match handle.0.step(dt) {
        Ok(()) => StochosStatus::Ok,
        Err(err) => report(err),
    })
}

/// Writes the integral of both densities to `out`.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stochos_telegraph_total_probability(
    state: *const StochosTelegraph,
    out: *mut f64,
) -> StochosStatus {
    let Some(handle) = state.as_ref() else {
        return fail(StochosStatus::NullPointer, "state is null");
    };
    if out.is_null() {
        return fail(StochosStatus::NullPointer, "out is null");
    }
    *out = handle.0.total_probability();
    StochosStatus::Ok
}

/// Copies both direction densities into caller buffers of `capacity` doubles
/// each; `capacity` must be at least `stochos_telegraph_len`.
///
/// # Safety
/// `state` must be a live handle; `p_plus` and `p_minus` must point at
/// `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn stochos_telegraph_copy_densities(
    state: *const StochosTelegraph,
    p_plus: *mut f64,
    p_minus: *mut f64,
    capacity: usize,
) -> StochosStatus {
    let Some(handle) = state.as_ref() else {
        return fail(StochosStatus::NullPointer, "state is null");
    };
    if p_plus.is_null() || p_minus.is_null() {
        return fail(
            StochosStatus::NullPointer,
            "p_plus and p_minus must be non-null",
        );
    }
    let n = handle.0.grid().len();
    if capacity < n {
        return fail(
            StochosStatus::Dimension,
            &format!("capacity {capacity} is below the {n} grid cells"),
        );
    }
    std::ptr::copy_nonoverlapping(handle.0.p_plus().as_ptr(), p_plus, n);
    std::ptr::copy_nonoverlapping(handle.0.p_minus().as_ptr(), p_minus, n);
    StochosStatus::Ok
}

/// Evaluates the amplitude of the foam description in the JSON file at
/// `path`. `strategy` 0 enumerates every sign assignment, 1 factors over
/// connected clusters; both produce identical results within the enumeration
/// capacity.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_re` and `out_im` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn stochos_foam_amplitude(
    path: *const c_char,
    strategy: c_int,
    out_re: *mut f64,
    out_im: *mut f64,
) -> StochosStatus {
    let path = match text(path, "path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    if out_re.is_null() || out_im.is_null() {
        return fail(
            StochosStatus::NullPointer,
            "out_re and out_im must be non-null",
        );
    }
    let strategy = match strategy {
        0 => FoamStrategy::BruteForce,
        1 => FoamStrategy::Clustered,
        other => {
            return fail(
                StochosStatus::InvalidArgument,
                &format!("strategy must be 0 (brute force) or 1 (clustered), got {other}"),
            )
        }
    };
    guarded(|| {
        let spec = match read_foam_json(Path::new(path)) {
            Ok(spec) => spec,
            Err(err) => return report(err),
        };
        match foam_amplitude(&spec, strategy) {
            Ok(amp) => {
                *out_re = amp.re;
                *out_im = amp.im;
                StochosStatus::Ok
            }
            Err(err) => report(err),
        }
    })
}

/// Variance of a freely spreading Gaussian packet at time `t`:
/// sigma0^2 (1 + (hbar t / 2 m sigma0^2)^2).
#[no_mangle]
pub extern "C" fn stochos_free_packet_variance(t: f64, sigma0: f64, mass: f64, hbar: f64) -> f64 {
    free_packet_variance(t, sigma0, mass, hbar)
}

/// Relativistic dispersion omega(k) = sqrt((m c^2)^2 + (c hbar k)^2) / hbar.
#[no_mangle]
pub extern "C" fn stochos_dispersion_frequency(mass: f64, speed: f64, hbar: f64, k: f64) -> f64 {
    dispersion_frequency(mass, speed, hbar, k)
}
