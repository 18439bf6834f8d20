//! C ABI over the isokam library.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*` functions and
//! released by the matching `*_free`. Every fallible call returns an `IsokamStatus`; on failure
//! `isokam_last_error` describes what went wrong. Strings returned by the library are owned
//! by the caller and must be released with `isokam_string_free`.

use isokam::complex::{block_matrix, block_spectrum, diophantine_scan, Flavor, Which};
use isokam::kam::{analytic_track, prepare, run_logged, FinalReport, Mode, RunSpec};
use isokam::models::{cyclic_coefficients, parse_model, Model};
use isokam::spectral::{sobolev_norm, spectrum_from_json, spectrum_to_json, weighted_norm, VectorFieldSpectrum};
use isokam::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsokamStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    /// Output buffer too small; the required length was written.
    BufferTooSmall = 4,
    /// A Dolgopyat scan found resonant modes (a finding, not a failure of the call).
    DolgopyatFails = 5,
    ObstructionTooLarge = 6,
    /// Divergence, or no convergence within max_steps.
    Diverged = 7,
    VerificationFailed = 8,
    /// Any other numerical failure, such as ill conditioning or a failed composition.
    Numerical = 9,
    Panic = 10,
}

/// Operator whose block spectrum is requested.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub enum IsokamOperator {
    D0D0Star = 0,
    D1StarD1 = 1,
    Box = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub enum IsokamFlavor {
    D0 = 0,
    Box = 1,
    Relations = 2,
    Dolgopyat = 3,
}

/// Opaque group presentation plus isometric action.
pub struct IsokamModel(Model);

/// Opaque real vector field given by Fourier coefficients.
pub struct IsokamSpectrum(VectorFieldSpectrum);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IsokamStatus {
    match e {
        Error::InvalidInput(_)
        | Error::Json(_)
        | Error::BadWord(_)
        | Error::DimensionMismatch { .. }
        | Error::RealityViolation { .. }
        | Error::InconsistentRelations(_)
        | Error::UnsupportedAction(_)
        | Error::NotCoprime(..)
        | Error::NotPeriodic(_)
        | Error::EmptyBlock(_) => IsokamStatus::InvalidInput,
        Error::ObstructionTooLarge { .. } => IsokamStatus::ObstructionTooLarge,
        Error::Diverged { .. } | Error::NotConverged { .. } => IsokamStatus::Diverged,
        Error::VerificationFailed(_) => IsokamStatus::VerificationFailed,
        _ => IsokamStatus::Numerical,
    }
}

fn fail(e: Error) -> IsokamStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// Run `f`, turning panics into `IsokamStatus::Panic`.
fn guard(f: impl FnOnce() -> IsokamStatus) -> IsokamStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            IsokamStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, IsokamStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(IsokamStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        IsokamStatus::InvalidUtf8
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> IsokamStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            IsokamStatus::Ok
        }
        Err(_) => {
            set_error("output contains an interior NUL".into());
            IsokamStatus::InvalidInput
        }
    }
}

macro_rules! nonnull {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)).into());
            return IsokamStatus::NullPointer;
        })+
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e.into()),
        }
    };
}

macro_rules! arg {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn isokam_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn isokam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a model from a name such as "circle:golden" or "periodic:2,3".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isokam_model_from_name(name: *const c_char, out: *mut *mut IsokamModel) -> IsokamStatus {
    guard(|| {
        nonnull!(out);
        let name = arg!(str_arg(name));
        let m = tri!(parse_model(name));
        *out = Box::into_raw(Box::new(IsokamModel(m)));
        IsokamStatus::Ok
    })
}

/// Build a model from JSON `{generators, relations, action: {kind, ...}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isokam_model_from_json(json: *const c_char, out: *mut *mut IsokamModel) -> IsokamStatus {
    guard(|| {
        nonnull!(out);
        let text = arg!(str_arg(json));
        let m = tri!(Model::from_json(text));
        *out = Box::into_raw(Box::new(IsokamModel(m)));
        IsokamStatus::Ok
    })
}

/// # Safety
/// `m` must come from a model constructor and not have been freed already. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn isokam_model_free(m: *mut IsokamModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of generators and torus dimension (sphere models report 2).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isokam_model_shape(
    m: *const IsokamModel,
    generators: *mut usize,
    dim: *mut usize,
) -> IsokamStatus {
    guard(|| {
        nonnull!(m, generators, dim);
        let a = &(*m).0.action;
        *generators = a.generators();
        *dim = a.manifold_dim();
        IsokamStatus::Ok
    })
}

/// Serialize a model to JSON.
///
/// # Safety
/// `m` and `out` must be valid; free the result with `isokam_string_free`.
#[no_mangle]
pub unsafe extern "C" fn isokam_model_to_json(m: *const IsokamModel, out: *mut *mut c_char) -> IsokamStatus {
    guard(|| {
        nonnull!(m, out);
        let s = tri!(serde_json::to_string(&(*m).0));
        write_string(out, s)
    })
}

/// Parse a spectrum from `{dim, modes: [{k, re, im}]}` (canonical frequencies only).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isokam_spectrum_from_json(json: *const c_char, out: *mut *mut IsokamSpectrum) -> IsokamStatus {
    guard(|| {
        nonnull!(out);
        let text = arg!(str_arg(json));
        let v: serde_json::Value = tri!(serde_json::from_str(text));
        let s = tri!(spectrum_from_json(&v));
        *out = Box::into_raw(Box::new(IsokamSpectrum(s)));
        IsokamStatus::Ok
    })
}

/// # Safety
/// `s` and `out` must be valid; free the result with `isokam_string_free`.
#[no_mangle]
pub unsafe extern "C" fn isokam_spectrum_to_json(s: *const IsokamSpectrum, out: *mut *mut c_char) -> IsokamStatus {
    guard(|| {
        nonnull!(s, out);
        let text = tri!(serde_json::to_string(&spectrum_to_json(&(*s).0)));
        write_string(out, text)
    })
}

/// # Safety
/// `s` must come from a spectrum constructor and not have been freed already. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn isokam_spectrum_free(s: *mut IsokamSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// L^2 norm, Sobolev norm of order `sobolev_r` and weighted (analytic) norm of radius
/// `radius` in manifold dimension `n`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isokam_spectrum_norms(
    s: *const IsokamSpectrum,
    sobolev_r: f64,
    radius: f64,
    n: usize,
    l2: *mut f64,
    sobolev: *mut f64,
    weighted: *mut f64,
) -> IsokamStatus {
    guard(|| {
        nonnull!(s, l2, sobolev, weighted);
        let f = &(*s).0;
        *l2 = f.l2_norm();
        *sobolev = sobolev_norm(f, sobolev_r);
        *weighted = weighted_norm(f, radius, n);
        IsokamStatus::Ok
    })
}

/// Ascending eigenvalues of one operator on the block with key `sq_norm`.
/// Writes the count to `len`; when `capacity` is too small nothing else is written and
/// `BufferTooSmall` is returned. `kernel_dim` receives the number of eigenvalues at or
/// below the kernel threshold.
///
/// # Safety
/// `m`, `len` and `kernel_dim` must be valid; `values` must hold `capacity` doubles (or be NULL
/// when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn isokam_block_eigenvalues(
    m: *const IsokamModel,
    op: IsokamOperator,
    sq_norm: u64,
    values: *mut f64,
    capacity: usize,
    len: *mut usize,
    kernel_dim: *mut usize,
) -> IsokamStatus {
    guard(|| {
        nonnull!(m, len, kernel_dim);
        let which = match op {
            IsokamOperator::D0D0Star => Which::D0D0Star,
            IsokamOperator::D1StarD1 => Which::D1StarD1,
            IsokamOperator::Box => Which::Box,
        };
        let model = &(*m).0;
        let spec = block_spectrum(&tri!(block_matrix(&model.action, &model.presentation, which, sq_norm)));
        *len = spec.eigenvalues.len();
        *kernel_dim = spec.kernel_dim();
        if capacity < spec.eigenvalues.len() {
            return IsokamStatus::BufferTooSmall;
        }
        nonnull!(values);
        ptr::copy_nonoverlapping(spec.eigenvalues.as_ptr(), values, spec.eigenvalues.len());
        IsokamStatus::Ok
    })
}

/// Diophantine scan up to `max_sq_norm`; the report is written as JSON.
/// Returns `DolgopyatFails` (with the report written) when a resonant mode is found.
///
/// # Safety
/// `m` and `out` must be valid; free the result with `isokam_string_free`.
#[no_mangle]
pub unsafe extern "C" fn isokam_diophantine_scan(
    m: *const IsokamModel,
    flavor: IsokamFlavor,
    max_sq_norm: u64,
    out: *mut *mut c_char,
) -> IsokamStatus {
    guard(|| {
        nonnull!(m, out);
        let flavor = match flavor {
            IsokamFlavor::D0 => Flavor::D0,
            IsokamFlavor::Box => Flavor::Box,
            IsokamFlavor::Relations => Flavor::Relations,
            IsokamFlavor::Dolgopyat => Flavor::Dolgopyat,
        };
        let model = &(*m).0;
        let report = tri!(diophantine_scan(&model.action, &model.presentation, flavor, max_sq_norm));
        let st = write_string(out, tri!(serde_json::to_string(&report)));
        if st == IsokamStatus::Ok && report.dolgopyat_failed {
            set_error(format!("resonant mode {:?}", report.resonant_witness));
            return IsokamStatus::DolgopyatFails;
        }
        st
    })
}

/// Integer coefficients y_1..y_J (J = floor(n/2)) of the cyclic decomposition of order n.
/// Same buffer protocol as `isokam_block_eigenvalues`.
///
/// # Safety
/// `len` must be valid; `y` must hold `capacity` integers (or be NULL when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn isokam_cyclic_coefficients(n: u64, y: *mut i64, capacity: usize, len: *mut usize) -> IsokamStatus {
    guard(|| {
        nonnull!(len);
        let c = tri!(cyclic_coefficients(n));
        *len = c.y.len();
        if capacity < c.y.len() {
            return IsokamStatus::BufferTooSmall;
        }
        nonnull!(y);
        ptr::copy_nonoverlapping(c.y.as_ptr(), y, c.y.len());
        IsokamStatus::Ok
    })
}

/// Run the KAM iteration from a JSON run description (same schema as the CLI `kam`
/// command). Once the run has started the final report JSON is always written, and the
/// status names the failure if there was one. Invalid descriptions fail before any output.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` valid; free the result with
/// `isokam_string_free`.
#[no_mangle]
pub unsafe extern "C" fn isokam_run_kam(config_json: *const c_char, out: *mut *mut c_char) -> IsokamStatus {
    guard(|| {
        nonnull!(out);
        let text = arg!(str_arg(config_json));
        let spec = tri!(RunSpec::from_json(text));
        let prep = tri!(prepare(&spec));
        let (log, err) = run_logged(&prep.config, &prep.model.action, &prep.model.presentation, &prep.p0);
        let analytic = match (prep.config.mode, &err) {
            (Mode::Analytic, None) => Some(tri!(analytic_track(&log))),
            _ => None,
        };
        let report = tri!(FinalReport::new(&log, analytic.as_ref(), err.as_ref()));
        let st = write_string(out, tri!(serde_json::to_string(&report)));
        match err {
            Some(e) => fail(e),
            None => st,
        }
    })
}
