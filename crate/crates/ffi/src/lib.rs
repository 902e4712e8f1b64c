//! C ABI over the solver. Configurations and solution fields are opaque
//! handles owned by the caller and released with the matching `*_free`.
//! Every fallible call returns an [`SgStatus`]; the message of the last
//! failure on the calling thread is available from [`sg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use steady_glimm::config::{parse_config, ConfigError, RunConfig};
use steady_glimm::diagnostics::probe_backgrounds;
use steady_glimm::quasi1d::{compare, solve_for_field};
use steady_glimm::scheme::{run, SolutionField};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Solver = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Parsed and validated run configuration.
pub struct SgConfig {
    inner: RunConfig,
}

/// Result of a 2D march.
pub struct SgField {
    inner: SolutionField,
}

/// One cell of a column.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SgCell {
    pub y_lo: f64,
    pub y_hi: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub rho: f64,
    pub z: f64,
}

/// Probed coefficients at the backgrounds with their closed forms.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SgProbe {
    pub k_b: f64,
    pub k_b_closed: f64,
    pub k_b5: f64,
    pub k_b2: f64,
    pub k_b3: f64,
    pub k25: f64,
    pub k25_closed: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn guard(f: impl FnOnce() -> Result<(), (SgStatus, String)>) -> SgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SgStatus::Ok
        }
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            SgStatus::Panic
        }
    }
}

fn null() -> (SgStatus, String) {
    (SgStatus::NullPointer, "null pointer argument".into())
}

fn solver(e: steady_glimm::Error) -> (SgStatus, String) {
    (SgStatus::Solver, e.to_string())
}

unsafe fn config_ref<'a>(c: *const SgConfig) -> Result<&'a SgConfig, (SgStatus, String)> {
    c.as_ref().ok_or_else(null)
}

unsafe fn field_ref<'a>(f: *const SgField) -> Result<&'a SgField, (SgStatus, String)> {
    f.as_ref().ok_or_else(null)
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version string (static).
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Parses and validates TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_config_parse(text: *const c_char, out: *mut *mut SgConfig) -> SgStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let s = CStr::from_ptr(text).to_str().map_err(|e| (SgStatus::InvalidUtf8, e.to_string()))?;
        let cfg = parse_config(s).map_err(|e| match e {
            ConfigError::Parse { .. } => (SgStatus::Parse, e.to_string()),
            ConfigError::Validation(_) => (SgStatus::Validation, e.to_string()),
        })?;
        *out = Box::into_raw(Box::new(SgConfig { inner: cfg }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from [`sg_config_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_config_free(cfg: *mut SgConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Overrides the theta seed.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_config_set_seed(cfg: *mut SgConfig, seed: u64) -> SgStatus {
    guard(|| {
        cfg.as_mut().ok_or_else(null)?.inner.scheme.seed = seed;
        Ok(())
    })
}

/// Overrides the step `h`; the configuration is revalidated.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_config_set_h(cfg: *mut SgConfig, h: f64) -> SgStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(null)?;
        let mut next = c.inner.clone();
        next.scheme.h = h;
        next.check(steady_glimm::config::Smallness::Enforce).map_err(|e| (SgStatus::Validation, e.to_string()))?;
        c.inner = next;
        Ok(())
    })
}

/// Marches the scheme to `x_max`.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_run(cfg: *const SgConfig, out: *mut *mut SgField) -> SgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let c = config_ref(cfg)?;
        let sc = c.inner.scheme_config().map_err(|e| (SgStatus::Validation, e.to_string()))?;
        let field = run(&sc).map_err(solver)?;
        *out = Box::into_raw(Box::new(SgField { inner: field }));
        Ok(())
    })
}

/// # Safety
/// `field` must come from [`sg_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_field_free(field: *mut SgField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_field_column_count(field: *const SgField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.columns.len())
}

/// Number of cells in column `k`, or 0 when out of range.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_field_cell_count(field: *const SgField, k: usize) -> usize {
    field.as_ref().and_then(|f| f.inner.columns.get(k)).map_or(0, |c| c.cells.len())
}

/// Cell `j` of column `k`, counted from the bottom.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_field_cell(field: *const SgField, k: usize, j: usize, out: *mut SgCell) -> SgStatus {
    guard(|| {
        let f = field_ref(field)?;
        let out = out.as_mut().ok_or_else(null)?;
        let cell = f
            .inner
            .columns
            .get(k)
            .and_then(|c| c.cells.get(j))
            .ok_or_else(|| (SgStatus::OutOfRange, format!("no cell ({k}, {j})")))?;
        let s = cell.state;
        *out = SgCell { y_lo: cell.y_lo, y_hi: cell.y_hi, u: s.u, v: s.v, p: s.p, rho: s.rho, z: s.z };
        Ok(())
    })
}

/// Abscissa and tracked contact ordinate of column `k`.
///
/// # Safety
/// `field` must be a live handle, `x` and `chi` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_field_contact(field: *const SgField, k: usize, x: *mut f64, chi: *mut f64) -> SgStatus {
    guard(|| {
        let f = field_ref(field)?;
        if x.is_null() || chi.is_null() {
            return Err(null());
        }
        let c = f.inner.columns.get(k).ok_or_else(|| (SgStatus::OutOfRange, format!("no column {k}")))?;
        *x = c.x;
        *chi = c.contact_y;
        Ok(())
    })
}

/// Sup over columns and components of the averaged field minus the duct model.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_field_compare_sup(field: *const SgField, out: *mut f64) -> SgStatus {
    guard(|| {
        let f = field_ref(field)?;
        let out = out.as_mut().ok_or_else(null)?;
        let q = solve_for_field(&f.inner).map_err(solver)?;
        *out = compare(&f.inner, &q).map_err(solver)?.sup;
        Ok(())
    })
}

/// Boundary and reflection coefficients at the configured backgrounds.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_probe(cfg: *const SgConfig, out: *mut SgProbe) -> SgStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        let out = out.as_mut().ok_or_else(null)?;
        let gas = c.inner.gas_model().map_err(|e| (SgStatus::Validation, e.to_string()))?;
        let p = probe_backgrounds(&gas, &c.inner.backgrounds()).map_err(solver)?;
        let b = p.boundary;
        *out = SgProbe {
            k_b: b.k_b,
            k_b_closed: b.k_b_closed,
            k_b5: b.k_b5,
            k_b2: b.k_b2,
            k_b3: b.k_b3,
            k25: p.contact.k25(),
            k25_closed: p.k25_closed,
        };
        Ok(())
    })
}
