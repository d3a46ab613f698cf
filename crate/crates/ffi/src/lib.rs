// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for the adiabatic-elimination library.
//!
//! Handles are opaque pointers owned by this library; every constructor has
//! a matching `_free`. All functions return [`AdiaelStatus`]; on failure the
//! thread-local message retrieved by [`adiael_last_error_message`] explains
//! what went wrong. Matrices are written into caller buffers as row-major
//! interleaved `re, im` doubles in the column-stacking superoperator
//! convention of the core library.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use adiael_core::config::ModelConfig;
use adiael_core::engine::{reduce, ReducedModel, SylvesterMethod};
use adiael_core::error::Error;
use adiael_core::linalg::CMat;
use adiael_core::model::BipartiteModel;
use adiael_core::oracles::{bloch_form, jc_reduced, labframe_reduced, JcParams, LabFrameParams};
use adiael_core::quad::QuadratureConfig;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiaelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BadConfig = 3,
    Singular = 4,
    DivergentIntegral = 5,
    DegenerateSteadyState = 6,
    NoSeparation = 7,
    NumericalFailure = 8,
    BufferTooSmall = 9,
    InvalidUtf8 = 10,
}

/// Sylvester route selector for [`adiael_reduce`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiaelMethod {
    Direct = 0,
    Quadrature = 1,
}

/// Opaque bipartite model handle.
pub struct AdiaelModel {
    model: BipartiteModel,
    quad: QuadratureConfig,
    order: usize,
}

/// Opaque reduced-model handle.
pub struct AdiaelReduced {
    inner: ReducedModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &Error) -> AdiaelStatus {
    match err {
        Error::InvalidArgument(_) | Error::DimensionMismatch(_) => AdiaelStatus::InvalidArgument,
        Error::Config(_) | Error::Json(_) | Error::Io(_) => AdiaelStatus::BadConfig,
        Error::SingularSylvester { .. } => AdiaelStatus::Singular,
        Error::DivergentIntegral(_) => AdiaelStatus::DivergentIntegral,
        Error::DegenerateSteadyState { .. } => AdiaelStatus::DegenerateSteadyState,
        Error::NoSeparation(_) => AdiaelStatus::NoSeparation,
        Error::Numerical(_) => AdiaelStatus::NumericalFailure,
    }
}

fn fail(err: Error) -> AdiaelStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

/// Copy the message of the most recent error on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full length including
/// the terminator; call with `len = 0` to query the size.
///
/// # Safety
/// `buf` must hold `len` bytes when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn adiael_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // always terminate
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn adiael_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parse a JSON model configuration (same schema as the CLI) into a handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adiael_model_from_json(
    json: *const c_char,
    out: *mut *mut AdiaelModel,
) -> AdiaelStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("configuration is not valid UTF-8");
            return AdiaelStatus::InvalidUtf8;
        }
    };
    let cfg = match ModelConfig::from_json(text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match cfg.resolve() {
        Ok(resolved) => {
            let boxed = Box::new(AdiaelModel {
                model: resolved.model,
                quad: resolved.quad,
                order: resolved.order,
            });
            *out = Box::into_raw(boxed);
            AdiaelStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a model handle. Passing NULL is a no-op.
///
/// # Safety
/// `m` must be a pointer previously returned by [`adiael_model_from_json`]
/// and not freed since.
#[no_mangle]
pub unsafe extern "C" fn adiael_model_free(m: *mut AdiaelModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Retained- and eliminated-subsystem dimensions of the model.
///
/// # Safety
/// `m`, `dim_a`, `dim_b` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_model_dims(
    m: *const AdiaelModel,
    dim_a: *mut usize,
    dim_b: *mut usize,
) -> AdiaelStatus {
    if m.is_null() || dim_a.is_null() || dim_b.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    *dim_a = (*m).model.dim_a;
    *dim_b = (*m).model.dim_b;
    AdiaelStatus::Ok
}

/// Diagnostic timescale ratio `g / kappa_ref`.
///
/// # Safety
/// `m` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_model_epsilon(
    m: *const AdiaelModel,
    out: *mut f64,
) -> AdiaelStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    *out = (*m).model.epsilon();
    AdiaelStatus::Ok
}

/// Default expansion order carried by the configuration.
///
/// # Safety
/// `m` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_model_default_order(
    m: *const AdiaelModel,
    out: *mut usize,
) -> AdiaelStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    *out = (*m).order;
    AdiaelStatus::Ok
}

/// Run the expansion to `max_order` with the selected Sylvester route.
///
/// # Safety
/// `m` must be a live model handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduce(
    m: *const AdiaelModel,
    max_order: u32,
    method: AdiaelMethod,
    out: *mut *mut AdiaelReduced,
) -> AdiaelStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let handle = &*m;
    let method = match method {
        AdiaelMethod::Direct => SylvesterMethod::Direct,
        AdiaelMethod::Quadrature => SylvesterMethod::Quadrature,
    };
    match reduce(&handle.model, max_order as usize, method, &handle.quad) {
        Ok(red) => {
            *out = Box::into_raw(Box::new(AdiaelReduced { inner: red }));
            AdiaelStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a reduced-model handle. Passing NULL is a no-op.
///
/// # Safety
/// `r` must be a pointer previously returned by [`adiael_reduce`].
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_free(r: *mut AdiaelReduced) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of computed orders (`max_order + 1`).
///
/// # Safety
/// `r` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_order_count(
    r: *const AdiaelReduced,
    out: *mut usize,
) -> AdiaelStatus {
    if r.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    *out = (*r).inner.orders.len();
    AdiaelStatus::Ok
}

unsafe fn copy_matrix(mat: &CMat, buf: *mut f64, len: usize) -> AdiaelStatus {
    let needed = 2 * mat.len();
    if len < needed {
        set_error(&format!("buffer holds {len} doubles, {needed} required"));
        return AdiaelStatus::BufferTooSmall;
    }
    let mut k = 0;
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            *buf.add(k) = mat[(i, j)].re;
            *buf.add(k + 1) = mat[(i, j)].im;
            k += 2;
        }
    }
    AdiaelStatus::Ok
}

/// Doubles required for the order-n generator (`2 * dim_a^4`).
///
/// # Safety
/// `r` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_generator_len(
    r: *const AdiaelReduced,
    out: *mut usize,
) -> AdiaelStatus {
    if r.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let d2 = (*r).inner.model.dim_a * (*r).inner.model.dim_a;
    *out = 2 * d2 * d2;
    AdiaelStatus::Ok
}

/// Copy the order-n generator contribution (row-major, interleaved re/im).
///
/// # Safety
/// `r` must be live and `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_generator(
    r: *const AdiaelReduced,
    order: usize,
    buf: *mut f64,
    len: usize,
) -> AdiaelStatus {
    if r.is_null() || buf.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let red = &(*r).inner;
    match red.orders.get(order) {
        Some(o) => copy_matrix(&o.generator.mat, buf, len),
        None => {
            set_error(&format!("order {order} not computed (have {})", red.orders.len()));
            AdiaelStatus::InvalidArgument
        }
    }
}

/// Doubles required for an order-n correction map
/// (`2 * (dim_a dim_b)^2 * dim_a^2`).
///
/// # Safety
/// `r` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_correction_len(
    r: *const AdiaelReduced,
    out: *mut usize,
) -> AdiaelStatus {
    if r.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let model = &(*r).inner.model;
    let joint = model.dim_a * model.dim_b;
    *out = 2 * joint * joint * model.dim_a * model.dim_a;
    AdiaelStatus::Ok
}

/// Copy the order-n correction map (row-major, interleaved re/im).
///
/// # Safety
/// `r` must be live and `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_correction(
    r: *const AdiaelReduced,
    order: usize,
    buf: *mut f64,
    len: usize,
) -> AdiaelStatus {
    if r.is_null() || buf.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let red = &(*r).inner;
    match red.orders.get(order) {
        Some(o) => copy_matrix(&o.correction.mat, buf, len),
        None => {
            set_error(&format!("order {order} not computed (have {})", red.orders.len()));
            AdiaelStatus::InvalidArgument
        }
    }
}

/// Invariance and gauge residuals of one order.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_residuals(
    r: *const AdiaelReduced,
    order: usize,
    invariance: *mut f64,
    gauge: *mut f64,
) -> AdiaelStatus {
    if r.is_null() || invariance.is_null() || gauge.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let red = &(*r).inner;
    match red.orders.get(order) {
        Some(o) => {
            *invariance = o.invariance_residual;
            *gauge = o.gauge_residual;
            AdiaelStatus::Ok
        }
        None => {
            set_error(&format!("order {order} not computed (have {})", red.orders.len()));
            AdiaelStatus::InvalidArgument
        }
    }
}

/// Number of warnings attached to the reduction.
///
/// # Safety
/// `r` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_warning_count(
    r: *const AdiaelReduced,
    out: *mut usize,
) -> AdiaelStatus {
    if r.is_null() || out.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    *out = (*r).inner.warnings.len();
    AdiaelStatus::Ok
}

/// Copy warning `idx` (NUL-terminated, truncated to `len` bytes). Returns
/// the full length including the terminator through `needed`.
///
/// # Safety
/// `r` must be live; `buf` must hold `len` bytes when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn adiael_reduced_warning(
    r: *const AdiaelReduced,
    idx: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> AdiaelStatus {
    if r.is_null() || needed.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let red = &(*r).inner;
    let Some(w) = red.warnings.get(idx) else {
        set_error(&format!("warning index {idx} out of range"));
        return AdiaelStatus::InvalidArgument;
    };
    let bytes = w.as_bytes();
    *needed = bytes.len() + 1;
    if !buf.is_null() && len > 0 {
        let n = bytes.len().min(len - 1);
        std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
        if len < bytes.len() + 1 {
            return AdiaelStatus::BufferTooSmall;
        }
    }
    AdiaelStatus::Ok
}

/// Closed-form second-order generator of the resonant exchange model,
/// written as a 4x4 superoperator (32 doubles).
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn adiael_jc_generator(
    kappa: f64,
    kappa_phi: f64,
    delta: f64,
    n_th: f64,
    g: f64,
    buf: *mut f64,
    len: usize,
) -> AdiaelStatus {
    if buf.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let p = JcParams { kappa, kappa_phi, delta, n_th, g };
    match jc_reduced(&p, None) {
        Ok(gen) => copy_matrix(&gen.mat, buf, len),
        Err(e) => fail(e),
    }
}

/// Closed-form lab-frame coefficients: the Hermitian channel matrix `X`
/// (8 doubles, row-major re/im, basis order `+,-`), the frequency pull `y`,
/// and the Bloch fixed-point data `z_bar`, `r_z`.
///
/// # Safety
/// `x_buf` must hold 8 doubles; the scalar outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adiael_labframe_coefficients(
    kappa: f64,
    kappa_phi: f64,
    omega_b: f64,
    omega_eg: f64,
    n_th: f64,
    g: f64,
    x_buf: *mut f64,
    y: *mut f64,
    z_bar: *mut f64,
    r_z: *mut f64,
) -> AdiaelStatus {
    if x_buf.is_null() || y.is_null() || z_bar.is_null() || r_z.is_null() {
        set_error("null pointer argument");
        return AdiaelStatus::NullPointer;
    }
    let p = LabFrameParams { kappa, kappa_phi, omega_b, omega_eg, n_th, g };
    let lf = match labframe_reduced(&p) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let bloch = match bloch_form(&p) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let mut k = 0;
    for l in 0..2 {
        for lp in 0..2 {
            *x_buf.add(k) = lf.x[l][lp].re;
            *x_buf.add(k + 1) = lf.x[l][lp].im;
            k += 2;
        }
    }
    *y = lf.y;
    *z_bar = bloch.z_bar;
    *r_z = bloch.r_z;
    AdiaelStatus::Ok
}
