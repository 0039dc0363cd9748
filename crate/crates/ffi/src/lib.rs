//! C ABI for son-expm.
//!
//! Objects cross the boundary as opaque handles created by `son_*_new` or
//! returned through out-pointers, and released with the matching `*_free`.
//! Every fallible call returns a [`SonStatus`]; the message of the most
//! recent failure on the calling thread is available through
//! [`son_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use son_expm::basis::AlgebraVector;
use son_expm::conjugacy::torus_angles;
use son_expm::error::{Error, ErrorKind};
use son_expm::expm::{evaluate, ExpmOptions, Method, RotationMatrix};
use son_expm::g2::{check_algebra_constraint, check_automorphism, embed_g2, expm_g2_with, G2Vector};
use son_expm::invariants::{compute_invariants, region_contains, REGION_TOL};

/// Status codes. The non-zero values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SonStatus {
    Ok = 0,
    /// Bad dimension, length, index or non-finite input.
    Usage = 2,
    /// Input violates a mathematical precondition.
    Invariant = 3,
    /// A numerical procedure failed.
    Numerical = 4,
    /// A required pointer was null.
    NullPointer = 5,
    /// An output buffer is too small.
    BufferTooSmall = 6,
    /// Internal panic caught at the boundary.
    Panic = 7,
}

/// Evaluation route for [`son_expm`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SonMethod {
    /// Closed form, companion route on degenerate spectra.
    Closed = 0,
    /// Reported by the closed route when it took the companion fallback.
    Fallback = 1,
    Taylor = 2,
    Companion = 3,
}

impl From<Method> for SonMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Closed => SonMethod::Closed,
            Method::Fallback => SonMethod::Fallback,
            Method::Taylor => SonMethod::Taylor,
            Method::Companion => SonMethod::Companion,
        }
    }
}

impl From<SonMethod> for Method {
    fn from(m: SonMethod) -> Self {
        match m {
            SonMethod::Closed | SonMethod::Fallback => Method::Closed,
            SonMethod::Taylor => Method::Taylor,
            SonMethod::Companion => Method::Companion,
        }
    }
}

/// Normalized invariants. Entries that do not apply to `n` are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SonInvariants {
    pub n: usize,
    pub v_norm: f64,
    pub xi: f64,
    pub zeta: f64,
    pub eta: f64,
    pub chi: f64,
    pub eta7: f64,
    pub eta9: f64,
    pub in_region: bool,
}

/// Opaque so(n) element.
pub struct SonVector(AlgebraVector);

/// Opaque exponential result.
pub struct SonRotation {
    rotation: RotationMatrix,
    method: Method,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> SonStatus {
    let status = match e.kind() {
        ErrorKind::Usage => SonStatus::Usage,
        ErrorKind::Invariant => SonStatus::Invariant,
        ErrorKind::Numerical => SonStatus::Numerical,
    };
    set_error(e.to_string());
    status
}

fn null(name: &str) -> SonStatus {
    set_error(format!("{name} is null"));
    SonStatus::NullPointer
}

/// Runs `f`, turning a panic into [`SonStatus::Panic`].
fn guard(f: impl FnOnce() -> SonStatus) -> SonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            SonStatus::Panic
        }
    }
}

unsafe fn input<'a>(data: *const f64, len: usize) -> &'a [f64] {
    if len == 0 {
        &[]
    } else {
        slice::from_raw_parts(data, len)
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length without the NUL, or 0
/// when there is none.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn son_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && cap > 0 {
                let k = bytes.len().min(cap - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, k);
                *buf.add(k) = 0;
            }
            bytes.len()
        }
    })
}

/// Number of coefficients of so(n), `n(n-1)/2`; 0 for unsupported `n`.
#[no_mangle]
pub extern "C" fn son_algebra_dim(n: usize) -> usize {
    if (son_expm::basis::MIN_DIM..=son_expm::basis::MAX_DIM).contains(&n) {
        son_expm::basis::algebra_dim(n)
    } else {
        0
    }
}

/// Creates an so(n) element from `len` coefficients in generator order.
///
/// # Safety
/// `v` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn son_vector_new(n: usize, v: *const f64, len: usize, out: *mut *mut SonVector) -> SonStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        if v.is_null() && len > 0 {
            return null("v");
        }
        match AlgebraVector::new(n, input(v, len).to_vec()) {
            Ok(av) => {
                *out = Box::into_raw(Box::new(SonVector(av)));
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `v` must be null or a handle from [`son_vector_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn son_vector_free(v: *mut SonVector) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Exponential with the default degeneracy threshold, or `delta` when it is
/// non-negative.
///
/// # Safety
/// `v` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn son_expm(
    v: *const SonVector,
    method: SonMethod,
    delta: f64,
    out: *mut *mut SonRotation,
) -> SonStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let Some(av) = v.as_ref() else { return null("v") };
        let mut opts = ExpmOptions::default();
        if delta >= 0.0 {
            opts.delta = delta;
        }
        match evaluate(&av.0, method.into(), &opts) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(SonRotation { rotation: e.rotation, method: e.method }));
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// G2 exponential of 14 parameters.
///
/// # Safety
/// `w` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn son_expm_g2(w: *const f64, len: usize, out: *mut *mut SonRotation) -> SonStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        if w.is_null() && len > 0 {
            return null("w");
        }
        let result = G2Vector::new(input(w, len).to_vec()).and_then(|g| expm_g2_with(&g, &ExpmOptions::default()));
        match result {
            Ok(e) => {
                *out = Box::into_raw(Box::new(SonRotation { rotation: e.rotation, method: e.method }));
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes the 21 so(7) coefficients of a g2 element into `out`.
///
/// # Safety
/// `w` must point to `len` readable doubles, `out` to `cap` writable ones.
#[no_mangle]
pub unsafe extern "C" fn son_embed_g2(w: *const f64, len: usize, out: *mut f64, cap: usize) -> SonStatus {
    guard(|| {
        if out.is_null() || (w.is_null() && len > 0) {
            return null(if out.is_null() { "out" } else { "w" });
        }
        if cap < 21 {
            set_error(format!("need room for 21 coefficients, got {cap}"));
            return SonStatus::BufferTooSmall;
        }
        match G2Vector::new(input(w, len).to_vec()) {
            Ok(g) => {
                let av = embed_g2(&g);
                ptr::copy_nonoverlapping(av.coefficients().as_ptr(), out, 21);
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn son_rotation_free(r: *mut SonRotation) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Matrix dimension n; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn son_rotation_dim(r: *const SonRotation) -> usize {
    r.as_ref().map_or(0, |r| r.rotation.n)
}

/// Route that produced the matrix.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn son_rotation_method(r: *const SonRotation) -> SonMethod {
    r.as_ref().map_or(SonMethod::Closed, |r| r.method.into())
}

/// Copies the matrix row-major into `out`, which must hold `n*n` doubles.
///
/// # Safety
/// `r` must be a live handle and `out` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn son_rotation_copy(r: *const SonRotation, out: *mut f64, cap: usize) -> SonStatus {
    guard(|| {
        let Some(r) = r.as_ref() else { return null("r") };
        if out.is_null() {
            return null("out");
        }
        let n = r.rotation.n;
        if cap < n * n {
            set_error(format!("need room for {} entries, got {cap}", n * n));
            return SonStatus::BufferTooSmall;
        }
        for i in 0..n {
            for j in 0..n {
                *out.add(i * n + j) = r.rotation.matrix[(i, j)];
            }
        }
        SonStatus::Ok
    })
}

/// `‖RᵀR - I‖_F`.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn son_rotation_orthogonality_residual(r: *const SonRotation) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.rotation.orthogonality_residual())
}

/// Largest violation of the octonion structure constants under `r` (7x7 only).
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn son_g2_automorphism_residual(r: *const SonRotation, out: *mut f64) -> SonStatus {
    guard(|| {
        let Some(r) = r.as_ref() else { return null("r") };
        if out.is_null() {
            return null("out");
        }
        match check_automorphism(&r.rotation) {
            Ok(x) => {
                *out = x;
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Largest g2 constraint residual of an so(7) element.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn son_g2_constraint_residual(v: *const SonVector, out: *mut f64) -> SonStatus {
    guard(|| {
        let Some(v) = v.as_ref() else { return null("v") };
        if out.is_null() {
            return null("out");
        }
        match check_algebra_constraint(&v.0) {
            Ok(x) => {
                *out = x;
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn son_invariants(v: *const SonVector, out: *mut SonInvariants) -> SonStatus {
    guard(|| {
        let Some(v) = v.as_ref() else { return null("v") };
        if out.is_null() {
            return null("out");
        }
        match compute_invariants(&v.0) {
            Ok(inv) => {
                let f = |x: Option<f64>| x.unwrap_or(f64::NAN);
                *out = SonInvariants {
                    n: inv.n,
                    v_norm: inv.v_norm,
                    xi: f(inv.xi),
                    zeta: f(inv.zeta),
                    eta: f(inv.eta),
                    chi: f(inv.chi),
                    eta7: f(inv.eta7),
                    eta9: f(inv.eta9),
                    in_region: region_contains(&inv, REGION_TOL),
                };
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Torus angles, descending. `count` receives `n / 2`; `out` must hold that
/// many doubles.
///
/// # Safety
/// `v` must be a live handle, `out` must point to `cap` writable doubles and
/// `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn son_torus_angles(v: *const SonVector, out: *mut f64, cap: usize, count: *mut usize) -> SonStatus {
    guard(|| {
        let Some(v) = v.as_ref() else { return null("v") };
        if out.is_null() || count.is_null() {
            return null(if out.is_null() { "out" } else { "count" });
        }
        match torus_angles(&v.0) {
            Ok(t) => {
                *count = t.phi.len();
                if cap < t.phi.len() {
                    set_error(format!("need room for {} angles, got {cap}", t.phi.len()));
                    return SonStatus::BufferTooSmall;
                }
                ptr::copy_nonoverlapping(t.phi.as_ptr(), out, t.phi.len());
                SonStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
