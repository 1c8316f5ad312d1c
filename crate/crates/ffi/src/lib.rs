//! C ABI over `tamarkin-core`.
//!
//! Every function returns a [`TmkStatus`]; results go through out-pointers.
//! On failure, [`tmk_last_error`] describes what went wrong on this thread.
//! Handles returned through out-pointers are owned by the caller and must be
//! released with the matching `_free` function. Strings returned by the
//! library are released with [`tmk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tamarkin_core::barcode::{
    dprime_distance, epsilon_interleaved, interleaving_distance, shifted_dprime, GradedBarcode,
};
use tamarkin_core::demo::MeshBundle;
use tamarkin_core::field::PrimeField;
use tamarkin_core::specinv::spectral_norm;
use tamarkin_core::sublevel::SublevelSpec;
use thiserror::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Unsupported = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// A graded barcode.
pub struct TmkBarcode(GradedBarcode);

/// A complex with a sampled function, optional clamp and supplied action.
pub struct TmkMesh(MeshBundle);

/// Barcode, filtered module and Spec of a sampled function.
pub struct TmkSpec(SublevelSpec);

#[derive(Debug, Error)]
enum FfiError {
    #[error("null pointer passed as {0}")]
    Null(&'static str),
    #[error("string is not valid UTF-8")]
    Utf8,
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("buffer holds {have} values, {need} needed")]
    Buffer { have: usize, need: usize },
}

impl FfiError {
    fn status(&self) -> TmkStatus {
        match self {
            FfiError::Null(_) => TmkStatus::NullPointer,
            FfiError::Utf8 => TmkStatus::InvalidUtf8,
            FfiError::Input(_) => TmkStatus::InvalidInput,
            FfiError::Unsupported(_) => TmkStatus::Unsupported,
            FfiError::Buffer { .. } => TmkStatus::BufferTooSmall,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), FfiError>) -> TmkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TmkStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            e.status()
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            TmkStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, FfiError> {
    p.as_ref().ok_or(FfiError::Null(name))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, FfiError> {
    p.as_mut().ok_or(FfiError::Null(name))
}

unsafe fn text<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, FfiError> {
    if p.is_null() {
        return Err(FfiError::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| FfiError::Utf8)
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

fn field(p: u32) -> Result<PrimeField, FfiError> {
    PrimeField::new(p).map_err(|e| FfiError::Input(e.to_string()))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from this thread.
#[no_mangle]
pub extern "C" fn tmk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tmk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- barcodes ----------------------------------------------------------------

/// Parses `{"degrees": {"0": [[birth, death], ...]}}`; `"inf"` marks a ray.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_barcode_from_json(json: *const c_char, out: *mut *mut TmkBarcode) -> TmkStatus {
    guard(|| {
        let s = text(json, "json")?;
        let o = out_ref(out, "out")?;
        let b: GradedBarcode = serde_json::from_str(s).map_err(|e| FfiError::Input(e.to_string()))?;
        *o = Box::into_raw(Box::new(TmkBarcode(b)));
        Ok(())
    })
}

/// # Safety
/// `b` must be a live barcode handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_barcode_to_json(b: *const TmkBarcode, out: *mut *mut c_char) -> TmkStatus {
    guard(|| {
        let b = get(b, "barcode")?;
        let o = out_ref(out, "out")?;
        *o = owned_string(serde_json::to_string(&b.0).expect("serializable"));
        Ok(())
    })
}

/// # Safety
/// `b` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tmk_barcode_free(b: *mut TmkBarcode) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Number of bars over all degrees.
///
/// # Safety
/// `b` must be a live barcode handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_barcode_len(b: *const TmkBarcode, out: *mut usize) -> TmkStatus {
    guard(|| {
        *out_ref(out, "out")? = get(b, "barcode")?.0.len();
        Ok(())
    })
}

/// New barcode with every endpoint moved by `c`.
///
/// # Safety
/// `b` must be a live barcode handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_barcode_shift(b: *const TmkBarcode, c: f64, out: *mut *mut TmkBarcode) -> TmkStatus {
    guard(|| {
        let b = get(b, "barcode")?;
        let o = out_ref(out, "out")?;
        if !c.is_finite() {
            return Err(FfiError::Input(format!("shift {c} is not finite")));
        }
        *o = Box::into_raw(Box::new(TmkBarcode(b.0.shift(c))));
        Ok(())
    })
}

/// Longest finite bar, `+inf` when some bar is a ray, 0 for none.
///
/// # Safety
/// `b` must be a live barcode handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_barcode_torsion_threshold(b: *const TmkBarcode, out: *mut f64) -> TmkStatus {
    guard(|| {
        *out_ref(out, "out")? = get(b, "barcode")?.0.torsion_threshold();
        Ok(())
    })
}

unsafe fn distance(
    x: *const TmkBarcode,
    y: *const TmkBarcode,
    out: *mut f64,
    f: fn(&GradedBarcode, &GradedBarcode) -> f64,
) -> TmkStatus {
    guard(|| {
        let (x, y) = (get(x, "left")?, get(y, "right")?);
        *out_ref(out, "out")? = f(&x.0, &y.0);
        Ok(())
    })
}

/// `d'`; `+inf` when the ray counts differ.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_dprime(x: *const TmkBarcode, y: *const TmkBarcode, out: *mut f64) -> TmkStatus {
    distance(x, y, out, dprime_distance)
}

/// `d'` minimized over translations of the second barcode.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_shifted_dprime(x: *const TmkBarcode, y: *const TmkBarcode, out: *mut f64) -> TmkStatus {
    distance(x, y, out, shifted_dprime)
}

/// Unshifted interleaving distance.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_interleaving_distance(
    x: *const TmkBarcode,
    y: *const TmkBarcode,
    out: *mut f64,
) -> TmkStatus {
    distance(x, y, out, interleaving_distance)
}

/// Whether the two barcodes are `eps`-interleaved.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_epsilon_interleaved(
    x: *const TmkBarcode,
    y: *const TmkBarcode,
    eps: f64,
    out: *mut bool,
) -> TmkStatus {
    guard(|| {
        let (x, y) = (get(x, "left")?, get(y, "right")?);
        let o = out_ref(out, "out")?;
        if eps.is_nan() || eps < 0.0 {
            return Err(FfiError::Input(format!("eps {eps} must be >= 0")));
        }
        *o = epsilon_interleaved(&x.0, &y.0, eps).is_some();
        Ok(())
    })
}

// ---- meshes and Spec -----------------------------------------------------------

/// Parses a mesh bundle, the format printed by `tamarkin demo circle-height`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_mesh_from_json(json: *const c_char, out: *mut *mut TmkMesh) -> TmkStatus {
    guard(|| {
        let s = text(json, "json")?;
        let o = out_ref(out, "out")?;
        let m: MeshBundle = serde_json::from_str(s).map_err(|e| FfiError::Input(e.to_string()))?;
        *o = Box::into_raw(Box::new(TmkMesh(m)));
        Ok(())
    })
}

/// Same mesh with the function negated. Only for unclamped bundles without a fiber.
///
/// # Safety
/// `m` must be a live mesh handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_mesh_dual(m: *const TmkMesh, out: *mut *mut TmkMesh) -> TmkStatus {
    guard(|| {
        let m = get(m, "mesh")?;
        let o = out_ref(out, "out")?;
        if !m.0.is_graph_case() {
            return Err(FfiError::Unsupported("dual needs an unclamped function without fiber".into()));
        }
        let dual = MeshBundle {
            function: m.0.function.dual(),
            ..m.0.clone()
        };
        *o = Box::into_raw(Box::new(TmkMesh(dual)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tmk_mesh_free(m: *mut TmkMesh) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Barcode, module and Spec over `F_p`.
///
/// # Safety
/// `m` must be a live mesh handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_spec_of_function(m: *const TmkMesh, p: u32, out: *mut *mut TmkSpec) -> TmkStatus {
    guard(|| {
        let m = get(m, "mesh")?;
        let o = out_ref(out, "out")?;
        let r = m.0.spec(field(p)?).map_err(|e| FfiError::Input(e.to_string()))?;
        *o = Box::into_raw(Box::new(TmkSpec(r)));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tmk_spec_free(s: *mut TmkSpec) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copies the distinct Spec values, ascending, into `values`. `written`
/// receives the count; with a short buffer nothing is copied and the status
/// is `BufferTooSmall`.
///
/// # Safety
/// `s` must be a live handle, `values` valid for `cap` writes (or null with
/// `cap == 0`) and `written` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_spec_values(
    s: *const TmkSpec,
    values: *mut f64,
    cap: usize,
    written: *mut usize,
) -> TmkStatus {
    guard(|| {
        let s = get(s, "spec")?;
        let w = out_ref(written, "written")?;
        let v = &s.0.spec.values;
        *w = v.len();
        if cap < v.len() {
            return Err(FfiError::Buffer { have: cap, need: v.len() });
        }
        if !v.is_empty() {
            if values.is_null() {
                return Err(FfiError::Null("values"));
            }
            ptr::copy_nonoverlapping(v.as_ptr(), values, v.len());
        }
        Ok(())
    })
}

/// Barcode of the function's pair filtration.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_spec_barcode(s: *const TmkSpec, out: *mut *mut TmkBarcode) -> TmkStatus {
    guard(|| {
        let s = get(s, "spec")?;
        *out_ref(out, "out")? = Box::into_raw(Box::new(TmkBarcode(s.0.barcode.clone())));
        Ok(())
    })
}

/// `{"spec": {...}, "classes": [...], "barcode": {...}, "module": {...}}`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_spec_to_json(s: *const TmkSpec, out: *mut *mut c_char) -> TmkStatus {
    guard(|| {
        let s = get(s, "spec")?;
        let o = out_ref(out, "out")?;
        let v = serde_json::json!({
            "spec": s.0.spec,
            "classes": s.0.classes,
            "barcode": s.0.barcode,
            "ring": s.0.ring,
            "module": s.0.module,
        });
        *o = owned_string(v.to_string());
        Ok(())
    })
}

/// `max Spec(fwd) + max Spec(bwd)`; with `bwd` computed from `-S` this is `gamma(S)`.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmk_spectral_norm(fwd: *const TmkSpec, bwd: *const TmkSpec, out: *mut f64) -> TmkStatus {
    guard(|| {
        let (f, b) = (get(fwd, "fwd")?, get(bwd, "bwd")?);
        let o = out_ref(out, "out")?;
        *o = spectral_norm(&f.0.module, &b.0.module).map_err(|e| FfiError::Input(e.to_string()))?;
        Ok(())
    })
}
