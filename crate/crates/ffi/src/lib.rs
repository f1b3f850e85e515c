//! C ABI over `qdist`.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free`. Every fallible call returns a [`QdStatus`]; on failure
//! [`qd_last_error_message`] describes the error for the calling thread.
//! Strings returned through `char **` are freed with [`qd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qdist::cayley::{bfs_ball, diameter, DEFAULT_VERTEX_CAP};
use qdist::distortion::{distortion_equivariant, exact_c2, MetricTable};
use qdist::embed::{build_bundle, EmbeddingBundle};
use qdist::group::{matrix_order, Group, SpecParams};
use qdist::profile::ProfileOptions;
use qdist::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    /// Invalid parameters, scale or group combination.
    BadParam = 1,
    /// Malformed JSON, element string or UTF-8.
    Parse = 2,
    /// An iterative method stopped early or an embedding vanished.
    Numerical = 3,
    /// A size cap or checked arithmetic bound was hit.
    CapExceeded = 4,
    Io = 5,
    /// A required pointer argument was null.
    NullPointer = 6,
    /// Internal panic caught at the boundary.
    Panic = 7,
}

/// A group together with its arithmetic tables.
pub struct QdGroup(Group);

/// An equivariant embedding of a finite group.
pub struct QdBundle(EmbeddingBundle);

/// A-priori bounds of a bundle. `paper_closed_form` is NaN when the bundle
/// has no profile blocks.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QdApriori {
    pub lip_bound: f64,
    pub colip_bound: f64,
    pub dist_bound: f64,
    pub paper_closed_form: f64,
    pub valid_up_to: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QdStatus {
    match e {
        Error::CapExceeded { .. } | Error::Overflow(_) => QdStatus::CapExceeded,
        Error::NoConvergence { .. } | Error::ZeroNorm(_) | Error::ZeroGradient => QdStatus::Numerical,
        Error::Parse(_) | Error::Json(_) => QdStatus::Parse,
        Error::Io(_) => QdStatus::Io,
        _ => QdStatus::BadParam,
    }
}

/// Internal failure: a status plus message.
struct Fail(QdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(QdStatus::Parse, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            QdStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QdStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(QdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail(QdStatus::Parse, format!("{what}: {e}")))
}

fn to_c(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|e| Fail(QdStatus::Parse, e.to_string()))
}

/// Message for the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a group from a JSON spec such as
/// `{"family":"sol-fin","n":5}` or `{"family":"lamplighter-fin","m":2,"n":4}`.
///
/// # Safety
/// `spec_json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_group_new(spec_json: *const c_char, out_group: *mut *mut QdGroup) -> QdStatus {
    guard(|| {
        let slot = out(out_group, "out_group")?;
        *slot = ptr::null_mut();
        let params: SpecParams = serde_json::from_str(text(spec_json, "spec_json")?)?;
        *slot = Box::into_raw(Box::new(QdGroup(Group::from_params(&params)?)));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`qd_group_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qd_group_free(g: *mut QdGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Order of a finite group; `BadParam` for infinite families.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_group_order(g: *const QdGroup, out_order: *mut u64) -> QdStatus {
    guard(|| {
        let g = borrow(g, "group")?;
        *out(out_order, "out_order")? = g.0.order().ok_or(Error::InfiniteNeedsRadius)?;
        Ok(())
    })
}

/// Exact diameter of the Cayley graph of a finite group.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_group_diameter(g: *const QdGroup, out_diameter: *mut u32) -> QdStatus {
    guard(|| {
        let g = borrow(g, "group")?;
        *out(out_diameter, "out_diameter")? = diameter(&g.0, DEFAULT_VERTEX_CAP)?.diameter;
        Ok(())
    })
}

/// Product of two elements given in canonical string form, e.g.
/// `"lamps:0110|pos:2"`. The result is written as a new string.
///
/// # Safety
/// Pointers must be valid; `x` and `y` must be C strings.
#[no_mangle]
pub unsafe extern "C" fn qd_group_mul(
    g: *const QdGroup,
    x: *const c_char,
    y: *const c_char,
    out_product: *mut *mut c_char,
) -> QdStatus {
    guard(|| {
        let slot = out(out_product, "out_product")?;
        *slot = ptr::null_mut();
        let g = &borrow(g, "group")?.0;
        let a = g.parse(text(x, "x")?)?;
        let b = g.parse(text(y, "y")?)?;
        *slot = to_c(g.format(&g.mul(&a, &b)?))?;
        Ok(())
    })
}

/// Builds the embedding bundle of a finite group at exponent `p` in [2, 8].
/// `scale = 0` selects the default scale.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_bundle_new(g: *const QdGroup, p: f64, scale: u32, out_bundle: *mut *mut QdBundle) -> QdStatus {
    guard(|| {
        let slot = out(out_bundle, "out_bundle")?;
        *slot = ptr::null_mut();
        let g = borrow(g, "group")?;
        if !(2.0..=8.0).contains(&p) {
            return Err(Fail(QdStatus::BadParam, format!("p = {p} must lie in [2, 8]")));
        }
        let scale = (scale != 0).then_some(scale);
        let b = build_bundle(&g.0, p, scale, &ProfileOptions::default(), DEFAULT_VERTEX_CAP)?;
        *slot = Box::into_raw(Box::new(QdBundle(b)));
        Ok(())
    })
}

/// # Safety
/// `b` must come from [`qd_bundle_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qd_bundle_free(b: *mut QdBundle) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// `||F(g)||_p` for an element in canonical string form.
///
/// # Safety
/// Pointers must be valid; `element` must be a C string.
#[no_mangle]
pub unsafe extern "C" fn qd_bundle_embed_norm(b: *const QdBundle, element: *const c_char, out_norm: *mut f64) -> QdStatus {
    guard(|| {
        let b = &borrow(b, "bundle")?.0;
        let x = b.group().parse(text(element, "element")?)?;
        *out(out_norm, "out_norm")? = b.embed_norm(&x)?;
        Ok(())
    })
}

/// Exact distortion over pairs at distance at most `scale` (0 for the
/// diameter).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_bundle_distortion(b: *const QdBundle, scale: u32, out_dist: *mut f64) -> QdStatus {
    guard(|| {
        let b = &borrow(b, "bundle")?.0;
        let ball = bfs_ball(b.group(), None, DEFAULT_VERTEX_CAP)?;
        let rep = distortion_equivariant(b, &ball, (scale != 0).then_some(scale))?;
        *out(out_dist, "out_dist")? = rep.dist;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_bundle_apriori(b: *const QdBundle, out_bound: *mut QdApriori) -> QdStatus {
    guard(|| {
        let a = borrow(b, "bundle")?.0.apriori_bound();
        *out(out_bound, "out_bound")? = QdApriori {
            lip_bound: a.lip_bound,
            colip_bound: a.colip_bound,
            dist_bound: a.dist_bound,
            paper_closed_form: a.paper_closed_form.unwrap_or(f64::NAN),
            valid_up_to: a.valid_up_to,
        };
        Ok(())
    })
}

/// Bundle manifest as JSON; `with_values` nonzero includes block values.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_bundle_manifest_json(b: *const QdBundle, with_values: i32, out_json: *mut *mut c_char) -> QdStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let b = &borrow(b, "bundle")?.0;
        *slot = to_c(b.to_json(with_values != 0).to_string())?;
        Ok(())
    })
}

/// Least Euclidean distortion of the `n`-point metric `dist` (row-major
/// `n * n`), to relative accuracy `tol`.
///
/// # Safety
/// `dist` must point to `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn qd_exact_c2(dist: *const f64, n: usize, tol: f64, out_c2: *mut f64) -> QdStatus {
    guard(|| {
        if dist.is_null() {
            return Err(null("dist"));
        }
        let len = n.checked_mul(n).ok_or_else(|| Fail(QdStatus::CapExceeded, "n * n overflows".into()))?;
        let flat = std::slice::from_raw_parts(dist, len);
        let metric = MetricTable::new(flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect())?;
        *out(out_c2, "out_c2")? = exact_c2(&metric, tol)?.c2;
        Ok(())
    })
}

/// Multiplicative order of `[[a, b], [c, d]]` modulo `n`, searched up to `cap`.
///
/// # Safety
/// `out_order` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qd_matrix_order(a: i64, b: i64, c: i64, d: i64, n: u64, cap: u64, out_order: *mut u64) -> QdStatus {
    guard(|| {
        *out(out_order, "out_order")? = matrix_order(&[[a, b], [c, d]], n, cap)?;
        Ok(())
    })
}
