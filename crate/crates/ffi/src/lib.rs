//! C interface to `sse-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible function returns an
//! [`SseStatus`]; on failure `sse_last_error` describes the problem. Strings
//! returned through out-parameters are freed with `sse_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::ptr;

use clap::Parser;
use sse_core::Error;
use sse_core::cli::{Cli, run};
use sse_core::code::BlockCode;
use sse_core::complex::{SSEPath, compose_path, homotopic};
use sse_core::edge::{SSEEdge, code_from_edge, edge_from_code, triangle_equations};
use sse_core::matrix::NonnegMatrix;
use sse_core::williams::decompose;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SseStatus {
    Ok = 0,
    /// A null pointer or a string that is not UTF-8.
    InvalidArgument = 1,
    /// The input does not describe a valid object.
    InvalidInput = 2,
    /// A search or iteration bound was exceeded.
    ResourceBound = 3,
    /// An internal invariant failed or the library panicked.
    Internal = 4,
}

pub struct SseMatrix(NonnegMatrix);

pub struct SseEdge(SSEEdge);

pub struct SseCode(BlockCode);

pub struct SsePath(SSEPath);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> SseStatus {
    let status = match &e {
        Error::ResourceBound(_) => SseStatus::ResourceBound,
        Error::Invariant(_) => SseStatus::Internal,
        _ => SseStatus::InvalidInput,
    };
    set_error(e.to_string());
    status
}

fn invalid(what: &str) -> SseStatus {
    set_error(format!("invalid argument: {what}"));
    SseStatus::InvalidArgument
}

fn guard(f: impl FnOnce() -> SseStatus) -> SseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SseStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Option<&'a str> {
    if s.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(s) }.to_str().ok()
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> SseStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            SseStatus::Ok
        }
        Err(_) => invalid("string contains a nul byte"),
    }
}

fn json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("library types serialize")
}

fn from_json<T: for<'de> serde::Deserialize<'de>>(s: &str) -> Result<T, SseStatus> {
    serde_json::from_str(s).map_err(|e| fail(Error::Json(e)))
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[unsafe(no_mangle)]
pub extern "C" fn sse_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[unsafe(no_mangle)]
pub extern "C" fn sse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// A `rows x cols` matrix from row-major entries.
///
/// # Safety
/// `entries` must point to `rows * cols` values; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_matrix_new(
    rows: usize,
    cols: usize,
    entries: *const u64,
    out: *mut *mut SseMatrix,
) -> SseStatus {
    guard(|| {
        if out.is_null() || (entries.is_null() && rows * cols > 0) {
            return invalid("null pointer");
        }
        let data = if rows * cols == 0 { &[][..] } else { unsafe { std::slice::from_raw_parts(entries, rows * cols) } };
        match NonnegMatrix::from_flat(rows, cols, data) {
            Ok(m) => {
                unsafe { put(out, SseMatrix(m)) };
                SseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_matrix_from_json(json: *const c_char, out: *mut *mut SseMatrix) -> SseStatus {
    guard(|| {
        let Some(s) = (unsafe { read_str(json) }) else {
            return invalid("json");
        };
        if out.is_null() {
            return invalid("out");
        }
        match from_json::<NonnegMatrix>(s) {
            Ok(m) => {
                unsafe { put(out, SseMatrix(m)) };
                SseStatus::Ok
            }
            Err(st) => st,
        }
    })
}

/// # Safety
/// `m` must be a live handle or null.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_matrix_rows(m: *const SseMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.rows())
}

/// # Safety
/// `m` must be a live handle or null.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_matrix_cols(m: *const SseMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.cols())
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_matrix_get(m: *const SseMatrix, i: usize, j: usize, out: *mut u64) -> SseStatus {
    guard(|| {
        let (Some(m), false) = (unsafe { m.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        if i >= m.0.rows() || j >= m.0.cols() {
            return fail(Error::Dimension(format!("entry ({i}, {j}) outside {}x{}", m.0.rows(), m.0.cols())));
        }
        unsafe { *out = m.0.get(i, j) };
        SseStatus::Ok
    })
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_matrix_to_json(m: *const SseMatrix, out: *mut *mut c_char) -> SseStatus {
    guard(|| match (unsafe { m.as_ref() }, out.is_null()) {
        (Some(m), false) => unsafe { put_string(out, json(&m.0)) },
        _ => invalid("null pointer"),
    })
}

/// # Safety
/// `m` must come from this library and not be freed twice.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_matrix_free(m: *mut SseMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// The edge `A = RS -> B = SR`.
///
/// # Safety
/// `r`, `s` must be live handles; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_edge_new(r: *const SseMatrix, s: *const SseMatrix, out: *mut *mut SseEdge) -> SseStatus {
    guard(|| {
        let (Some(r), Some(s), false) = (unsafe { r.as_ref() }, unsafe { s.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        match SSEEdge::from_factors(r.0.clone(), s.0.clone()) {
            Ok(e) => {
                unsafe { put(out, SseEdge(e)) };
                SseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_edge_from_json(json: *const c_char, out: *mut *mut SseEdge) -> SseStatus {
    guard(|| {
        let Some(s) = (unsafe { read_str(json) }) else {
            return invalid("json");
        };
        if out.is_null() {
            return invalid("out");
        }
        match from_json::<SSEEdge>(s) {
            Ok(e) => {
                unsafe { put(out, SseEdge(e)) };
                SseStatus::Ok
            }
            Err(st) => st,
        }
    })
}

/// Source `A` (`which == 0`), target `B` (1), `R` (2) or `S` (3) of an edge.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_edge_matrix(e: *const SseEdge, which: u32, out: *mut *mut SseMatrix) -> SseStatus {
    guard(|| {
        let (Some(e), false) = (unsafe { e.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        let m = match which {
            0 => e.0.a(),
            1 => e.0.b(),
            2 => e.0.r(),
            3 => e.0.s(),
            _ => return invalid("matrix selector must be 0..=3"),
        };
        unsafe { put(out, SseMatrix(m.clone())) };
        SseStatus::Ok
    })
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_edge_to_json(e: *const SseEdge, out: *mut *mut c_char) -> SseStatus {
    guard(|| match (unsafe { e.as_ref() }, out.is_null()) {
        (Some(e), false) => unsafe { put_string(out, json(&e.0)) },
        _ => invalid("null pointer"),
    })
}

/// # Safety
/// `e` must come from this library and not be freed twice.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_edge_free(e: *mut SseEdge) {
    if !e.is_null() {
        drop(unsafe { Box::from_raw(e) });
    }
}

/// Whether three edges satisfy the triangle equations.
///
/// # Safety
/// The edges must be live handles; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_triangle_check(
    e1: *const SseEdge,
    e2: *const SseEdge,
    e3: *const SseEdge,
    out: *mut bool,
) -> SseStatus {
    guard(|| {
        let (Some(a), Some(b), Some(c), false) =
            (unsafe { e1.as_ref() }, unsafe { e2.as_ref() }, unsafe { e3.as_ref() }, out.is_null())
        else {
            return invalid("null pointer");
        };
        let ends = a.0.b() == b.0.a() && a.0.a() == c.0.a() && b.0.b() == c.0.b();
        match triangle_equations((a.0.r(), a.0.s()), (b.0.r(), b.0.s()), (c.0.r(), c.0.s())) {
            Ok(t) => {
                unsafe { *out = ends && t.holds };
                SseStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// The elementary conjugacy of an edge.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_edge_code(e: *const SseEdge, out: *mut *mut SseCode) -> SseStatus {
    guard(|| {
        let (Some(e), false) = (unsafe { e.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        match code_from_edge(&e.0) {
            Ok(c) => {
                unsafe { put(out, SseCode(c)) };
                SseStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_code_from_json(json: *const c_char, out: *mut *mut SseCode) -> SseStatus {
    guard(|| {
        let Some(s) = (unsafe { read_str(json) }) else {
            return invalid("json");
        };
        if out.is_null() {
            return invalid("out");
        }
        match from_json::<BlockCode>(s) {
            Ok(c) => {
                unsafe { put(out, SseCode(c)) };
                SseStatus::Ok
            }
            Err(st) => st,
        }
    })
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_code_to_json(c: *const SseCode, out: *mut *mut c_char) -> SseStatus {
    guard(|| match (unsafe { c.as_ref() }, out.is_null()) {
        (Some(c), false) => unsafe { put_string(out, json(&c.0)) },
        _ => invalid("null pointer"),
    })
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_code_is_elementary(c: *const SseCode, out: *mut bool) -> SseStatus {
    guard(|| match (unsafe { c.as_ref() }, out.is_null()) {
        (Some(c), false) => {
            unsafe { *out = c.0.is_elementary() };
            SseStatus::Ok
        }
        _ => invalid("null pointer"),
    })
}

/// Whether two codes are the same map.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_code_equal(a: *const SseCode, b: *const SseCode, out: *mut bool) -> SseStatus {
    guard(|| match (unsafe { a.as_ref() }, unsafe { b.as_ref() }, out.is_null()) {
        (Some(a), Some(b), false) => {
            unsafe { *out = a.0 == b.0 };
            SseStatus::Ok
        }
        _ => invalid("null pointer"),
    })
}

/// The edge of an elementary conjugacy.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_code_edge(c: *const SseCode, out: *mut *mut SseEdge) -> SseStatus {
    guard(|| {
        let (Some(c), false) = (unsafe { c.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        match edge_from_code(&c.0) {
            Ok(e) => {
                unsafe { put(out, SseEdge(e)) };
                SseStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// A path of elementary edges composing to an invertible code.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_code_decompose(c: *const SseCode, out: *mut *mut SsePath) -> SseStatus {
    guard(|| {
        let (Some(c), false) = (unsafe { c.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        match decompose(&c.0) {
            Ok(d) => {
                unsafe { put(out, SsePath(d.path)) };
                SseStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// # Safety
/// `c` must come from this library and not be freed twice.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_code_free(c: *mut SseCode) {
    if !c.is_null() {
        drop(unsafe { Box::from_raw(c) });
    }
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_path_from_json(json: *const c_char, out: *mut *mut SsePath) -> SseStatus {
    guard(|| {
        let Some(s) = (unsafe { read_str(json) }) else {
            return invalid("json");
        };
        if out.is_null() {
            return invalid("out");
        }
        match from_json::<SSEPath>(s) {
            Ok(p) => {
                unsafe { put(out, SsePath(p)) };
                SseStatus::Ok
            }
            Err(st) => st,
        }
    })
}

/// # Safety
/// `p` must be a live handle or null.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_path_len(p: *const SsePath) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.0.steps().len())
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_path_to_json(p: *const SsePath, out: *mut *mut c_char) -> SseStatus {
    guard(|| match (unsafe { p.as_ref() }, out.is_null()) {
        (Some(p), false) => unsafe { put_string(out, json(&p.0)) },
        _ => invalid("null pointer"),
    })
}

/// The conjugacy of a path.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_path_compose(p: *const SsePath, out: *mut *mut SseCode) -> SseStatus {
    guard(|| {
        let (Some(p), false) = (unsafe { p.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        match compose_path(&p.0) {
            Ok(c) => {
                unsafe { put(out, SseCode(c)) };
                SseStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Whether two paths with common endpoints are homotopic.
///
/// # Safety
/// `p`, `q` must be live handles; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_path_homotopic(p: *const SsePath, q: *const SsePath, out: *mut bool) -> SseStatus {
    guard(|| {
        let (Some(p), Some(q), false) = (unsafe { p.as_ref() }, unsafe { q.as_ref() }, out.is_null()) else {
            return invalid("null pointer");
        };
        match homotopic(&p.0, &q.0) {
            Ok(h) => {
                unsafe { *out = h };
                SseStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_path_free(p: *mut SsePath) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Runs a command of the `sse` tool. `args` is a JSON array of strings such
/// as `["explore", "--max-inner", "3"]`; `input` is the input document. The
/// report goes to `report` and the tool's exit status to `exit_code`.
///
/// # Safety
/// `args` and `input` must be nul-terminated strings; the out-parameters
/// must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn sse_run(
    args: *const c_char,
    input: *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> SseStatus {
    guard(|| {
        let (Some(args), Some(input)) = (unsafe { read_str(args) }, unsafe { read_str(input) }) else {
            return invalid("args or input");
        };
        if report.is_null() || exit_code.is_null() {
            return invalid("out");
        }
        let args: Vec<String> = match from_json(args) {
            Ok(a) => a,
            Err(st) => return st,
        };
        let cli = match Cli::try_parse_from(std::iter::once("sse".to_string()).chain(args)) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return SseStatus::InvalidArgument;
            }
        };
        match run(&cli, input) {
            Ok(out) => {
                unsafe { *exit_code = out.exit_code() };
                unsafe { put_string(report, json(&out.report)) }
            }
            Err(e) => {
                unsafe { *exit_code = e.exit_code() };
                fail(e)
            }
        }
    })
}
