//! C interface to the drb library: expression evaluation, identity
//! checks, and the built-in worked examples, behind opaque handles.
//!
//! Conventions:
//!
//! * every returned `char*` is owned by the caller and released with
//!   [`drb_string_free`] (except [`drb_version`], which is static);
//! * functions returning [`DrbStatus`] use `DRB_STATUS_OK` (0) for
//!   success, `DRB_STATUS_CHECK_FAILED` (1) for a completed check that
//!   found counterexamples, and `DRB_STATUS_ERROR` (2) for usage, parse
//!   or evaluation errors; these are the codes the command-line tool
//!   exits with;
//! * after an error, [`drb_last_error`] returns the message for the
//!   current thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use drb::scalar::Rational;
use drb::text::{
    eval_str, line_col, run_check, run_golden_cases, value_json, AlgebraKind, CheckOptions,
    Context, LambdaMode,
};

/// Opaque evaluation context: an algebra, a weight mode, and the series
/// truncation order.
pub struct DrbContext {
    ctx: Context,
}

/// Result codes shared with the command-line tool.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum DrbStatus {
    Ok = 0,
    CheckFailed = 1,
    Error = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// The last error message on this thread, or null. Caller frees the
/// string with [`drb_string_free`].
#[no_mangle]
pub extern "C" fn drb_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// The library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn drb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Frees a string returned by this library. Null is accepted.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn drb_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe {
            drop(CString::from_raw(s));
        }
    }
}

fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, String> {
    if ptr.is_null() {
        return Err(format!("{what} must not be null"));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| format!("{what} must be valid UTF-8"))
}

fn parse_weight(spec: Option<&str>) -> Result<LambdaMode, String> {
    match spec {
        None | Some("formal") => Ok(LambdaMode::Formal),
        Some(s) => {
            let q: Rational = s.parse().map_err(|e| format!("bad weight `{s}`: {e}"))?;
            Ok(LambdaMode::Specialized(q))
        }
    }
}

/// Creates an evaluation context. `algebra` is one of `freediff-comm`,
/// `freediff-nc`, `sha`, `forests`, `decorated`, `hurwitz`; `lambda` is
/// `"formal"`, a rational string like `"2"` or `"-1/3"`, or null for
/// formal. Returns null on error.
///
/// # Safety
/// `algebra` must be a valid nul-terminated string; `lambda` must be null
/// or a valid nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn drb_context_new(
    algebra: *const c_char,
    lambda: *const c_char,
    order: u32,
) -> *mut DrbContext {
    clear_error();
    let inner = (|| -> Result<Context, String> {
        let algebra_name = read_str(algebra, "algebra")?;
        let algebra = AlgebraKind::parse(algebra_name).ok_or_else(|| {
            format!(
                "unknown algebra `{algebra_name}`; available: {}",
                AlgebraKind::NAMES.join(", ")
            )
        })?;
        let lambda = if lambda.is_null() {
            LambdaMode::Formal
        } else {
            parse_weight(Some(read_str(lambda, "lambda")?))?
        };
        Ok(Context { algebra, lambda, order: order as usize })
    })();
    match inner {
        Ok(ctx) => Box::into_raw(Box::new(DrbContext { ctx })),
        Err(e) => {
            set_error(e);
            ptr::null_mut()
        }
    }
}

/// Releases a context. Null is accepted.
///
/// # Safety
/// `ctx` must be null or a pointer returned by [`drb_context_new`] and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn drb_context_free(ctx: *mut DrbContext) {
    if !ctx.is_null() {
        unsafe {
            drop(Box::from_raw(ctx));
        }
    }
}

/// Evaluates an expression in the context. On success writes the
/// canonical text (or JSON when `as_json` is set) to `*out` and returns
/// `DRB_STATUS_OK`; on error returns `DRB_STATUS_ERROR` and leaves `*out`
/// null.
///
/// # Safety
/// `ctx` must be a live context from [`drb_context_new`], `input` a valid
/// nul-terminated string, and `out` a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn drb_eval(
    ctx: *const DrbContext,
    input: *const c_char,
    as_json: bool,
    out: *mut *mut c_char,
) -> DrbStatus {
    clear_error();
    if out.is_null() {
        set_error("out must not be null");
        return DrbStatus::Error;
    }
    unsafe {
        *out = ptr::null_mut();
    }
    let result = (|| -> Result<String, String> {
        if ctx.is_null() {
            return Err("context must not be null".into());
        }
        let ctx = unsafe { &(*ctx).ctx };
        let input = read_str(input, "input")?;
        match eval_str(input, ctx) {
            Ok(v) => Ok(if as_json {
                serde_json::to_string_pretty(&value_json(&v)).expect("json")
            } else {
                v.to_string()
            }),
            Err(e) => {
                let (line, col) = line_col(input, e.span.start);
                Err(format!("error at {line}:{col}: {e}"))
            }
        }
    })();
    match result {
        Ok(text) => {
            let text = CString::new(text.replace('\0', " ")).expect("no interior nul");
            unsafe {
                *out = text.into_raw();
            }
            DrbStatus::Ok
        }
        Err(e) => {
            set_error(e);
            DrbStatus::Error
        }
    }
}

/// Runs a named identity check (`leibniz`, `rb`, `section`, `hom`) over a
/// named algebra; see the library documentation for the algebra names.
/// `weight` (nullable) specializes the degenerate instance. The report is
/// written to `*out_report` even when the check fails; the status tells
/// the outcome apart.
///
/// # Safety
/// `identity` and `algebra` must be valid nul-terminated strings;
/// `weight` must be null or a valid nul-terminated string; `out_report`
/// must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn drb_check(
    identity: *const c_char,
    algebra: *const c_char,
    samples: u32,
    seed: u64,
    order: u32,
    weight: *const c_char,
    as_json: bool,
    out_report: *mut *mut c_char,
) -> DrbStatus {
    clear_error();
    if out_report.is_null() {
        set_error("out_report must not be null");
        return DrbStatus::Error;
    }
    unsafe {
        *out_report = ptr::null_mut();
    }
    let result = (|| -> Result<(String, bool), String> {
        let identity = read_str(identity, "identity")?;
        let algebra = read_str(algebra, "algebra")?;
        let weight = if weight.is_null() {
            None
        } else {
            match parse_weight(Some(read_str(weight, "weight")?))? {
                LambdaMode::Formal => None,
                LambdaMode::Specialized(q) => Some(q),
            }
        };
        let opts = CheckOptions { samples, seed, order: order as usize, weight };
        let report = run_check(identity, algebra, &opts).map_err(|e| e.to_string())?;
        let text = if as_json {
            serde_json::to_string_pretty(&report.to_json()).expect("json")
        } else {
            report.to_string()
        };
        Ok((text, report.pass()))
    })();
    match result {
        Ok((text, pass)) => {
            let text = CString::new(text.replace('\0', " ")).expect("no interior nul");
            unsafe {
                *out_report = text.into_raw();
            }
            if pass {
                DrbStatus::Ok
            } else {
                DrbStatus::CheckFailed
            }
        }
        Err(e) => {
            set_error(e);
            DrbStatus::Error
        }
    }
}

/// Replays the built-in worked examples. Writes one line per case (or a
/// JSON report) and returns `DRB_STATUS_OK` when everything matches.
///
/// # Safety
/// `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn drb_examples(as_json: bool, out: *mut *mut c_char) -> DrbStatus {
    clear_error();
    if out.is_null() {
        set_error("out must not be null");
        return DrbStatus::Error;
    }
    let results = run_golden_cases();
    let all_ok = results.iter().all(|(_, _, ok)| *ok);
    let text = if as_json {
        let items: Vec<_> = results
            .iter()
            .map(|(name, rendered, ok)| {
                serde_json::json!({ "name": name, "result": rendered, "ok": ok })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "cases": items, "pass": all_ok }))
            .expect("json")
    } else {
        results
            .iter()
            .map(|(name, rendered, ok)| {
                format!("{} {name}: {rendered}", if *ok { "ok  " } else { "FAIL" })
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let text = CString::new(text.replace('\0', " ")).expect("no interior nul");
    unsafe {
        *out = text.into_raw();
    }
    if all_ok {
        DrbStatus::Ok
    } else {
        DrbStatus::CheckFailed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
        unsafe { drb_string_free(ptr) };
        s
    }

    #[test]
    fn eval_through_the_c_surface() {
        let ctx = unsafe { drb_context_new(c("forests").as_ptr(), ptr::null(), 5) };
        assert!(!ctx.is_null());
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe { drb_eval(ctx, c("[.|.] * [.]").as_ptr(), false, &mut out) };
        assert!(matches!(status, DrbStatus::Ok));
        assert_eq!(take_string(out), "L*[.|.] + [.|[.]] + [[.|.]]");

        // parse errors surface through the status and the message
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe { drb_eval(ctx, c("[.|.").as_ptr(), false, &mut out) };
        assert!(matches!(status, DrbStatus::Error));
        assert!(out.is_null());
        let err = take_string(drb_last_error());
        assert!(err.contains("expected"), "{err}");
        unsafe { drb_context_free(ctx) };
    }

    #[test]
    fn eval_json_and_specialized_weight() {
        let ctx = unsafe { drb_context_new(c("forests").as_ptr(), c("2").as_ptr(), 5) };
        assert!(!ctx.is_null());
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe { drb_eval(ctx, c("[.] * [.]").as_ptr(), true, &mut out) };
        assert!(matches!(status, DrbStatus::Ok));
        let text = take_string(out);
        let v: serde_json::Value = text.parse::<serde_json::Value>().unwrap();
        assert_eq!(v["algebra"], "forests");
        unsafe { drb_context_free(ctx) };
    }

    #[test]
    fn bad_algebra_is_reported() {
        let ctx = unsafe { drb_context_new(c("rings").as_ptr(), ptr::null(), 5) };
        assert!(ctx.is_null());
        let err = take_string(drb_last_error());
        assert!(err.contains("unknown algebra"), "{err}");
    }

    #[test]
    fn check_through_the_c_surface() {
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            drb_check(c("rb").as_ptr(), c("forests").as_ptr(), 50, 7, 5, ptr::null(), false, &mut out)
        };
        assert!(matches!(status, DrbStatus::Ok));
        assert!(take_string(out).contains("pass"));

        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            drb_check(
                c("rb").as_ptr(),
                c("broken-forests").as_ptr(),
                50,
                7,
                5,
                ptr::null(),
                true,
                &mut out,
            )
        };
        assert!(matches!(status, DrbStatus::CheckFailed));
        let report: serde_json::Value = take_string(out).parse().unwrap();
        assert_eq!(report["pass"], false);

        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            drb_check(c("nonsense").as_ptr(), c("forests").as_ptr(), 50, 7, 5, ptr::null(), false, &mut out)
        };
        assert!(matches!(status, DrbStatus::Error));
    }

    #[test]
    fn examples_pass() {
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe { drb_examples(false, &mut out) };
        assert!(matches!(status, DrbStatus::Ok));
        let text = take_string(out);
        assert!(text.contains("forest-product"));
    }

    #[test]
    fn version_is_static() {
        let v = unsafe { CStr::from_ptr(drb_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn generated_header_compiles_as_c() {
        let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/drb.h");
        assert!(std::path::Path::new(header).exists(), "header not generated");
        let status = std::process::Command::new("cc")
            .args(["-fsyntax-only", "-x", "c", header])
            .status();
        match status {
            Ok(s) => assert!(s.success(), "cc rejected the generated header"),
            Err(_) => eprintln!("cc unavailable; skipped header syntax check"),
        }
    }
}
