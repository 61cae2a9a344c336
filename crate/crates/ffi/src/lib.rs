//! C ABI over `nctest-core`.
//!
//! Reports live behind an opaque [`NctestReport`] handle. Every fallible
//! call returns an [`NctestStatus`]; on failure the message is available
//! from [`nctest_last_error_message`] on the same thread. Strings handed out
//! by the library are freed with [`nctest_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nctest_core::input::{parse_documents, Arithmetic};
use nctest_core::pipeline::{analyze, Command, Overrides, Report, RobustnessResult, Verdict};
use nctest_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NctestStatus {
    Ok = 0,
    /// Malformed or inconsistent input document.
    InvalidInput = 1,
    /// Solver or verification failure; indicates a bug.
    Internal = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// The input text is not valid UTF-8.
    InvalidUtf8 = 4,
    /// The requested value does not exist for this report.
    NotAvailable = 5,
}

/// Enum arguments must be one of the listed constants; any other integer is
/// undefined behaviour.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NctestCommand {
    Check = 0,
    Robustness = 1,
    Report = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NctestVerdict {
    Classical = 0,
    Nonclassical = 1,
}

/// Must be one of the listed constants, like every enum argument.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NctestArithmetic {
    /// Whatever the document asks for (exact for GPT input, float for quantum).
    Default = 0,
    Exact = 1,
    Float = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NctestRobustnessKind {
    /// The value holds the minimal noise level (0 when classical).
    Value = 0,
    /// Nonclassical and no noise level up to 1 suffices.
    InfeasibleAtFullNoise = 1,
    /// Nonclassical and the command did not ask for robustness.
    NotComputed = 2,
}

/// Overrides applied on top of the document's own options.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NctestOptions {
    pub arithmetic: NctestArithmetic,
    /// Float tolerance; zero or negative keeps the document's value.
    pub tolerance: f64,
    /// Skip positivity and normalisation checks on the input.
    pub skip_validation: bool,
}

/// An analysed document. Opaque to C.
pub struct NctestReport {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, turning panics into [`NctestStatus::Internal`].
fn guard(f: impl FnOnce() -> NctestStatus) -> NctestStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            NctestStatus::Internal
        }
    }
}

fn fail(e: &Error) -> NctestStatus {
    set_error(e.to_string());
    if e.is_input_error() {
        NctestStatus::InvalidInput
    } else {
        NctestStatus::Internal
    }
}

fn null_arg(name: &str) -> NctestStatus {
    set_error(format!("{name} is null"));
    NctestStatus::NullPointer
}

fn overrides(options: Option<&NctestOptions>) -> Overrides {
    let mut ov = Overrides::default();
    if let Some(o) = options {
        ov.arithmetic = match o.arithmetic {
            NctestArithmetic::Default => None,
            NctestArithmetic::Exact => Some(Arithmetic::Exact),
            NctestArithmetic::Float => Some(Arithmetic::Float),
        };
        if o.tolerance > 0.0 {
            ov.tolerance = Some(o.tolerance);
        }
        ov.skip_validation = o.skip_validation;
    }
    ov
}

/// Analyses one JSON input document (batches are rejected; call once per
/// document). On success `*out` receives a handle to free with
/// [`nctest_report_free`]; on failure `*out` is set to null.
///
/// # Safety
/// `json` must be a NUL-terminated string; `options` may be null; `out` must
/// point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn nctest_analyze(
    json: *const c_char,
    command: NctestCommand,
    options: *const NctestOptions,
    out: *mut *mut NctestReport,
) -> NctestStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        // SAFETY: checked non-null; the caller provides writable storage.
        unsafe { *out = ptr::null_mut() };
        if json.is_null() {
            return null_arg("json");
        }
        // SAFETY: the caller guarantees a NUL-terminated string.
        let Ok(text) = (unsafe { CStr::from_ptr(json) }).to_str() else {
            set_error("input is not valid UTF-8");
            return NctestStatus::InvalidUtf8;
        };
        // SAFETY: null or a valid options struct, per the contract.
        let options = unsafe { options.as_ref() };
        let cmd = match command {
            NctestCommand::Check => Command::Check,
            NctestCommand::Robustness => Command::Robustness,
            NctestCommand::Report => Command::Report,
        };
        let docs = match parse_documents(text) {
            Ok((_, true)) => {
                set_error("batches are not supported; analyse each document separately");
                return NctestStatus::InvalidInput;
            }
            Ok((docs, false)) => docs,
            Err(e) => return fail(&e),
        };
        match analyze(&docs[0], cmd, &overrides(options)) {
            Ok(report) => {
                // SAFETY: as above.
                unsafe { *out = Box::into_raw(Box::new(NctestReport { report })) };
                NctestStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `report` must be a live handle from [`nctest_analyze`]; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nctest_report_verdict(
    report: *const NctestReport,
    verdict: *mut NctestVerdict,
) -> NctestStatus {
    guard(|| {
        // SAFETY: null or a live handle, per the contract.
        let Some(r) = (unsafe { report.as_ref() }) else { return null_arg("report") };
        if verdict.is_null() {
            return null_arg("verdict");
        }
        let v = match r.report.verdict {
            Verdict::Classical => NctestVerdict::Classical,
            Verdict::Nonclassical => NctestVerdict::Nonclassical,
        };
        // SAFETY: checked non-null.
        unsafe { *verdict = v };
        NctestStatus::Ok
    })
}

/// Writes the kind and, for [`NctestRobustnessKind::Value`], the value
/// (NaN otherwise). `value` may be null when only the kind is wanted.
///
/// # Safety
/// `report` must be a live handle; `kind` must be writable; `value` null or writable.
#[no_mangle]
pub unsafe extern "C" fn nctest_report_robustness(
    report: *const NctestReport,
    kind: *mut NctestRobustnessKind,
    value: *mut f64,
) -> NctestStatus {
    guard(|| {
        // SAFETY: null or a live handle, per the contract.
        let Some(r) = (unsafe { report.as_ref() }) else { return null_arg("report") };
        if kind.is_null() {
            return null_arg("kind");
        }
        let (k, v) = match &r.report.robustness {
            RobustnessResult::Value { value, .. } => (NctestRobustnessKind::Value, *value),
            RobustnessResult::InfeasibleAtFullNoise => (NctestRobustnessKind::InfeasibleAtFullNoise, f64::NAN),
            RobustnessResult::NotComputed => (NctestRobustnessKind::NotComputed, f64::NAN),
        };
        // SAFETY: `kind` checked non-null; `value` written only when non-null.
        unsafe {
            *kind = k;
            if !value.is_null() {
                *value = v;
            }
        }
        NctestStatus::Ok
    })
}

/// The exact robustness as `"p/q"`, when the analysis ran in exact
/// arithmetic and a value exists; otherwise [`NctestStatus::NotAvailable`].
/// Free the string with [`nctest_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nctest_report_robustness_exact(
    report: *const NctestReport,
    out: *mut *mut c_char,
) -> NctestStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        // SAFETY: checked non-null.
        unsafe { *out = ptr::null_mut() };
        // SAFETY: null or a live handle, per the contract.
        let Some(r) = (unsafe { report.as_ref() }) else { return null_arg("report") };
        match &r.report.robustness {
            RobustnessResult::Value { exact: Some(s), .. } => {
                let s = CString::new(s.as_str()).expect("rationals contain no NUL");
                // SAFETY: checked non-null.
                unsafe { *out = s.into_raw() };
                NctestStatus::Ok
            }
            _ => {
                set_error("no exact robustness value for this report");
                NctestStatus::NotAvailable
            }
        }
    })
}

/// The report as pretty-printed JSON (`quiet` keeps only verdict and
/// robustness). Returns null on failure. Free with [`nctest_string_free`].
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nctest_report_to_json(report: *const NctestReport, quiet: bool) -> *mut c_char {
    let mut text = ptr::null_mut();
    guard(|| {
        // SAFETY: null or a live handle, per the contract.
        let Some(r) = (unsafe { report.as_ref() }) else { return null_arg("report") };
        let value = if quiet { r.report.quiet_json() } else { r.report.json.clone() };
        match serde_json::to_string_pretty(&value) {
            Ok(s) => {
                text = CString::new(s).expect("JSON escapes NUL").into_raw();
                NctestStatus::Ok
            }
            Err(e) => {
                set_error(format!("serialising report: {e}"));
                NctestStatus::Internal
            }
        }
    });
    text
}

/// # Safety
/// `report` must be null or a handle from [`nctest_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nctest_report_free(report: *mut NctestReport) {
    if !report.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nctest_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string came from CString::into_raw and is freed once.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread; do not free.
#[no_mangle]
pub extern "C" fn nctest_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nctest_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
