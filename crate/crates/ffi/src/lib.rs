//! C interface to `flatlin`.
//!
//! Systems are parsed into an opaque `FlatlinSystem` handle. Analyses
//! return a `FlatlinStatus` and hand back the JSON report as a string that
//! must be released with `flatlin_string_free`. After any status other than
//! 0..=3, `flatlin_last_error` describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flatlin::analysis::AnalysisOptions;
use flatlin::cli::{run_on_system, Command, RunRequest};
use flatlin::format::{parse_system_file, ReportDocument, SystemFile};
use flatlin::geometry::{SamplePlan, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE};

/// Opaque parsed system together with its output candidates.
pub struct FlatlinSystem {
    file: SystemFile,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatlinStatus {
    /// Success or a verified candidate.
    Ok = 0,
    /// Refuted candidate or a failed check.
    Failed = 1,
    /// Malformed system text, unknown output or invalid argument.
    InputError = 2,
    Inconclusive = 3,
    NullPointer = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

impl FlatlinStatus {
    fn from_exit(code: i32) -> Self {
        match code {
            0 => FlatlinStatus::Ok,
            1 => FlatlinStatus::Failed,
            3 => FlatlinStatus::Inconclusive,
            _ => FlatlinStatus::InputError,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatlinOptions {
    pub seed: u64,
    pub samples: u32,
    pub tolerance: f64,
    /// Highest derivative order; 0 selects `2n + 4`.
    pub max_order: u32,
    /// Plan in the file's component order.
    pub keep_order: bool,
}

impl Default for FlatlinOptions {
    fn default() -> Self {
        FlatlinOptions {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES as u32,
            tolerance: DEFAULT_TOLERANCE,
            max_order: 0,
            keep_order: false,
        }
    }
}

impl FlatlinOptions {
    fn analysis(&self) -> AnalysisOptions {
        let plan = SamplePlan {
            seed: self.seed,
            n_samples: self.samples.max(1) as usize,
            tolerance: self.tolerance,
            ..SamplePlan::default()
        };
        AnalysisOptions { plan, cap: (self.max_order > 0).then_some(self.max_order as usize) }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, turning panics into `FLATLIN_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> FlatlinStatus) -> FlatlinStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            FlatlinStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, FlatlinStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(FlatlinStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        FlatlinStatus::InvalidUtf8
    })
}

fn emit(doc: &ReportDocument, out_json: *mut *mut c_char) -> FlatlinStatus {
    if let Some(e) = &doc.error {
        set_error(e.message.clone());
    }
    let json = CString::new(doc.to_json()).expect("JSON has no interior NUL");
    unsafe { *out_json = json.into_raw() };
    FlatlinStatus::from_exit(doc.exit_code)
}

/// Default options: seed 0xF1A7, 7 samples, tolerance 1e-8.
#[no_mangle]
pub extern "C" fn flatlin_options_default() -> FlatlinOptions {
    FlatlinOptions::default()
}

/// Parses a system description. On success `*out` receives a handle to be
/// released with `flatlin_system_free`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flatlin_system_parse(text: *const c_char, out: *mut *mut FlatlinSystem) -> FlatlinStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return FlatlinStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_system_file(text) {
            Ok(file) => {
                *out = Box::into_raw(Box::new(FlatlinSystem { file }));
                FlatlinStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                FlatlinStatus::InputError
            }
        }
    })
}

/// # Safety
/// `sys` must come from `flatlin_system_parse` (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn flatlin_system_free(sys: *mut FlatlinSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn flatlin_system_state_count(sys: *const FlatlinSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.file.model.n())
}

/// # Safety
/// `sys` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn flatlin_system_input_count(sys: *const FlatlinSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.file.model.m())
}

/// # Safety
/// `sys` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn flatlin_system_output_count(sys: *const FlatlinSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.file.candidates.len())
}

unsafe fn run(
    sys: *const FlatlinSystem,
    mut req: RunRequest,
    output: *const c_char,
    opts: *const FlatlinOptions,
    out_json: *mut *mut c_char,
) -> FlatlinStatus {
    if out_json.is_null() {
        set_error("null output pointer");
        return FlatlinStatus::NullPointer;
    }
    *out_json = ptr::null_mut();
    let Some(sys) = sys.as_ref() else {
        set_error("null system handle");
        return FlatlinStatus::NullPointer;
    };
    if !output.is_null() {
        match read_str(output) {
            Ok(o) => req.output = Some(o.to_string()),
            Err(s) => return s,
        }
    }
    let opts = opts.as_ref().copied().unwrap_or_default();
    req.options = opts.analysis();
    req.keep_order = opts.keep_order;
    emit(&run_on_system(&sys.file, &req), out_json)
}

/// Runs `command` (`reldeg`, `analyze`, `verify` or `plan`) on the output
/// named `output` (null selects the only one). The JSON report is written
/// to `*out_json`; the status mirrors the command-line exit code.
///
/// # Safety
/// Pointers must be valid; `output` and `opts` may be null.
#[no_mangle]
pub unsafe extern "C" fn flatlin_run(
    sys: *const FlatlinSystem,
    command: *const c_char,
    output: *const c_char,
    opts: *const FlatlinOptions,
    out_json: *mut *mut c_char,
) -> FlatlinStatus {
    guard(|| {
        let command = match read_str(command) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let command = match command.parse::<Command>() {
            Ok(Command::CheckPartition) => {
                set_error("use flatlin_check_partition");
                return FlatlinStatus::InputError;
            }
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return FlatlinStatus::InputError;
            }
        };
        run(sys, RunRequest::new(command), output, opts, out_json)
    })
}

/// Partition test: `partition` lists zero-based component indices and `r`
/// holds one entry per component.
///
/// # Safety
/// `partition` and `r` must point to `partition_len` and `r_len` elements.
#[no_mangle]
pub unsafe extern "C" fn flatlin_check_partition(
    sys: *const FlatlinSystem,
    output: *const c_char,
    partition: *const usize,
    partition_len: usize,
    r: *const i64,
    r_len: usize,
    opts: *const FlatlinOptions,
    out_json: *mut *mut c_char,
) -> FlatlinStatus {
    guard(|| {
        if (partition.is_null() && partition_len > 0) || (r.is_null() && r_len > 0) {
            set_error("null array argument");
            return FlatlinStatus::NullPointer;
        }
        let slice = |p: *const usize, n| if n == 0 { Vec::new() } else { std::slice::from_raw_parts(p, n).to_vec() };
        let mut req = RunRequest::new(Command::CheckPartition);
        req.partition = Some(slice(partition, partition_len));
        req.r = Some(if r_len == 0 { Vec::new() } else { std::slice::from_raw_parts(r, r_len).to_vec() });
        run(sys, req, output, opts, out_json)
    })
}

/// # Safety
/// `s` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn flatlin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn flatlin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn flatlin_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
