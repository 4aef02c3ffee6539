//! C ABI over the predgc simulator.
//!
//! Conventions: every fallible call returns a [`PredgcStatus`]; results come
//! back through out-pointers. Objects handed out as opaque handles are owned
//! by the caller and released with the matching `_free` function. Strings
//! returned through `char **` out-params are released with
//! [`predgc_string_free`]. On any non-OK status, [`predgc_last_error`]
//! carries a message valid until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use predgc::baseline::CostModel;
use predgc::experiment::{self, ExperimentError, ExperimentReport};
use predgc::heap::HeapConfig;
use predgc::histogram::{delta_csv, histo_diff, Histogram};
use predgc::runtime::ExecutionMode;
use predgc::trace::{generate_synthetic, Trace, WorkloadConfig};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredgcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidArgument = 5,
    /// A reclaim-safety or partition breach; see `predgc_last_error`.
    SafetyViolation = 6,
    NotFound = 7,
    Internal = 8,
}

/// Heap capacities and thresholds.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PredgcHeapConfig {
    pub eden_capacity_bytes: u64,
    pub survivor_capacity_bytes: u64,
    pub tenured_capacity_bytes: u64,
    pub tenuring_age_threshold: u32,
    pub major_gc_occupancy_fraction: f64,
}

/// Abstract pause-cost weights.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PredgcCostModel {
    pub cost_per_swept_object: f64,
    pub cost_per_copied_byte: f64,
    pub cost_per_promoted_object: f64,
}

/// Opaque trace handle.
pub struct PredgcTrace(Trace);
/// Opaque histogram handle.
pub struct PredgcHistogram(Histogram);
/// Opaque experiment-report handle.
pub struct PredgcReport(ExperimentReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).expect("NUL stripped"));
    });
}

fn fail(status: PredgcStatus, message: String) -> PredgcStatus {
    set_last_error(message);
    status
}

fn experiment_status(err: &ExperimentError) -> PredgcStatus {
    if err.is_safety_violation() {
        PredgcStatus::SafetyViolation
    } else {
        match err {
            ExperimentError::Trace(_) | ExperimentError::MalformedTrace { .. } => {
                PredgcStatus::Parse
            }
            ExperimentError::Heap(_) => PredgcStatus::InvalidArgument,
            _ => PredgcStatus::Internal,
        }
    }
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn predgc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Releases a string returned through a `char **` out-parameter.
///
/// # Safety
/// `s` must have come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn predgc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn guard<F: FnOnce() -> PredgcStatus>(f: F) -> PredgcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(PredgcStatus::Internal, "internal panic".to_string()),
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, PredgcStatus> {
    if ptr.is_null() {
        set_last_error("null string argument".into());
        return Err(PredgcStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8".into());
        PredgcStatus::InvalidUtf8
    })
}

fn string_out(s: String, out: *mut *mut c_char) -> PredgcStatus {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => return fail(PredgcStatus::Internal, "interior NUL in output".into()),
    };
    unsafe { *out = c.into_raw() };
    PredgcStatus::Ok
}

/// Fills `out` with the default heap configuration.
///
/// # Safety
/// `out` must be null or point to writable memory for one config struct.
#[no_mangle]
pub unsafe extern "C" fn predgc_heap_config_default(out: *mut PredgcHeapConfig) -> PredgcStatus {
    if out.is_null() {
        return fail(PredgcStatus::NullArgument, "out is null".into());
    }
    let d = HeapConfig::default();
    unsafe {
        *out = PredgcHeapConfig {
            eden_capacity_bytes: d.eden_capacity_bytes,
            survivor_capacity_bytes: d.survivor_capacity_bytes,
            tenured_capacity_bytes: d.tenured_capacity_bytes,
            tenuring_age_threshold: d.tenuring_age_threshold,
            major_gc_occupancy_fraction: d.major_gc_occupancy_fraction,
        };
    }
    PredgcStatus::Ok
}

/// Fills `out` with the default cost model.
///
/// # Safety
/// `out` must be null or point to writable memory for one config struct.
#[no_mangle]
pub unsafe extern "C" fn predgc_cost_model_default(out: *mut PredgcCostModel) -> PredgcStatus {
    if out.is_null() {
        return fail(PredgcStatus::NullArgument, "out is null".into());
    }
    let d = CostModel::default();
    unsafe {
        *out = PredgcCostModel {
            cost_per_swept_object: d.cost_per_swept_object,
            cost_per_copied_byte: d.cost_per_copied_byte,
            cost_per_promoted_object: d.cost_per_promoted_object,
        };
    }
    PredgcStatus::Ok
}

/// Generates a synthetic workload trace. `allocations` is the total count,
/// rounded up to a multiple of `flows`.
///
/// # Safety
/// `out` must be null or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn predgc_trace_generate(
    seed: u64,
    flows: usize,
    allocations: usize,
    eden_mortality: f64,
    mid_lived_fraction: f64,
    long_lived_fraction: f64,
    out: *mut *mut PredgcTrace,
) -> PredgcStatus {
    guard(|| {
        if out.is_null() {
            return fail(PredgcStatus::NullArgument, "out is null".into());
        }
        if flows == 0 || allocations == 0 {
            return fail(
                PredgcStatus::InvalidArgument,
                "flows and allocations must be positive".to_string(),
            );
        }
        let mut config = WorkloadConfig::with_defaults(flows, allocations.div_ceil(flows), seed);
        config.eden_mortality = eden_mortality;
        config.mid_lived_fraction = mid_lived_fraction;
        config.long_lived_fraction = long_lived_fraction;
        match generate_synthetic(&config) {
            Ok(trace) => {
                unsafe { *out = Box::into_raw(Box::new(PredgcTrace(trace))) };
                PredgcStatus::Ok
            }
            Err(e) => fail(PredgcStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Reads a trace file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn predgc_trace_read(
    path: *const c_char,
    out: *mut *mut PredgcTrace,
) -> PredgcStatus {
    guard(|| {
        if out.is_null() {
            return fail(PredgcStatus::NullArgument, "out is null".into());
        }
        let path = match cstr_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match Trace::read_file(Path::new(path)) {
            Ok(trace) => {
                *out = Box::into_raw(Box::new(PredgcTrace(trace)));
                PredgcStatus::Ok
            }
            Err(predgc::trace::TraceError::Io(e)) => fail(PredgcStatus::Io, e.to_string()),
            Err(e) => fail(PredgcStatus::Parse, e.to_string()),
        }
    })
}

/// Writes a trace to a file.
///
/// # Safety
/// `trace` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn predgc_trace_write(
    trace: *const PredgcTrace,
    path: *const c_char,
) -> PredgcStatus {
    guard(|| {
        if trace.is_null() {
            return fail(PredgcStatus::NullArgument, "trace is null".into());
        }
        let path = match cstr_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match (*trace).0.write_file(Path::new(path)) {
            Ok(()) => PredgcStatus::Ok,
            Err(e) => fail(PredgcStatus::Io, e.to_string()),
        }
    })
}

/// Number of allocation events in the trace; 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn predgc_trace_alloc_count(trace: *const PredgcTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    (*trace).0.alloc_count()
}

/// Releases a trace handle.
///
/// # Safety
/// `trace` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn predgc_trace_free(trace: *mut PredgcTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Parses histogram text in the `jmap -histo` layout.
///
/// # Safety
/// `text` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn predgc_histogram_parse(
    text: *const c_char,
    out: *mut *mut PredgcHistogram,
) -> PredgcStatus {
    guard(|| {
        if out.is_null() {
            return fail(PredgcStatus::NullArgument, "out is null".into());
        }
        let text = match cstr_arg(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match Histogram::parse(text) {
            Ok(h) => {
                *out = Box::into_raw(Box::new(PredgcHistogram(h)));
                PredgcStatus::Ok
            }
            Err(e) => fail(PredgcStatus::Parse, e.to_string()),
        }
    })
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `histogram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn predgc_histogram_rows(histogram: *const PredgcHistogram) -> usize {
    if histogram.is_null() {
        return 0;
    }
    (*histogram).0.len()
}

/// Copies one row out; `class_name` receives a string to release with
/// `predgc_string_free`.
///
/// # Safety
/// All pointers must be valid; `histogram` a live handle.
#[no_mangle]
pub unsafe extern "C" fn predgc_histogram_row(
    histogram: *const PredgcHistogram,
    index: usize,
    rank: *mut u64,
    instances: *mut u64,
    bytes: *mut u64,
    class_name: *mut *mut c_char,
) -> PredgcStatus {
    guard(|| {
        if histogram.is_null()
            || rank.is_null()
            || instances.is_null()
            || bytes.is_null()
            || class_name.is_null()
        {
            return fail(PredgcStatus::NullArgument, "null argument".into());
        }
        let rows = (*histogram).0.rows();
        let Some(row) = rows.get(index) else {
            return fail(
                PredgcStatus::NotFound,
                format!("row {index} out of range ({} rows)", rows.len()),
            );
        };
        *rank = row.rank;
        *instances = row.instances;
        *bytes = row.bytes;
        string_out(row.class_name.clone(), class_name)
    })
}

/// Renders the per-class delta CSV between two snapshots (`new - old`).
///
/// # Safety
/// Both histograms must be live handles; `out_csv` valid.
#[no_mangle]
pub unsafe extern "C" fn predgc_histogram_diff_csv(
    old: *const PredgcHistogram,
    new: *const PredgcHistogram,
    out_csv: *mut *mut c_char,
) -> PredgcStatus {
    guard(|| {
        if old.is_null() || new.is_null() || out_csv.is_null() {
            return fail(PredgcStatus::NullArgument, "null argument".into());
        }
        let deltas = histo_diff(&(*old).0, &(*new).0);
        string_out(delta_csv(&deltas), out_csv)
    })
}

/// Releases a histogram handle.
///
/// # Safety
/// `histogram` must be null or a live handle; not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn predgc_histogram_free(histogram: *mut PredgcHistogram) {
    if !histogram.is_null() {
        drop(Box::from_raw(histogram));
    }
}

/// Replays the trace under the baseline collector and the predictive
/// collector bound to a ground-truth oracle, checking end-state equivalence.
/// Pass null configs for defaults.
///
/// # Safety
/// `trace` must be a live handle; config pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn predgc_run_comparison(
    trace: *const PredgcTrace,
    heap_config: *const PredgcHeapConfig,
    cost_model: *const PredgcCostModel,
    concurrent: bool,
    out: *mut *mut PredgcReport,
) -> PredgcStatus {
    guard(|| {
        if trace.is_null() || out.is_null() {
            return fail(PredgcStatus::NullArgument, "null argument".into());
        }
        let heap = match heap_config.as_ref() {
            Some(c) => HeapConfig {
                eden_capacity_bytes: c.eden_capacity_bytes,
                survivor_capacity_bytes: c.survivor_capacity_bytes,
                tenured_capacity_bytes: c.tenured_capacity_bytes,
                tenuring_age_threshold: c.tenuring_age_threshold,
                major_gc_occupancy_fraction: c.major_gc_occupancy_fraction,
            },
            None => HeapConfig::default(),
        };
        let cost = match cost_model.as_ref() {
            Some(c) => CostModel {
                cost_per_swept_object: c.cost_per_swept_object,
                cost_per_copied_byte: c.cost_per_copied_byte,
                cost_per_promoted_object: c.cost_per_promoted_object,
            },
            None => CostModel::default(),
        };
        let mode = if concurrent {
            ExecutionMode::Concurrent
        } else {
            ExecutionMode::Serial
        };
        match experiment::run_collector_comparison(&(*trace).0, &heap, &cost, None, mode) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(PredgcReport(report)));
                PredgcStatus::Ok
            }
            Err(e) => fail(experiment_status(&e), e.to_string()),
        }
    })
}

/// Serializes the whole report as JSON; release with `predgc_string_free`.
///
/// # Safety
/// `report` must be a live handle; `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn predgc_report_to_json(
    report: *const PredgcReport,
    out_json: *mut *mut c_char,
) -> PredgcStatus {
    guard(|| {
        if report.is_null() || out_json.is_null() {
            return fail(PredgcStatus::NullArgument, "null argument".into());
        }
        string_out((*report).0.to_json(), out_json)
    })
}

unsafe fn arm_lookup<'a>(
    report: *const PredgcReport,
    arm: *const c_char,
) -> Result<&'a experiment::ArmReport, PredgcStatus> {
    let name = cstr_arg(arm)?;
    (*report).0.arm(name).ok_or_else(|| {
        set_last_error(format!("no arm named `{name}` in report"));
        PredgcStatus::NotFound
    })
}

/// Total stop-the-world pause cost of one arm (`baseline`,
/// `predictive_oracle`, `predictive_trained`).
///
/// # Safety
/// `report` must be a live handle; `arm` a valid string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn predgc_report_arm_pause_cost(
    report: *const PredgcReport,
    arm: *const c_char,
    out: *mut f64,
) -> PredgcStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(PredgcStatus::NullArgument, "null argument".into());
        }
        match arm_lookup(report, arm) {
            Ok(a) => {
                *out = a.totals.total_pause_cost;
                PredgcStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Total live objects the GC handled on the pause path in one arm.
///
/// # Safety
/// Same contract as `predgc_report_arm_pause_cost`.
#[no_mangle]
pub unsafe extern "C" fn predgc_report_arm_live_handled(
    report: *const PredgcReport,
    arm: *const c_char,
    out: *mut u64,
) -> PredgcStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(PredgcStatus::NullArgument, "null argument".into());
        }
        match arm_lookup(report, arm) {
            Ok(a) => {
                *out = a.totals.total_live_objects_handled;
                PredgcStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Oracle-over-baseline pause ratio; `NotFound` when the baseline never
/// paused.
///
/// # Safety
/// `report` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn predgc_report_pause_ratio(
    report: *const PredgcReport,
    out: *mut f64,
) -> PredgcStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(PredgcStatus::NullArgument, "null argument".into());
        }
        match (*report).0.pause_ratio_oracle_vs_baseline {
            Some(ratio) => {
                *out = ratio;
                PredgcStatus::Ok
            }
            None => fail(PredgcStatus::NotFound, "baseline arm never paused".into()),
        }
    })
}

/// Releases a report handle.
///
/// # Safety
/// `report` must be null or a live handle; not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn predgc_report_free(report: *mut PredgcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
