//! C ABI over the core toolkit: opaque deployment handles, status codes,
//! and flat-argument entry points so any language with a C FFI can drive
//! the detector closed forms, the selection metrics, and the emitter/pair
//! selection.
//!
//! Conventions:
//! - Every function returns a [`BibcStatus`]; outputs go through pointers
//!   that are written only on `BIBC_STATUS_OK`.
//! - `bibc_deployment_*` handles are created and freed here; passing a
//!   handle to any other allocator is undefined behavior.
//! - On failure, [`bibc_last_error_message`] returns a thread-local,
//!   NUL-terminated description valid until the next failing call on the
//!   same thread.
//!
//! The matching header is generated into `include/bibc.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use bibc_core::channel::make_probing_signal;
use bibc_core::detector::{closed_form_pe, monte_carlo_ber, DetectorConfig, ReaderPolicy};
use bibc_core::geometry::{parse_deployment, Deployment, Point, Rectangle};
use bibc_core::metrics::{lambda1, lambda2, lambda3, MetricContext};
use bibc_core::selection::{
    benchmark_pair, default_boundary_step, select_ce, select_pair, snr_gap_db, PgdSettings,
};
use bibc_core::Error;

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BibcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    DegenerateGeometry = 4,
    InfeasibleGeometry = 5,
    ParseError = 6,
    IoError = 7,
    Utf8Error = 8,
    Panic = 9,
}

/// How readers are assigned while an emitter transmits.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BibcReaderPolicy {
    /// Every AP except the slot's emitter reads.
    AllOthers = 0,
    /// Only APs outside the emitter set read.
    Complement = 1,
}

/// Opaque deployment handle.
pub struct BibcDeployment {
    inner: Deployment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let cstring = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &Error) -> BibcStatus {
    match err {
        Error::DegenerateGeometry(_) => BibcStatus::DegenerateGeometry,
        Error::InvalidArgument(_) => BibcStatus::InvalidArgument,
        Error::InvalidConfig(_) => BibcStatus::InvalidConfig,
        Error::InfeasibleGeometry(_) => BibcStatus::InfeasibleGeometry,
        Error::Parse(_) => BibcStatus::ParseError,
        Error::Io(_) => BibcStatus::IoError,
    }
}

fn fail(err: Error) -> BibcStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Run `body`, converting errors and panics into status codes.
fn guarded(body: impl FnOnce() -> Result<(), BibcStatus>) -> BibcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BibcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            BibcStatus::Panic
        }
    }
}

fn null_check<T>(ptr: *const T, name: &str) -> Result<(), BibcStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} is null"));
        return Err(BibcStatus::NullPointer);
    }
    Ok(())
}

unsafe fn deployment<'a>(handle: *const BibcDeployment) -> Result<&'a Deployment, BibcStatus> {
    null_check(handle, "deployment handle")?;
    Ok(&(*handle).inner)
}

fn map_err<T>(result: bibc_core::Result<T>) -> Result<T, BibcStatus> {
    result.map_err(fail)
}

/// Message describing the most recent failure on this thread, or null if
/// none has occurred. Valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn bibc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |msg| msg.as_ptr())
    })
}

/// Create a deployment from coordinate arrays `xs[i], ys[i]` (meters) of
/// length `num_aps`, a common antenna count, and the coverage rectangle.
///
/// # Safety
/// `xs` and `ys` must point to `num_aps` readable doubles; `out` must be a
/// valid pointer. The returned handle must be released with
/// [`bibc_deployment_free`].
#[no_mangle]
pub unsafe extern "C" fn bibc_deployment_new(
    xs: *const f64,
    ys: *const f64,
    num_aps: usize,
    antennas_per_ap: usize,
    coverage_center_x: f64,
    coverage_center_y: f64,
    coverage_width: f64,
    coverage_height: f64,
    out: *mut *mut BibcDeployment,
) -> BibcStatus {
    guarded(|| {
        null_check(xs, "xs")?;
        null_check(ys, "ys")?;
        null_check(out, "out")?;
        let xs = slice::from_raw_parts(xs, num_aps);
        let ys = slice::from_raw_parts(ys, num_aps);
        let aps = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| Point::new(x, y))
            .collect();
        let coverage = map_err(Rectangle::new(
            Point::new(coverage_center_x, coverage_center_y),
            coverage_width,
            coverage_height,
        ))?;
        let dep = map_err(Deployment::new(aps, antennas_per_ap, coverage))?;
        *out = Box::into_raw(Box::new(BibcDeployment { inner: dep }));
        Ok(())
    })
}

/// Parse a deployment from the documented text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid. The handle
/// must be released with [`bibc_deployment_free`].
#[no_mangle]
pub unsafe extern "C" fn bibc_deployment_from_text(
    text: *const c_char,
    out: *mut *mut BibcDeployment,
) -> BibcStatus {
    guarded(|| {
        null_check(text, "text")?;
        null_check(out, "out")?;
        let text = CStr::from_ptr(text).to_str().map_err(|_| {
            set_error("deployment text is not valid UTF-8");
            BibcStatus::Utf8Error
        })?;
        let dep = map_err(parse_deployment(text))?;
        *out = Box::into_raw(Box::new(BibcDeployment { inner: dep }));
        Ok(())
    })
}

/// Release a deployment handle. A null handle is a no-op.
///
/// # Safety
/// `handle` must have been returned by a `bibc_deployment_*` constructor
/// and not freed before.
#[no_mangle]
pub unsafe extern "C" fn bibc_deployment_free(handle: *mut BibcDeployment) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of APs in the deployment.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bibc_deployment_num_aps(
    handle: *const BibcDeployment,
    out: *mut usize,
) -> BibcStatus {
    guarded(|| {
        let dep = deployment(handle)?;
        null_check(out, "out")?;
        *out = dep.num_aps();
        Ok(())
    })
}

unsafe fn emitter_set(ce: *const usize, n_ce: usize) -> Result<Vec<usize>, BibcStatus> {
    null_check(ce, "ce")?;
    Ok(slice::from_raw_parts(ce, n_ce).to_vec())
}

fn reader_policy(policy: BibcReaderPolicy) -> ReaderPolicy {
    match policy {
        BibcReaderPolicy::AllOthers => ReaderPolicy::AllOthers,
        BibcReaderPolicy::Complement => ReaderPolicy::Complement,
    }
}

/// Exact detector error probability for a device at `(bd_x, bd_y)`, from
/// geometry alone. `transmit_power` is linear under unit-variance noise;
/// the transmit SNR is `transmit_power * tau_d`.
///
/// # Safety
/// `handle`, `ce`, and the out pointers must be valid; `ce` must point to
/// `n_ce` readable indices.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bibc_closed_form_pe(
    handle: *const BibcDeployment,
    bd_x: f64,
    bd_y: f64,
    gamma0: f64,
    gamma1: f64,
    transmit_power: f64,
    tau_d: usize,
    ce: *const usize,
    n_ce: usize,
    policy: BibcReaderPolicy,
    out_pe: *mut f64,
    out_argument: *mut f64,
) -> BibcStatus {
    guarded(|| {
        let dep = deployment(handle)?;
        null_check(out_pe, "out_pe")?;
        null_check(out_argument, "out_argument")?;
        let ce_set = emitter_set(ce, n_ce)?;
        let cfg = map_err(DetectorConfig::equal_priors(
            gamma0,
            gamma1,
            ce_set,
            reader_policy(policy),
        ))?;
        let phi = map_err(make_probing_signal(
            dep.antennas_per_ap(),
            tau_d,
            transmit_power,
        ))?;
        let pe = map_err(closed_form_pe(dep, Point::new(bd_x, bd_y), &cfg, &phi))?;
        *out_pe = pe.pe;
        *out_argument = pe.argument;
        Ok(())
    })
}

/// Monte-Carlo bit-error estimate over the full simulate→detect pipeline.
///
/// # Safety
/// Pointer arguments as in [`bibc_closed_form_pe`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bibc_monte_carlo_ber(
    handle: *const BibcDeployment,
    bd_x: f64,
    bd_y: f64,
    gamma0: f64,
    gamma1: f64,
    transmit_power: f64,
    tau_d: usize,
    ce: *const usize,
    n_ce: usize,
    policy: BibcReaderPolicy,
    n_trials: usize,
    seed: u64,
    out_ber: *mut f64,
    out_ci_halfwidth: *mut f64,
) -> BibcStatus {
    guarded(|| {
        let dep = deployment(handle)?;
        null_check(out_ber, "out_ber")?;
        null_check(out_ci_halfwidth, "out_ci_halfwidth")?;
        let ce_set = emitter_set(ce, n_ce)?;
        let cfg = map_err(DetectorConfig::equal_priors(
            gamma0,
            gamma1,
            ce_set,
            reader_policy(policy),
        ))?;
        let phi = map_err(make_probing_signal(
            dep.antennas_per_ap(),
            tau_d,
            transmit_power,
        ))?;
        let mc = map_err(monte_carlo_ber(
            dep,
            Point::new(bd_x, bd_y),
            &cfg,
            &phi,
            n_trials,
            seed,
        ))?;
        *out_ber = mc.ber;
        *out_ci_halfwidth = mc.ci_halfwidth;
        Ok(())
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn lambda_common(
    handle: *const BibcDeployment,
    bd_x: f64,
    bd_y: f64,
    ce: *const usize,
    n_ce: usize,
    slots: usize,
    out: *mut f64,
    which: u8,
) -> BibcStatus {
    guarded(|| {
        let dep = deployment(handle)?;
        null_check(out, "out")?;
        let ce_set = emitter_set(ce, n_ce)?;
        let ctx = map_err(MetricContext::new(
            dep,
            Point::new(bd_x, bd_y),
            ce_set,
            slots,
        ))?;
        let value = map_err(match which {
            1 => lambda1(&ctx),
            2 => lambda2(&ctx),
            _ => lambda3(&ctx),
        })?;
        *out = value;
        Ok(())
    })
}

/// Rotating-emitter figure of merit Λ1 (readers: all APs but the slot's
/// emitter). Requires `slots == n_ce`.
///
/// # Safety
/// Pointer arguments as in [`bibc_closed_form_pe`].
#[no_mangle]
pub unsafe extern "C" fn bibc_lambda1(
    handle: *const BibcDeployment,
    bd_x: f64,
    bd_y: f64,
    ce: *const usize,
    n_ce: usize,
    slots: usize,
    out: *mut f64,
) -> BibcStatus {
    lambda_common(handle, bd_x, bd_y, ce, n_ce, slots, out, 1)
}

/// Nearest-emitter figure of merit Λ2 over `slots` slots.
///
/// # Safety
/// Pointer arguments as in [`bibc_closed_form_pe`].
#[no_mangle]
pub unsafe extern "C" fn bibc_lambda2(
    handle: *const BibcDeployment,
    bd_x: f64,
    bd_y: f64,
    ce: *const usize,
    n_ce: usize,
    slots: usize,
    out: *mut f64,
) -> BibcStatus {
    lambda_common(handle, bd_x, bd_y, ce, n_ce, slots, out, 2)
}

/// Simultaneous-emitter figure of merit Λ3 (readers: complement of the
/// emitter set). Requires `slots == n_ce` and at least one reader.
///
/// # Safety
/// Pointer arguments as in [`bibc_closed_form_pe`].
#[no_mangle]
pub unsafe extern "C" fn bibc_lambda3(
    handle: *const BibcDeployment,
    bd_x: f64,
    bd_y: f64,
    ce: *const usize,
    n_ce: usize,
    slots: usize,
    out: *mut f64,
) -> BibcStatus {
    lambda_common(handle, bd_x, bd_y, ce, n_ce, slots, out, 3)
}

/// Choose the emitter maximizing the worst case over the region via
/// multi-start projected gradient descent.
///
/// # Safety
/// `handle` and the out pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bibc_select_ce(
    handle: *const BibcDeployment,
    region_center_x: f64,
    region_center_y: f64,
    region_width: f64,
    region_height: f64,
    learning_rate: f64,
    max_iterations: usize,
    convergence_tol: f64,
    starts_x: usize,
    starts_y: usize,
    out_ce: *mut usize,
    out_worst_x: *mut f64,
    out_worst_y: *mut f64,
    out_worst_value: *mut f64,
) -> BibcStatus {
    guarded(|| {
        let dep = deployment(handle)?;
        null_check(out_ce, "out_ce")?;
        null_check(out_worst_x, "out_worst_x")?;
        null_check(out_worst_y, "out_worst_y")?;
        null_check(out_worst_value, "out_worst_value")?;
        let region = map_err(Rectangle::new(
            Point::new(region_center_x, region_center_y),
            region_width,
            region_height,
        ))?;
        let settings = PgdSettings {
            learning_rate,
            max_iterations,
            convergence_tol,
            starts_x,
            starts_y,
        };
        let sel = map_err(select_ce(dep, &region, &settings))?;
        *out_ce = sel.ce_index;
        *out_worst_x = sel.worst_point.x;
        *out_worst_y = sel.worst_point.y;
        *out_worst_value = sel.worst_value;
        Ok(())
    })
}

/// Choose the emitter-reader pair by the pruned boundary search. A
/// non-positive `boundary_step` selects the default (perimeter/400).
///
/// # Safety
/// `handle` and the out pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bibc_select_pair(
    handle: *const BibcDeployment,
    region_center_x: f64,
    region_center_y: f64,
    region_width: f64,
    region_height: f64,
    kappa: usize,
    boundary_step: f64,
    out_ce: *mut usize,
    out_reader: *mut usize,
    out_worst_x: *mut f64,
    out_worst_y: *mut f64,
    out_worst_value: *mut f64,
) -> BibcStatus {
    guarded(|| {
        let dep = deployment(handle)?;
        null_check(out_ce, "out_ce")?;
        null_check(out_reader, "out_reader")?;
        null_check(out_worst_x, "out_worst_x")?;
        null_check(out_worst_y, "out_worst_y")?;
        null_check(out_worst_value, "out_worst_value")?;
        let region = map_err(Rectangle::new(
            Point::new(region_center_x, region_center_y),
            region_width,
            region_height,
        ))?;
        let step = if boundary_step > 0.0 {
            boundary_step
        } else {
            default_boundary_step(&region)
        };
        let sel = map_err(select_pair(dep, &region, kappa, step))?;
        *out_ce = sel.ce_index;
        *out_reader = sel.reader_index;
        *out_worst_x = sel.worst_point.x;
        *out_worst_y = sel.worst_point.y;
        *out_worst_value = sel.worst_value;
        Ok(())
    })
}

/// Benchmark pair: the two APs nearest the region centroid.
///
/// # Safety
/// `handle` and the out pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bibc_benchmark_pair(
    handle: *const BibcDeployment,
    region_center_x: f64,
    region_center_y: f64,
    region_width: f64,
    region_height: f64,
    out_ce: *mut usize,
    out_reader: *mut usize,
    out_worst_x: *mut f64,
    out_worst_y: *mut f64,
    out_worst_value: *mut f64,
) -> BibcStatus {
    guarded(|| {
        let dep = deployment(handle)?;
        null_check(out_ce, "out_ce")?;
        null_check(out_reader, "out_reader")?;
        null_check(out_worst_x, "out_worst_x")?;
        null_check(out_worst_y, "out_worst_y")?;
        null_check(out_worst_value, "out_worst_value")?;
        let region = map_err(Rectangle::new(
            Point::new(region_center_x, region_center_y),
            region_width,
            region_height,
        ))?;
        let sel = map_err(benchmark_pair(dep, &region))?;
        *out_ce = sel.ce_index;
        *out_reader = sel.reader_index;
        *out_worst_x = sel.worst_point.x;
        *out_worst_y = sel.worst_point.y;
        *out_worst_value = sel.worst_value;
        Ok(())
    })
}

/// Transmit-SNR gap `10·log10(metric_a/metric_b)` in dB.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bibc_snr_gap_db(
    metric_a: f64,
    metric_b: f64,
    out: *mut f64,
) -> BibcStatus {
    guarded(|| {
        null_check(out, "out")?;
        *out = map_err(snr_gap_db(metric_a, metric_b))?;
        Ok(())
    })
}
