//! C ABI over the cqiqa toolkit.
//!
//! Images are opaque `CqiqaImage` handles owned by the caller and released
//! with `cqiqa_image_free`. Every fallible call returns a `CqiqaStatus` and
//! writes its result through an out pointer. On failure a message is kept
//! per thread and can be read with `cqiqa_last_error_message`.
//!
//! No panic crosses the boundary: each entry point catches unwinding and
//! reports `CQIQA_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cqiqa::dataset::{normalize_mos, NormalizationParams};
use cqiqa::distort::uniform_quantize;
use cqiqa::imgcore::{load_image, ImageError, RasterImage};
use cqiqa::metrics::{evaluate_all, evaluate_metric, ChannelMode, HvsParams, MetricError, MetricId, SsimParams};
use cqiqa::stats::{krocc, srocc, StatsError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqiqaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    DimensionMismatch = 4,
    Degenerate = 5,
    Panic = 6,
}

/// The nine measures, in evaluation-table column order.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqiqaMetric {
    Psnr = 0,
    Ssim = 1,
    Mssim = 2,
    Vsnr = 3,
    Vifp = 4,
    Uqi = 5,
    Nqm = 6,
    Wsnr = 7,
    Snr = 8,
}

/// Number of measures written by `cqiqa_evaluate_all`.
pub const CQIQA_METRIC_COUNT: usize = 9;

/// Opaque 8-bit RGB image.
pub struct CqiqaImage {
    inner: RasterImage,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CqiqaStatus, String);

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        let mut root = &e;
        while let MetricError::Tagged { source, .. } = root {
            root = source;
        }
        let status = match root {
            MetricError::DimensionMismatch { .. } => CqiqaStatus::DimensionMismatch,
            MetricError::TooSmall { .. } | MetricError::InvalidParam(_) => CqiqaStatus::InvalidArgument,
            _ => CqiqaStatus::Degenerate,
        };
        Failure(status, e.to_string())
    }
}

impl From<ImageError> for Failure {
    fn from(e: ImageError) -> Self {
        let status = match e {
            ImageError::Invalid(_) | ImageError::ChannelOutOfRange(_) => CqiqaStatus::InvalidArgument,
            _ => CqiqaStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

impl From<StatsError> for Failure {
    fn from(e: StatsError) -> Self {
        let status = match e {
            StatsError::Degenerate(_) => CqiqaStatus::Degenerate,
            _ => CqiqaStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CqiqaStatus::InvalidArgument, msg.into())
}

fn null(what: &str) -> Failure {
    Failure(CqiqaStatus::NullPointer, format!("{what} is null"))
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CqiqaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CqiqaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            CqiqaStatus::Panic
        }
    }
}

unsafe fn image<'a>(p: *const CqiqaImage, what: &str) -> Result<&'a RasterImage, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn boxed(img: RasterImage) -> *mut CqiqaImage {
    Box::into_raw(Box::new(CqiqaImage { inner: img }))
}

fn metric_id(m: CqiqaMetric) -> MetricId {
    MetricId::ALL[m as usize]
}

/// Message for the last failed call on this thread, or NULL after a
/// successful one. Valid until the next cqiqa call on the same thread.
#[no_mangle]
pub extern "C" fn cqiqa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated display name of a measure.
#[no_mangle]
pub extern "C" fn cqiqa_metric_name(metric: CqiqaMetric) -> *const c_char {
    const NAMES: [&CStr; 9] = [
        c"PSNR", c"SSIM", c"MSSIM", c"VSNR", c"VIFP", c"UQI", c"NQM", c"WSNR", c"SNR",
    ];
    NAMES[metric as usize].as_ptr()
}

/// Loads a PNG or BMP file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_image_load(path: *const c_char, out: *mut *mut CqiqaImage) -> CqiqaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not valid UTF-8"))?;
        *out = boxed(load_image(path)?);
        Ok(())
    })
}

/// Copies `len` bytes of interleaved RGB (`len == width * height * 3`).
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_image_from_rgb(
    width: usize,
    height: usize,
    data: *const u8,
    len: usize,
    out: *mut *mut CqiqaImage,
) -> CqiqaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if data.is_null() {
            return Err(null("data"));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| invalid("image size overflows"))?;
        if len != expected {
            return Err(invalid(format!("expected {expected} bytes for {width}x{height} RGB, got {len}")));
        }
        let bytes = std::slice::from_raw_parts(data, len).to_vec();
        *out = boxed(RasterImage::new(width, height, bytes)?);
        Ok(())
    })
}

/// Releases an image. NULL is ignored.
///
/// # Safety
/// `img` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_image_free(img: *mut CqiqaImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Width in pixels, or 0 for NULL.
///
/// # Safety
/// `img` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_image_width(img: *const CqiqaImage) -> usize {
    img.as_ref().map_or(0, |h| h.inner.width())
}

/// Height in pixels, or 0 for NULL.
///
/// # Safety
/// `img` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_image_height(img: *const CqiqaImage) -> usize {
    img.as_ref().map_or(0, |h| h.inner.height())
}

/// One measure on the luma plane with default parameters. Perfect
/// fidelity on the dB measures is reported as `+INFINITY`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_metric_compute(
    reference: *const CqiqaImage,
    distorted: *const CqiqaImage,
    metric: CqiqaMetric,
    out: *mut f64,
) -> CqiqaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (r, d) = (image(reference, "reference")?, image(distorted, "distorted")?);
        let s = evaluate_metric(
            metric_id(metric),
            r,
            d,
            &SsimParams::default(),
            &HvsParams::default(),
            ChannelMode::Luma,
        )?;
        *out = s.value;
        Ok(())
    })
}

/// All nine measures into `out[CQIQA_METRIC_COUNT]`, in `CqiqaMetric` order.
///
/// # Safety
/// Handles must be live; `out` must hold `CQIQA_METRIC_COUNT` doubles.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_evaluate_all(
    reference: *const CqiqaImage,
    distorted: *const CqiqaImage,
    out: *mut f64,
) -> CqiqaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (r, d) = (image(reference, "reference")?, image(distorted, "distorted")?);
        let scores = evaluate_all(r, d, &SsimParams::default(), &HvsParams::default())?;
        let dst = std::slice::from_raw_parts_mut(out, CQIQA_METRIC_COUNT);
        for (slot, s) in dst.iter_mut().zip(&scores) {
            *slot = s.value;
        }
        Ok(())
    })
}

/// Spearman rank correlation of two length-`n` arrays.
///
/// # Safety
/// `x` and `y` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_srocc(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> CqiqaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = srocc(slice(x, n, "x")?, slice(y, n, "y")?)?;
        Ok(())
    })
}

/// Kendall tau-b of two length-`n` arrays.
///
/// # Safety
/// `x` and `y` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_krocc(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> CqiqaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = krocc(slice(x, n, "x")?, slice(y, n, "y")?)?;
        Ok(())
    })
}

/// Quantizes every channel to `levels` evenly spaced values (2..=256)
/// into a new image.
///
/// # Safety
/// `img` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_uniform_quantize(
    img: *const CqiqaImage,
    levels: u32,
    out: *mut *mut CqiqaImage,
) -> CqiqaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let src = image(img, "img")?;
        let q = uniform_quantize(src, levels).map_err(|e| invalid(e.to_string()))?;
        *out = boxed(q);
        Ok(())
    })
}

/// Maps a MOS on `[x_min, x_max]` linearly onto `[0, k]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqiqa_normalize_mos(
    value: f64,
    x_min: f64,
    x_max: f64,
    k: f64,
    out: *mut f64,
) -> CqiqaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let p = NormalizationParams::new(x_min, x_max, k).map_err(|e| invalid(e.to_string()))?;
        *out = normalize_mos(value, &p).map_err(|e| invalid(e.to_string()))?;
        Ok(())
    })
}
