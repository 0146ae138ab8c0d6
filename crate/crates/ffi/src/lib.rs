//! C ABI over the `cafewall` library.
//!
//! Objects cross the boundary as opaque handles (`CwImage`, `CwSegments`)
//! that the caller releases with the matching `*_free` function. Every
//! fallible call returns a [`CwStatus`]; on failure the message is available
//! from [`cw_last_error_message`] until the next failing call on the same
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use cafewall::analysis::{self, Bucket, TiltStats};
use cafewall::dog::{self, BorderMode, DogParams};
use cafewall::experiments::{self, ExperimentConfig};
use cafewall::hough::{HoughParams, LineSegment};
use cafewall::stimulus::{self, StimulusSpec};
use cafewall::{io, Error, GrayImage};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParam = 2,
    Io = 3,
    Format = 4,
    Internal = 5,
}

/// Orientation buckets.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwBucket {
    H = 0,
    V = 1,
    D1 = 2,
    D2 = 3,
}

/// Border handling for the DoG filter.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwBorder {
    Replicate = 0,
    Zero = 1,
    Mirror = 2,
}

/// Grayscale image with luminances in [0, 1].
pub struct CwImage(GrayImage);

/// Segments detected at one scale.
pub struct CwSegments {
    scale: f64,
    segments: Vec<LineSegment>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CwStimulusSpec {
    pub rows: u32,
    pub cols: u32,
    pub tile_size: u32,
    pub mortar_size: u32,
    pub row_shift: u32,
    pub mortar_lum: f64,
}

/// Parameters for a single-scale analysis. `nhood_rho` / `nhood_theta` of 0
/// select the size-derived default neighbourhood.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CwAnalyzeParams {
    pub sigma_c: f64,
    pub surround_ratio: f64,
    pub window_ratio: f64,
    pub border: CwBorder,
    pub off_center: bool,
    pub binarize_threshold: f64,
    pub num_peaks: u32,
    pub threshold: u32,
    pub nhood_rho: u32,
    pub nhood_theta: u32,
    pub fill_gap: f64,
    pub min_length: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CwSegment {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
    pub theta_deg: f64,
    pub rho: f64,
    pub length_px: f64,
    /// Endpoint angle in [0, 180).
    pub angle_deg: f64,
    pub bucket: CwBucket,
    /// Signed deviation from the bucket reference, in [-22.5, 22.5).
    pub deviation_deg: f64,
}

/// Per-bucket statistics; the float fields are NaN when `count` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CwTiltStats {
    pub count: u64,
    pub mean_abs_dev: f64,
    pub std_dev: f64,
    pub std_err: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn fail(status: CwStatus, msg: impl Into<String>) -> CwStatus {
    set_last_error(msg.into());
    status
}

fn status_of(err: &Error) -> CwStatus {
    match err {
        Error::Param(_) => CwStatus::InvalidParam,
        Error::Io(_) => CwStatus::Io,
        Error::Format(_) | Error::Image(_) | Error::Json(_) => CwStatus::Format,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), CwStatus>) -> CwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CwStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(CwStatus::Internal, "internal panic"),
    }
}

fn lift<T>(r: cafewall::Result<T>) -> Result<T, CwStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), CwStatus> {
    if p.is_null() {
        Err(fail(CwStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, CwStatus> {
    non_null(path, "path")?;
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| fail(CwStatus::InvalidParam, "path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

impl From<Bucket> for CwBucket {
    fn from(b: Bucket) -> Self {
        match b {
            Bucket::H => CwBucket::H,
            Bucket::V => CwBucket::V,
            Bucket::D1 => CwBucket::D1,
            Bucket::D2 => CwBucket::D2,
        }
    }
}

impl From<CwBucket> for Bucket {
    fn from(b: CwBucket) -> Self {
        match b {
            CwBucket::H => Bucket::H,
            CwBucket::V => Bucket::V,
            CwBucket::D1 => Bucket::D1,
            CwBucket::D2 => Bucket::D2,
        }
    }
}

impl From<CwBorder> for BorderMode {
    fn from(b: CwBorder) -> Self {
        match b {
            CwBorder::Replicate => BorderMode::Replicate,
            CwBorder::Zero => BorderMode::Zero,
            CwBorder::Mirror => BorderMode::Mirror,
        }
    }
}

impl From<&CwStimulusSpec> for StimulusSpec {
    fn from(s: &CwStimulusSpec) -> Self {
        let mut spec = StimulusSpec::with_geometry(
            s.rows as usize,
            s.cols as usize,
            s.tile_size as usize,
            s.mortar_size as usize,
        );
        spec.row_shift = s.row_shift as usize;
        spec.mortar_lum = s.mortar_lum;
        spec
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Fills `out` with the default 9x14, 200 px tile, 8 px mortar pattern.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one `CwStimulusSpec`.
#[no_mangle]
pub unsafe extern "C" fn cw_stimulus_spec_default(out: *mut CwStimulusSpec) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        let d = StimulusSpec::default();
        *out = CwStimulusSpec {
            rows: d.rows as u32,
            cols: d.cols as u32,
            tile_size: d.tile_size as u32,
            mortar_size: d.mortar_size as u32,
            row_shift: d.row_shift as u32,
            mortar_lum: d.mortar_lum,
        };
        Ok(())
    })
}

/// Renders a Cafe Wall pattern into a new image handle.
///
/// # Safety
/// `spec` must point to a valid `CwStimulusSpec`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_generate(spec: *const CwStimulusSpec, out: *mut *mut CwImage) -> CwStatus {
    guard(|| {
        non_null(spec, "spec")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let img = lift(stimulus::generate_cafe_wall(&StimulusSpec::from(&*spec)))?;
        *out = Box::into_raw(Box::new(CwImage(img)));
        Ok(())
    })
}

/// Copies `height * width` row-major luminances into a new image handle.
///
/// # Safety
/// `pixels` must point to `height * width` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cw_image_new(
    height: usize,
    width: usize,
    pixels: *const f64,
    out: *mut *mut CwImage,
) -> CwStatus {
    guard(|| {
        non_null(pixels, "pixels")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let n = height
            .checked_mul(width)
            .ok_or_else(|| fail(CwStatus::InvalidParam, "image size overflows"))?;
        let data = std::slice::from_raw_parts(pixels, n).to_vec();
        let img = lift(GrayImage::new(height, width, data))?;
        *out = Box::into_raw(Box::new(CwImage(img)));
        Ok(())
    })
}

/// Loads a PNG or PGM file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_image_load(path: *const c_char, out: *mut *mut CwImage) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let path = path_arg(path)?;
        let img = lift(io::read_gray(&path))?;
        *out = Box::into_raw(Box::new(CwImage(img)));
        Ok(())
    })
}

/// Writes the image as 8-bit PNG, or PGM when the path ends in `.pgm`.
///
/// # Safety
/// `image` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cw_image_save(image: *const CwImage, path: *const c_char) -> CwStatus {
    guard(|| {
        non_null(image, "image")?;
        let path = path_arg(path)?;
        lift(io::write_gray(&(*image).0, &path))
    })
}

/// # Safety
/// `image` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_image_height(image: *const CwImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.height())
}

/// # Safety
/// `image` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_image_width(image: *const CwImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.width())
}

/// Borrows the row-major pixel buffer; valid while the handle lives.
///
/// # Safety
/// `image` must be a live handle; `out` and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_image_pixels(image: *const CwImage, out: *mut *const f64, len: *mut usize) -> CwStatus {
    guard(|| {
        non_null(image, "image")?;
        non_null(out, "out")?;
        non_null(len, "len")?;
        let px = (*image).0.pixels();
        *out = px.as_ptr();
        *len = px.len();
        Ok(())
    })
}

/// # Safety
/// `image` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_image_free(image: *mut CwImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Fills `out` with defaults: sigma 8, s 2, h 8, replicate border, ON
/// polarity, threshold 0, 100 peaks, 3 votes, default nhood, gap 40, length 450.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_analyze_params_default(out: *mut CwAnalyzeParams) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        let d = ExperimentConfig::default();
        let dp = DogParams::default();
        *out = CwAnalyzeParams {
            sigma_c: dp.sigma_c,
            surround_ratio: d.surround_ratio,
            window_ratio: d.window_ratio,
            border: CwBorder::Replicate,
            off_center: d.off_center,
            binarize_threshold: d.binarize_threshold,
            num_peaks: d.hough.num_peaks as u32,
            threshold: d.hough.threshold,
            nhood_rho: 0,
            nhood_theta: 0,
            fill_gap: d.hough.fill_gap,
            min_length: d.hough.min_length,
        };
        Ok(())
    })
}

fn config_of(p: &CwAnalyzeParams) -> Result<ExperimentConfig, CwStatus> {
    let nhood = match (p.nhood_rho, p.nhood_theta) {
        (0, 0) => None,
        (r, t) => Some((r as usize, t as usize)),
    };
    let cfg = ExperimentConfig {
        sigmas: Some(vec![p.sigma_c]),
        surround_ratio: p.surround_ratio,
        window_ratio: p.window_ratio,
        border: p.border.into(),
        binarize_threshold: p.binarize_threshold,
        off_center: p.off_center,
        hough: HoughParams {
            num_peaks: p.num_peaks as usize,
            threshold: p.threshold,
            nhood,
            fill_gap: p.fill_gap,
            min_length: p.min_length,
        },
        ..ExperimentConfig::default()
    };
    lift(cfg.hough.validate())?;
    lift(cfg.dog_params(p.sigma_c))?;
    Ok(cfg)
}

/// DoG filter, binarise and extract segments at one scale.
///
/// # Safety
/// `image` must be a live handle, `params` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cw_analyze(
    image: *const CwImage,
    params: *const CwAnalyzeParams,
    out: *mut *mut CwSegments,
) -> CwStatus {
    guard(|| {
        non_null(image, "image")?;
        non_null(params, "params")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let cfg = config_of(&*params)?;
        let mut outcomes = lift(experiments::analyze_image(&(*image).0, &cfg, false))?;
        let o = outcomes.pop().ok_or_else(|| fail(CwStatus::Internal, "no scale analysed"))?;
        *out = Box::into_raw(Box::new(CwSegments { scale: o.scale, segments: o.segments }));
        Ok(())
    })
}

/// # Safety
/// `segments` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_segments_len(segments: *const CwSegments) -> usize {
    segments.as_ref().map_or(0, |s| s.segments.len())
}

/// Copies segment `index` into `out`.
///
/// # Safety
/// `segments` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cw_segments_get(segments: *const CwSegments, index: usize, out: *mut CwSegment) -> CwStatus {
    guard(|| {
        non_null(segments, "segments")?;
        non_null(out, "out")?;
        let segs = &*segments;
        let seg = segs
            .segments
            .get(index)
            .ok_or_else(|| fail(CwStatus::InvalidParam, format!("segment index {index} out of range")))?;
        let angle = lift(analysis::segment_angle(seg))?;
        let (bucket, dev) = analysis::bucket_of(angle);
        *out = CwSegment {
            x1: seg.p1.x,
            y1: seg.p1.y,
            x2: seg.p2.x,
            y2: seg.p2.y,
            theta_deg: seg.theta_deg,
            rho: seg.rho,
            length_px: seg.length_px,
            angle_deg: angle,
            bucket: bucket.into(),
            deviation_deg: dev,
        };
        Ok(())
    })
}

/// Tilt statistics of one bucket.
///
/// # Safety
/// `segments` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cw_segments_stats(
    segments: *const CwSegments,
    bucket: CwBucket,
    out: *mut CwTiltStats,
) -> CwStatus {
    guard(|| {
        non_null(segments, "segments")?;
        non_null(out, "out")?;
        let s = &*segments;
        let per_scale = [analysis::ScaleSegments { scale: s.scale, segments: s.segments.clone() }];
        let stats = lift(analysis::aggregate(&per_scale))?;
        let want = Bucket::from(bucket);
        let st: &TiltStats = stats
            .iter()
            .find(|t| t.bucket == want)
            .ok_or_else(|| fail(CwStatus::Internal, "bucket missing from aggregate"))?;
        *out = CwTiltStats {
            count: st.count as u64,
            mean_abs_dev: st.mean_abs_dev.unwrap_or(f64::NAN),
            std_dev: st.std_dev.unwrap_or(f64::NAN),
            std_err: st.std_err.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `segments` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_segments_free(segments: *mut CwSegments) {
    if !segments.is_null() {
        drop(Box::from_raw(segments));
    }
}

/// DoG window side for the given centre sigma and window ratio, or 0 if the
/// parameters are invalid.
#[no_mangle]
pub extern "C" fn cw_window_size(sigma_c: f64, window_ratio: f64) -> usize {
    match DogParams::new(sigma_c, 2.0, window_ratio) {
        Ok(p) => dog::window_size(&p),
        Err(e) => {
            set_last_error(e.to_string());
            0
        }
    }
}
