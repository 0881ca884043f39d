//! C ABI over the `lamb_toa` library.
//!
//! Every fallible call returns an [`LtStatus`]; on failure the message is
//! available from [`lt_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lamb_toa::dispersion::{
    bulk_speeds, fastest_group_speed, fd_grid, trace_mode, DispersionCurve, Mode, PlateMaterial,
    TraceOptions,
};
use lamb_toa::estimators::{aic_pick, mer_pick, sla_pick_windows, tc_pick, AicParams, AicVariant, ToaEstimate};
use lamb_toa::signal::{add_noise, lowpass, Waveform};
use lamb_toa::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidWaveform = 3,
    BranchLost = 4,
    EmptyRange = 5,
    OutOfRange = 6,
    WindowTooLong = 7,
    ZeroSignal = 8,
    BandNotCovered = 9,
    InconsistentChannels = 10,
    Panic = 99,
}

impl From<&Error> for LtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::NonpositiveEstimate { .. } => LtStatus::InvalidArgument,
            Error::InvalidWaveform(_) => LtStatus::InvalidWaveform,
            Error::BranchLost { .. } => LtStatus::BranchLost,
            Error::EmptyRange | Error::DegenerateWindow { .. } => LtStatus::EmptyRange,
            Error::NyquistViolation { .. }
            | Error::CutoffOutOfRange { .. }
            | Error::IndexOutOfRange { .. }
            | Error::FrequencyOutOfRange { .. }
            | Error::MissingReference(_) => LtStatus::OutOfRange,
            Error::WindowTooLong { .. } => LtStatus::WindowTooLong,
            Error::ZeroSignal => LtStatus::ZeroSignal,
            Error::BandNotCovered { .. } => LtStatus::BandNotCovered,
            Error::InconsistentChannels(_) => LtStatus::InconsistentChannels,
            Error::Channel { source, .. } => LtStatus::from(source.as_ref()),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: LtStatus, msg: impl Into<String>) -> LtStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), LtStatus>) -> LtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LtStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(LtStatus::Panic, "internal panic"),
    }
}

fn lib(e: Error) -> LtStatus {
    fail(LtStatus::from(&e), e.to_string())
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), LtStatus> {
    if p.is_null() {
        Err(fail(LtStatus::NullPointer, format!("`{what}` is null")))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or null after a success.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Isotropic plate: SI units, `half_thickness` in metres.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtMaterial {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
    pub half_thickness: f64,
}

impl From<LtMaterial> for PlateMaterial {
    fn from(m: LtMaterial) -> Self {
        PlateMaterial {
            youngs_modulus: m.youngs_modulus,
            poisson_ratio: m.poisson_ratio,
            density: m.density,
            half_thickness: m.half_thickness,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtBulkSpeeds {
    pub pressure: f64,
    pub shear: f64,
}

/// Built-in 2 mm aluminium plate.
#[no_mangle]
pub extern "C" fn lt_material_aluminum_2mm() -> LtMaterial {
    let m = PlateMaterial::aluminum_2mm();
    LtMaterial {
        youngs_modulus: m.youngs_modulus,
        poisson_ratio: m.poisson_ratio,
        density: m.density,
        half_thickness: m.half_thickness,
    }
}

/// # Safety
/// `material` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn lt_bulk_speeds(material: *const LtMaterial, out: *mut LtBulkSpeeds) -> LtStatus {
    guard(|| {
        nonnull(material, "material")?;
        nonnull(out, "out")?;
        let mat = PlateMaterial::from(*material);
        mat.validate().map_err(lib)?;
        let s = bulk_speeds(&mat);
        *out = LtBulkSpeeds { pressure: s.pressure, shear: s.shear };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtMode {
    S0 = 0,
    A0 = 1,
    S1 = 2,
    A1 = 3,
}

impl From<LtMode> for Mode {
    fn from(m: LtMode) -> Self {
        match m {
            LtMode::S0 => Mode::S0,
            LtMode::A0 => Mode::A0,
            LtMode::S1 => Mode::S1,
            LtMode::A1 => Mode::A1,
        }
    }
}

/// Opaque traced dispersion branch.
pub struct LtCurve {
    inner: DispersionCurve,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtDispersionSample {
    /// Frequency times half-thickness (Hz·m).
    pub fd: f64,
    pub k: f64,
    pub c_phase: f64,
    pub c_group: f64,
}

/// Traces `mode` on the grid `fd_step, 2·fd_step, …, fd_max` (Hz·m).
///
/// # Safety
/// `material` must be valid; `out` receives a handle to free with [`lt_curve_free`].
#[no_mangle]
pub unsafe extern "C" fn lt_trace_mode(
    material: *const LtMaterial,
    mode: LtMode,
    fd_step: f64,
    fd_max: f64,
    out: *mut *mut LtCurve,
) -> LtStatus {
    guard(|| {
        nonnull(material, "material")?;
        nonnull(out, "out")?;
        *out = ptr::null_mut();
        if !(fd_step > 0.0 && fd_max >= fd_step) {
            return Err(fail(LtStatus::InvalidArgument, "need 0 < fd_step <= fd_max"));
        }
        let mat = PlateMaterial::from(*material);
        let curve = trace_mode(&mat, mode.into(), &fd_grid(fd_step, fd_max), &TraceOptions::default()).map_err(lib)?;
        *out = Box::into_raw(Box::new(LtCurve { inner: curve }));
        Ok(())
    })
}

/// # Safety
/// `curve` must come from [`lt_trace_mode`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lt_curve_free(curve: *mut LtCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `curve` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lt_curve_len(curve: *const LtCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.inner.len())
}

/// # Safety
/// `curve` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lt_curve_sample(curve: *const LtCurve, index: usize, out: *mut LtDispersionSample) -> LtStatus {
    guard(|| {
        nonnull(curve, "curve")?;
        nonnull(out, "out")?;
        let c = &(*curve).inner;
        let s = c
            .samples
            .get(index)
            .ok_or_else(|| lib(Error::IndexOutOfRange { index, len: c.len() }))?;
        *out = LtDispersionSample { fd: s.fd, k: s.k, c_phase: s.c_phase, c_group: s.c_group };
        Ok(())
    })
}

/// Largest group speed with `fd` in `[fd_lo, fd_hi]`, and where it occurs.
///
/// # Safety
/// `curve` must be a live handle; `speed` and `fd` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lt_curve_fastest_group_speed(
    curve: *const LtCurve,
    fd_lo: f64,
    fd_hi: f64,
    speed: *mut f64,
    fd: *mut f64,
) -> LtStatus {
    guard(|| {
        nonnull(curve, "curve")?;
        nonnull(speed, "speed")?;
        nonnull(fd, "fd")?;
        let (c, f) = fastest_group_speed(&(*curve).inner, fd_lo, fd_hi).map_err(lib)?;
        *speed = c;
        *fd = f;
        Ok(())
    })
}

/// Opaque uniformly sampled signal.
pub struct LtWaveform {
    inner: Waveform,
}

/// Copies `len` samples into a new waveform.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` receives a handle to
/// free with [`lt_waveform_free`].
#[no_mangle]
pub unsafe extern "C" fn lt_waveform_new(
    samples: *const f64,
    len: usize,
    dt: f64,
    t0: f64,
    out: *mut *mut LtWaveform,
) -> LtStatus {
    guard(|| {
        nonnull(samples, "samples")?;
        nonnull(out, "out")?;
        *out = ptr::null_mut();
        let data = std::slice::from_raw_parts(samples, len).to_vec();
        let w = Waveform::new(data, dt, t0).map_err(lib)?;
        *out = Box::into_raw(Box::new(LtWaveform { inner: w }));
        Ok(())
    })
}

/// # Safety
/// `w` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lt_waveform_free(w: *mut LtWaveform) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// `w` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lt_waveform_len(w: *const LtWaveform) -> usize {
    w.as_ref().map_or(0, |w| w.inner.len())
}

/// Copies up to `capacity` samples into `dst`; `written` receives the count.
///
/// # Safety
/// `dst` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn lt_waveform_copy_samples(
    w: *const LtWaveform,
    dst: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> LtStatus {
    guard(|| {
        nonnull(w, "w")?;
        nonnull(dst, "dst")?;
        nonnull(written, "written")?;
        let s = (*w).inner.samples();
        let n = s.len().min(capacity);
        ptr::copy_nonoverlapping(s.as_ptr(), dst, n);
        *written = n;
        Ok(())
    })
}

unsafe fn derive(
    w: *const LtWaveform,
    out: *mut *mut LtWaveform,
    f: impl FnOnce(&Waveform) -> lamb_toa::Result<Waveform>,
) -> LtStatus {
    guard(|| {
        nonnull(w, "w")?;
        nonnull(out, "out")?;
        *out = ptr::null_mut();
        let r = f(&(*w).inner).map_err(lib)?;
        *out = Box::into_raw(Box::new(LtWaveform { inner: r }));
        Ok(())
    })
}

/// New waveform with white Gaussian noise at `snr_db` relative to the signal rms.
///
/// # Safety
/// `w` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lt_add_noise(w: *const LtWaveform, snr_db: f64, seed: u64, out: *mut *mut LtWaveform) -> LtStatus {
    derive(w, out, |w| add_noise(w, snr_db, seed))
}

/// New waveform low-pass filtered at `cutoff` Hz (zero phase).
///
/// # Safety
/// `w` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lt_lowpass(w: *const LtWaveform, cutoff: f64, out: *mut *mut LtWaveform) -> LtStatus {
    derive(w, out, |w| lowpass(w, cutoff))
}

/// Result of a picker. `found` is 0 when no arrival was detected.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtEstimate {
    pub found: u8,
    pub index: usize,
    pub time: f64,
}

impl From<&ToaEstimate> for LtEstimate {
    fn from(e: &ToaEstimate) -> Self {
        match (e.index, e.time) {
            (Some(i), Some(t)) => LtEstimate { found: 1, index: i, time: t },
            _ => LtEstimate { found: 0, index: 0, time: f64::NAN },
        }
    }
}

unsafe fn pick(
    w: *const LtWaveform,
    out: *mut LtEstimate,
    f: impl FnOnce(&Waveform) -> lamb_toa::Result<ToaEstimate>,
) -> LtStatus {
    guard(|| {
        nonnull(w, "w")?;
        nonnull(out, "out")?;
        let e = f(&(*w).inner).map_err(lib)?;
        *out = LtEstimate::from(&e);
        Ok(())
    })
}

/// First sample with `|s| > threshold`.
///
/// # Safety
/// `w` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lt_pick_tc(w: *const LtWaveform, threshold: f64, out: *mut LtEstimate) -> LtStatus {
    pick(w, out, |w| tc_pick(w, threshold))
}

/// STA/LTA pick with explicit window lengths in samples.
///
/// # Safety
/// `w` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lt_pick_sla(w: *const LtWaveform, n_short: usize, n_long: usize, out: *mut LtEstimate) -> LtStatus {
    pick(w, out, |w| sla_pick_windows(w, n_short, n_long).map(|r| r.0))
}

/// Modified energy ratio pick with an `n_e`-sample window.
///
/// # Safety
/// `w` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lt_pick_mer(w: *const LtWaveform, n_e: usize, out: *mut LtEstimate) -> LtStatus {
    pick(w, out, |w| mer_pick(w, n_e).map(|r| r.0))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtAicParams {
    pub r_a: f64,
    pub t_am: f64,
    pub t_first_lb: f64,
    pub t_fb: f64,
    pub t_fa: f64,
}

#[no_mangle]
pub extern "C" fn lt_aic_params_default() -> LtAicParams {
    let p = AicParams::default();
    LtAicParams { r_a: p.r_a, t_am: p.t_am, t_first_lb: p.t_first_lb, t_fb: p.t_fb, t_fa: p.t_fa }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtAicVariant {
    GlobalMin = 0,
    LocalMin = 1,
}

/// Two-step AIC pick. `params` may be null for the defaults.
///
/// # Safety
/// `w` must be a live handle; `params` valid or null; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lt_pick_aic(
    w: *const LtWaveform,
    params: *const LtAicParams,
    variant: LtAicVariant,
    out: *mut LtEstimate,
) -> LtStatus {
    let p = match params.as_ref() {
        Some(p) => AicParams { r_a: p.r_a, t_am: p.t_am, t_first_lb: p.t_first_lb, t_fb: p.t_fb, t_fa: p.t_fa },
        None => AicParams::default(),
    };
    let v = match variant {
        LtAicVariant::GlobalMin => AicVariant::Gm,
        LtAicVariant::LocalMin => AicVariant::Lm,
    };
    pick(w, out, |w| aic_pick(w, &p, v, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_context_keeps_inner_status() {
        let e = Error::Channel { channel: "S3".into(), source: Box::new(Error::ZeroSignal) };
        assert_eq!(LtStatus::from(&e), LtStatus::ZeroSignal);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), LtStatus::Panic);
        assert!(!lt_last_error_message().is_null());
    }
}
