//! Source pulses and dispersive propagation by per-mode phase delay.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionCurve;
use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::signal::Waveform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstWindow {
    Hanning,
    Gaussian,
    Blackman,
}

impl BurstWindow {
    /// Window value at `x ∈ [0, 1]` (fraction of the support); peak 1 at `x = 0.5`.
    pub fn at(self, x: f64) -> f64 {
        match self {
            BurstWindow::Hanning => 0.5 * (1.0 - (2.0 * PI * x).cos()),
            BurstWindow::Gaussian => {
                // ±3σ across the support
                let z = (x - 0.5) * 6.0;
                (-0.5 * z * z).exp()
            }
            BurstWindow::Blackman => {
                0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos()
            }
        }
    }
}

/// Windowed tone burst: `cycles` periods of `f0`, carrier phase-locked to the window centre.
///
/// The burst occupies samples `0..=n` with `n = round(cycles / (f0·dt))` and is
/// zero-padded to `total_len` samples.
pub fn tone_burst(
    f0: f64,
    cycles: f64,
    window: BurstWindow,
    dt: f64,
    total_len: usize,
) -> Result<Waveform> {
    if !(f0 > 0.0) {
        return Err(invalid("f0", "must be > 0"));
    }
    if f0 * dt >= 0.5 {
        return Err(Error::NyquistViolation { f0, dt });
    }
    if cycles < 0.0 {
        return Err(invalid("cycles", "must be >= 0"));
    }
    let n = (cycles / (f0 * dt)).round() as usize;
    let mut s = vec![0.0; total_len.max(2)];
    if n == 0 {
        return Waveform::new(s, dt, 0.0);
    }
    if n + 1 > s.len() {
        return Err(invalid("total_len", format!("burst needs {} samples", n + 1)));
    }
    let centre = n as f64 / 2.0;
    for (i, v) in s.iter_mut().enumerate().take(n + 1) {
        let x = i as f64 / n as f64;
        let t = (i as f64 - centre) * dt;
        *v = window.at(x) * (2.0 * PI * f0 * t).cos();
    }
    Waveform::new(s, dt, 0.0)
}

/// Single-cycle sine of the given duration, a zero-mean impact-like pulse.
///
/// This is the time derivative of a `sin²` force pulse, normalised to unit peak.
pub fn impulse(duration: f64, dt: f64, total_len: usize) -> Result<Waveform> {
    if !(duration > 0.0) {
        return Err(invalid("duration", "must be > 0"));
    }
    let n = (duration / dt).round() as usize;
    if n < 2 {
        return Err(invalid("duration", "shorter than two samples"));
    }
    if n + 1 > total_len {
        return Err(invalid("total_len", format!("pulse needs {} samples", n + 1)));
    }
    let mut s = vec![0.0; total_len];
    for (i, v) in s.iter_mut().enumerate().take(n + 1) {
        *v = (2.0 * PI * i as f64 / n as f64).sin();
    }
    Waveform::new(s, dt, 0.0)
}

/// Delays every sample of `w` by `shift` samples (zero-filled, length preserved).
pub fn delay_samples(w: &Waveform, shift: usize) -> Waveform {
    let n = w.len();
    let mut s = vec![0.0; n];
    if shift < n {
        s[shift..].copy_from_slice(&w.samples()[..n - shift]);
    }
    w.with_samples(s).expect("same grid")
}

/// One propagating mode and its amplitude weight.
#[derive(Debug, Clone, Copy)]
pub struct ModeWeight<'a> {
    pub curve: &'a DispersionCurve,
    pub weight: f64,
}

/// Spectral components below this fraction of the peak magnitude are treated as empty.
pub const OCCUPIED_BAND_FLOOR: f64 = 1e-9;

/// Padding factor applied before the circular FFT so that slow components do not wrap.
pub const DEFAULT_PAD_FACTOR: usize = 4;

/// Propagates `source` over `distance` metres through the given modes.
///
/// Each positive-frequency bin is multiplied by `Σ_m w_m·exp(−i·k_m(ω)·distance)`,
/// with `k_m` interpolated linearly in ω from the traced branch. The result is
/// truncated back to the source length.
pub fn propagate_dispersive(
    source: &Waveform,
    modes: &[ModeWeight<'_>],
    distance: f64,
) -> Result<Waveform> {
    let full = propagate_dispersive_padded(source, modes, distance, DEFAULT_PAD_FACTOR)?;
    let n = source.len();
    source.with_samples(full.samples()[..n].to_vec())
}

/// Like [`propagate_dispersive`] but returns the whole circular buffer of
/// `next_pow2(pad_factor·N)` samples.
pub fn propagate_dispersive_padded(
    source: &Waveform,
    modes: &[ModeWeight<'_>],
    distance: f64,
    pad_factor: usize,
) -> Result<Waveform> {
    if !(distance >= 0.0) {
        return Err(invalid("distance", "must be >= 0"));
    }
    let len = fft::next_fast_len(source.len() * pad_factor.max(1));
    let spectrum = fft::forward_real(source.samples(), len);
    let out = apply_propagator(&spectrum, source.dt(), modes, distance)?;
    Waveform::new(out, source.dt(), source.t0())
}

fn apply_propagator(
    spectrum: &[Complex64],
    dt: f64,
    modes: &[ModeWeight<'_>],
    distance: f64,
) -> Result<Vec<f64>> {
    let len = spectrum.len();
    let half = len / 2;
    let peak = spectrum[..=half].iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let floor = peak * OCCUPIED_BAND_FLOOR;

    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for j in 0..=half {
        let x = spectrum[j];
        let f = j as f64 / (len as f64 * dt);
        let omega = 2.0 * PI * f;
        let mut h = Complex64::new(0.0, 0.0);
        for m in modes.iter().filter(|m| m.weight != 0.0) {
            match m.curve.wavenumber_at(omega) {
                Some(k) => h += Complex64::from_polar(m.weight, -k * distance),
                None if omega > m.curve.max_omega() && x.norm() > floor => {
                    return Err(Error::BandNotCovered {
                        freq: f,
                        covered: m.curve.max_omega() / (2.0 * PI),
                    });
                }
                None => {}
            }
        }
        let y = x * h;
        if j == 0 || (len.is_multiple_of(2) && j == half) {
            // Self-conjugate bins of a real signal.
            out[j] = Complex64::new(y.re, 0.0);
        } else {
            out[j] = y;
            out[len - j] = y.conj();
        }
    }
    fft::inverse_in_place(&mut out);
    Ok(out.into_iter().map(|z| z.re).collect())
}
