//! Morlet continuous wavelet transform and scalogram.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::signal::Waveform;

/// Morlet wavelet `π^(−1/4)·exp(i·ω_c·t)·exp(−t²/2)` sampled at `t`.
pub fn morlet(t: &[f64], omega_c: f64) -> Result<Vec<Complex64>> {
    if !(omega_c > 0.0) {
        return Err(invalid("omega_c", "must be > 0"));
    }
    let norm = PI.powf(-0.25);
    Ok(t.iter()
        .map(|&x| Complex64::from_polar(norm * (-0.5 * x * x).exp(), omega_c * x))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CwtOptions {
    /// Wavelet centre frequency (rad, dimensionless).
    pub omega_c: f64,
    /// Cone-of-influence half-width in units of the scale.
    pub coi_c: f64,
    /// Kernel truncation in units of the scale.
    pub truncate: f64,
}

impl Default for CwtOptions {
    fn default() -> Self {
        Self { omega_c: 5.0, coi_c: 3.0, truncate: 8.0 }
    }
}

/// Evenly spaced analysis frequencies `lo, lo+step, …, ≤ hi`.
pub fn freq_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && step > 0.0) {
        return Err(invalid("freq_grid", "need 0 < lo <= hi and step > 0"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Scale in samples for analysis frequency `f`.
pub fn scale_for(f: f64, omega_c: f64, dt: f64) -> f64 {
    omega_c / (2.0 * PI * f * dt)
}

/// Squared CWT magnitudes on a time × frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalogram {
    /// Time-major: `values[i * freqs.len() + j]`.
    pub values: Vec<f64>,
    pub freqs: Vec<f64>,
    pub scales: Vec<f64>,
    pub dt: f64,
    pub t0: f64,
    pub n_times: usize,
    /// Per time index, the frequency above which coefficients are free of edge effects.
    pub coi: Vec<f64>,
    /// Divisor used for normalized views; the signal's own maximum until
    /// [`crate::tfa::normalize_channels`] sets the shared value.
    pub normalizer: f64,
    pub options: CwtOptions,
}

impl Scalogram {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.freqs.len() + j]
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, &v| m.max(v))
    }

    /// Index of the analysis frequency nearest to `f` (lower one on ties).
    pub fn nearest_freq(&self, f: f64) -> usize {
        let mut best = 0;
        for (j, &g) in self.freqs.iter().enumerate() {
            if (g - f).abs() < (self.freqs[best] - f).abs() {
                best = j;
            }
        }
        best
    }

    /// Number of samples at each edge affected by boundary effects for column `j`.
    pub fn coi_margin(&self, j: usize) -> usize {
        (self.options.coi_c * self.scales[j]).floor() as usize
    }

    /// True when `(i, j)` lies inside the cone of influence, i.e. within
    /// `C·a` samples of either end.
    pub fn in_coi(&self, i: usize, j: usize) -> bool {
        let edge = i.min(self.n_times - 1 - i) as f64;
        edge <= self.options.coi_c * self.scales[j]
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "time_s,freq_hz,value")?;
        for i in 0..self.n_times {
            for (j, f) in self.freqs.iter().enumerate() {
                writeln!(out, "{:e},{},{:e}", self.time(i), f, self.value(i, j))?;
            }
        }
        Ok(())
    }
}

/// Per frequency, the earliest and latest trustworthy times.
///
/// `None` when the cone covers the whole record at that frequency.
pub fn coi_boundary(s: &Scalogram) -> Vec<Option<(f64, f64)>> {
    (0..s.freqs.len())
        .map(|j| {
            let first = s.coi_margin(j) + 1;
            if s.n_times < 1 + 2 * first {
                return None;
            }
            Some((s.time(first), s.time(s.n_times - 1 - first)))
        })
        .collect()
}

/// Complex CWT coefficients, one row per frequency.
///
/// `W(b) = Σ_n s[n]·a^(−1/2)·ψ*((n − b)/a)` with `a` in samples.
pub fn cwt_coefficients(w: &Waveform, freqs: &[f64], opts: &CwtOptions) -> Result<Vec<Vec<Complex64>>> {
    let nyquist = 0.5 / w.dt();
    for pair in freqs.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(invalid("freqs", "must be strictly increasing"));
        }
    }
    if freqs.is_empty() {
        return Err(invalid("freqs", "empty"));
    }
    for &f in freqs {
        if !(f > 0.0 && f < nyquist) {
            return Err(Error::FrequencyOutOfRange { freq: f, nyquist });
        }
    }
    if !(opts.truncate > 0.0) {
        return Err(invalid("truncate", "must be > 0"));
    }
    let n = w.len();
    let scales: Vec<f64> = freqs.iter().map(|&f| scale_for(f, opts.omega_c, w.dt())).collect();
    let m_max = scales.iter().map(|a| (opts.truncate * a).ceil() as usize).max().unwrap_or(0);
    let len = fft::next_fast_len(n + m_max + 1);
    let spectrum = fft::forward_real(w.samples(), len);

    scales
        .par_iter()
        .map(|&a| {
            let m = (opts.truncate * a).ceil() as usize;
            let taps: Vec<f64> = (-(m as isize)..=m as isize).map(|k| k as f64 / a).collect();
            let psi = morlet(&taps, opts.omega_c)?;
            let gain = a.sqrt().recip();
            let mut kernel = vec![Complex64::new(0.0, 0.0); len];
            for (idx, z) in psi.iter().enumerate() {
                let k = idx as isize - m as isize;
                let pos = if k < 0 { (len as isize + k) as usize } else { k as usize };
                kernel[pos] = z * gain;
            }
            fft::forward_in_place(&mut kernel);
            // correlation with the kernel: S · conj(H)
            let mut prod: Vec<Complex64> =
                spectrum.iter().zip(&kernel).map(|(x, h)| x * h.conj()).collect();
            fft::inverse_in_place(&mut prod);
            prod.truncate(n);
            Ok(prod)
        })
        .collect()
}

pub fn cwt(w: &Waveform, freqs: &[f64], opts: &CwtOptions) -> Result<Scalogram> {
    let rows = cwt_coefficients(w, freqs, opts)?;
    let n = w.len();
    let nf = freqs.len();
    let mut values = vec![0.0; n * nf];
    for (j, row) in rows.iter().enumerate() {
        for (i, z) in row.iter().enumerate() {
            values[i * nf + j] = z.norm_sqr();
        }
    }
    let scales: Vec<f64> = freqs.iter().map(|&f| scale_for(f, opts.omega_c, w.dt())).collect();
    let coi = (0..n)
        .map(|i| {
            let edge = i.min(n - 1 - i) as f64;
            if edge == 0.0 {
                f64::INFINITY
            } else {
                opts.coi_c * opts.omega_c / (2.0 * PI * w.dt() * edge)
            }
        })
        .collect();
    let mut s = Scalogram {
        values,
        freqs: freqs.to_vec(),
        scales,
        dt: w.dt(),
        t0: w.t0(),
        n_times: n,
        coi,
        normalizer: 1.0,
        options: *opts,
    };
    let peak = s.max_value();
    s.normalizer = if peak > 0.0 { peak } else { 1.0 };
    Ok(s)
}
