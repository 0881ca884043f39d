//! Short-time Fourier transform.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::signal::Waveform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StftWindow {
    Rectangular,
    Hann,
    Hamming,
    Blackman,
}

impl StftWindow {
    /// Symmetric window of `len` samples.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        if len == 1 {
            return vec![1.0];
        }
        let m = (len - 1) as f64;
        (0..len)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / m;
                match self {
                    StftWindow::Rectangular => 1.0,
                    StftWindow::Hann => 0.5 - 0.5 * x.cos(),
                    StftWindow::Hamming => 0.54 - 0.46 * x.cos(),
                    StftWindow::Blackman => 0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos(),
                }
            })
            .collect()
    }
}

/// Squared magnitudes of the one-sided spectra of successive windowed frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// Frame-major: `values[frame * freqs.len() + bin]`.
    pub values: Vec<f64>,
    pub freqs: Vec<f64>,
    /// Centre time of each frame.
    pub times: Vec<f64>,
    pub window_len: usize,
}

impl Spectrogram {
    pub fn n_frames(&self) -> usize {
        self.times.len()
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        let nb = self.freqs.len();
        &self.values[i * nb..(i + 1) * nb]
    }
}

/// Frames start at `0, hop, 2·hop, …` and are kept while they fit inside the signal.
pub fn stft(w: &Waveform, window: StftWindow, window_len: usize, hop: usize) -> Result<Spectrogram> {
    if window_len == 0 {
        return Err(invalid("window_len", "must be >= 1"));
    }
    if hop == 0 {
        return Err(invalid("hop", "must be >= 1"));
    }
    if window_len > w.len() {
        return Err(Error::WindowTooLong { window: window_len, len: w.len() });
    }
    let coeffs = window.coefficients(window_len);
    let n_bins = window_len / 2 + 1;
    let freqs: Vec<f64> = (0..n_bins).map(|j| fft::bin_frequency(j, window_len, w.dt())).collect();
    let s = w.samples();
    let mut values = Vec::new();
    let mut times = Vec::new();
    let mut start = 0;
    let mut frame = vec![0.0; window_len];
    while start + window_len <= s.len() {
        for (k, f) in frame.iter_mut().enumerate() {
            *f = s[start + k] * coeffs[k];
        }
        let spec = fft::forward_real(&frame, window_len);
        values.extend(spec[..n_bins].iter().map(|z| z.norm_sqr()));
        times.push(w.t0() + (start as f64 + (window_len - 1) as f64 / 2.0) * w.dt());
        start += hop;
    }
    Ok(Spectrogram { values, freqs, times, window_len })
}
