//! Zero-phase low-pass filtering.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::signal::Waveform;

/// Second-order Butterworth low-pass section (bilinear transform, prewarped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    /// `a[0]` is normalised to 1 and omitted.
    pub a: [f64; 2],
}

impl Biquad {
    pub fn butterworth_lowpass(cutoff: f64, sample_rate: f64) -> Result<Self> {
        let nyquist = 0.5 * sample_rate;
        if !(cutoff > 0.0 && cutoff < nyquist) {
            return Err(Error::CutoffOutOfRange { cutoff, nyquist });
        }
        let k = (PI * cutoff / sample_rate).tan();
        let k2 = k * k;
        let norm = 1.0 / (1.0 + SQRT_2 * k + k2);
        let b0 = k2 * norm;
        Ok(Self {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k2 - 1.0) * norm, (1.0 - SQRT_2 * k + k2) * norm],
        })
    }

    /// Samples for the impulse response envelope to decay below 1e-3 of its start.
    pub fn settling_len(&self) -> usize {
        // complex-conjugate poles: |p|² = a2
        let r = self.a[1].abs().sqrt();
        if r <= 0.0 {
            return 1;
        }
        if r >= 1.0 {
            return usize::MAX / 8;
        }
        ((1e-3f64).ln() / r.ln()).ceil().max(1.0) as usize
    }

    /// Runs the section over `x` (transposed direct form II), starting in the
    /// steady state for a constant input equal to `x[0]`.
    fn run(&self, x: &mut [f64]) {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let x0 = x[0];
        let mut z1 = (1.0 - b0) * x0;
        let mut z2 = (b2 - a2) * x0;
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + z1;
            z1 = b1 * input - a1 * y + z2;
            z2 = b2 * input - a2 * y;
            *v = y;
        }
    }

    /// Forward-backward filtering with odd-reflection padding at both ends.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n < 2 {
            return x.to_vec();
        }
        let pad = (3 * self.settling_len()).min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        let (first, last) = (x[0], x[n - 1]);
        ext.extend((1..=pad).rev().map(|i| 2.0 * first - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * last - x[n - 1 - i]));
        self.run(&mut ext);
        ext.reverse();
        self.run(&mut ext);
        ext.reverse();
        ext[pad..pad + n].to_vec()
    }

    /// Magnitude response at `f` Hz of one pass.
    pub fn gain(&self, f: f64, sample_rate: f64) -> f64 {
        use num_complex::Complex64;
        let z = Complex64::from_polar(1.0, -2.0 * PI * f / sample_rate);
        let num = self.b[0] + self.b[1] * z + self.b[2] * z * z;
        let den = 1.0 + self.a[0] * z + self.a[1] * z * z;
        (num / den).norm()
    }
}

/// Zero-phase 2nd-order Butterworth low-pass (4th-order magnitude after the two passes).
pub fn lowpass(w: &Waveform, cutoff: f64) -> Result<Waveform> {
    let section = Biquad::butterworth_lowpass(cutoff, w.sample_rate())?;
    w.with_samples(section.filtfilt(w.samples()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DT: f64 = 0.2e-6;

    fn wave(s: Vec<f64>) -> Waveform {
        Waveform::new(s, DT, 0.0).unwrap()
    }

    #[test]
    fn dc_passes_unchanged() {
        let out = lowpass(&wave(vec![0.75; 5000]), 10e3).unwrap();
        assert!(out.samples().iter().all(|v| (v - 0.75).abs() < 1e-9));
    }

    #[test]
    fn tone_far_above_cutoff_is_suppressed() {
        let fc = 20e3;
        let f = 10.0 * fc;
        let n = 20_000;
        let s: Vec<f64> = (0..n).map(|i| (2.0 * PI * f * i as f64 * DT).sin()).collect();
        let out = lowpass(&wave(s), fc).unwrap();
        // interior, away from the padded edges
        let peak = out.samples()[5000..15000].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(20.0 * peak.log10() < -40.0, "{peak}");
        // analytic single-pass gain at 10x cutoff squared
        let b = Biquad::butterworth_lowpass(fc, 1.0 / DT).unwrap();
        assert!(20.0 * (b.gain(f, 1.0 / DT).powi(2)).log10() < -75.0);
    }

    #[test]
    fn zero_phase_keeps_envelope_peak() {
        let n = 20_000;
        let centre = 10_000.0;
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let t = (i as f64 - centre) * DT;
                (-(t / 40e-6).powi(2)).exp() * (2.0 * PI * 5e3 * t).cos()
            })
            .collect();
        let out = lowpass(&wave(s), 50e3).unwrap();
        let argmax = out
            .samples()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        assert!((argmax as f64 - centre).abs() <= 1.0);
    }

    #[test]
    fn cutoff_range_checked() {
        let w = wave(vec![0.0; 10]);
        assert!(matches!(lowpass(&w, 0.0), Err(Error::CutoffOutOfRange { .. })));
        assert!(matches!(lowpass(&w, 2.5e6), Err(Error::CutoffOutOfRange { .. })));
    }

    proptest! {
        #[test]
        fn linearity(
            x in proptest::collection::vec(-1.0f64..1.0, 300),
            y in proptest::collection::vec(-1.0f64..1.0, 300),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let fc = 100e3;
            let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let lhs = lowpass(&wave(combo), fc).unwrap();
            let fx = lowpass(&wave(x), fc).unwrap();
            let fy = lowpass(&wave(y), fc).unwrap();
            let scale = lhs.max_abs().max(1e-12);
            for i in 0..300 {
                let rhs = a * fx.samples()[i] + b * fy.samples()[i];
                prop_assert!((lhs.samples()[i] - rhs).abs() <= 1e-9 * scale);
            }
        }
    }
}
