//! Seeded white Gaussian noise.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::signal::Waveform;

/// SNR values above this are treated as this (σ becomes ~1e-15·rms).
pub const MAX_SNR_DB: f64 = 300.0;

/// Standard normal draws from a counter-based ChaCha stream via Box–Muller.
pub struct GaussianNoise {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianNoise {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    // Uniform in (0, 1]: 53 random mantissa bits, never zero.
    fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Adds noise with σ = rms(w) / 10^(snr_db/20).
pub fn add_noise(w: &Waveform, snr_db: f64, seed: u64) -> Result<Waveform> {
    if snr_db.is_nan() {
        return Err(invalid("snr_db", "must be a number"));
    }
    let rms = w.stats().rms;
    if !(rms > 0.0) {
        return Err(Error::ZeroSignal);
    }
    let sigma = rms / 10f64.powf(snr_db.min(MAX_SNR_DB) / 20.0);
    Ok(add_gaussian(w, sigma, seed))
}

/// Adds zero-mean noise of fixed absolute σ.
pub fn noise_floor(w: &Waveform, sigma: f64, seed: u64) -> Result<Waveform> {
    if !(sigma >= 0.0) {
        return Err(invalid("sigma", "must be >= 0"));
    }
    if sigma == 0.0 {
        return Ok(w.clone());
    }
    Ok(add_gaussian(w, sigma, seed))
}

fn add_gaussian(w: &Waveform, sigma: f64, seed: u64) -> Waveform {
    let mut g = GaussianNoise::new(seed);
    let s = w
        .samples()
        .iter()
        .map(|x| x + sigma * g.next_standard())
        .collect();
    w.with_samples(s).expect("same grid")
}
