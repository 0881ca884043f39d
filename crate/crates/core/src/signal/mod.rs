//! Waveforms, synthetic signal generation, noise and filtering.

mod filter;
mod generate;
mod layout;
mod noise;
mod waveform;

pub use filter::{lowpass, Biquad};
pub use generate::{
    delay_samples, impulse, propagate_dispersive, propagate_dispersive_padded, tone_burst,
    BurstWindow, ModeWeight, DEFAULT_PAD_FACTOR, OCCUPIED_BAND_FLOOR,
};
pub use layout::{distances, reference_markers, Markers, SensorLayout};
pub use noise::{add_noise, noise_floor, GaussianNoise, MAX_SNR_DB};
pub use waveform::{stats, Channels, Stats, Waveform};
