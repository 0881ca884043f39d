//! Time-frequency analysis: STFT, Morlet CWT and the scalogram threshold picker.

mod cwt;
mod cwt_tc;
mod stft;

pub use cwt::{coi_boundary, cwt, cwt_coefficients, freq_grid, morlet, scale_for, CwtOptions, Scalogram};
pub use cwt_tc::{cwt_tc_pick, normalize_channels, scalogram_section, CwtTcPicks};
pub use stft::{stft, Spectrogram, StftWindow};
