use thiserror::Error;

/// Errors raised by the solver, generators and pickers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),

    #[error("branch lost at fd = {fd} Hz*m: no sign change in continuation window [{lo}, {hi}] m/s")]
    BranchLost { fd: f64, lo: f64, hi: f64 },

    #[error("no traced samples in the requested fd range")]
    EmptyRange,

    #[error("tone frequency {f0} Hz violates Nyquist for dt = {dt} s")]
    NyquistViolation { f0: f64, dt: f64 },

    #[error("source content at {freq} Hz lies outside dispersion curve coverage (max {covered} Hz)")]
    BandNotCovered { freq: f64, covered: f64 },

    #[error("signal has zero rms; SNR is undefined")]
    ZeroSignal,

    #[error("cutoff {cutoff} Hz outside (0, {nyquist}) Hz")]
    CutoffOutOfRange { cutoff: f64, nyquist: f64 },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("window of {window} samples does not fit a signal of {len} samples")]
    WindowTooLong { window: usize, len: usize },

    #[error("analysis window [{lo}, {hi}] holds fewer than 3 samples")]
    DegenerateWindow { lo: usize, hi: usize },

    #[error("frequency {freq} Hz outside (0, {nyquist}) Hz")]
    FrequencyOutOfRange { freq: f64, nyquist: f64 },

    #[error("channels are inconsistent: {0}")]
    InconsistentChannels(String),

    #[error("estimate for channel {channel} is not positive")]
    NonpositiveEstimate { channel: usize },

    #[error("reference channel {0} missing")]
    MissingReference(usize),

    #[error("channel {channel}: {source}")]
    Channel { channel: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
