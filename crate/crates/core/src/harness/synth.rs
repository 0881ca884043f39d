//! Synthetic sensor signals for a plate layout.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{fd_grid, trace_mode, DispersionCurve, Mode, PlateMaterial, TraceOptions};
use crate::error::{invalid, Error, Result};
use crate::signal::{
    add_noise, distances, impulse, noise_floor, propagate_dispersive, tone_burst, BurstWindow,
    Channels, ModeWeight, SensorLayout, Waveform,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// Single-cycle sine of the given duration (s).
    Impulse { duration: f64 },
    ToneBurst { f0: f64, cycles: f64, window: BurstWindow },
}

impl SourceSpec {
    pub fn build(&self, dt: f64, len: usize) -> Result<Waveform> {
        match *self {
            SourceSpec::Impulse { duration } => impulse(duration, dt, len),
            SourceSpec::ToneBurst { f0, cycles, window } => tone_burst(f0, cycles, window, dt, len),
        }
    }
}

/// Which distance the waves travel from impact to sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathLength {
    /// Centre-to-centre distance.
    Centre,
    /// Distance to the nearest patch corner, as used for the arrival markers.
    PatchEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSetup {
    pub dt: f64,
    pub n_samples: usize,
    pub source: SourceSpec,
    pub s0_weight: f64,
    pub a0_weight: f64,
    pub path: PathLength,
    /// `fd` grid used to trace the two fundamental modes (Hz·m).
    pub fd_step: f64,
    pub fd_max: f64,
}

impl Default for SyntheticSetup {
    fn default() -> Self {
        Self {
            dt: 0.2e-6,
            n_samples: 5000,
            source: SourceSpec::Impulse { duration: 10e-6 },
            s0_weight: 0.1,
            a0_weight: 1.0,
            path: PathLength::PatchEdge,
            fd_step: 1.0,
            fd_max: 5000.0,
        }
    }
}

impl SyntheticSetup {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(invalid("dt", "must be > 0"));
        }
        if self.n_samples < 2 {
            return Err(invalid("n_samples", "must be >= 2"));
        }
        if !(self.fd_step > 0.0 && self.fd_max >= self.fd_step) {
            return Err(invalid("fd_step/fd_max", "need 0 < fd_step <= fd_max"));
        }
        Ok(())
    }
}

/// S0 and A0 branches traced on one grid.
#[derive(Debug, Clone)]
pub struct Fundamentals {
    pub s0: DispersionCurve,
    pub a0: DispersionCurve,
}

pub fn trace_fundamentals(mat: &PlateMaterial, fd_step: f64, fd_max: f64) -> Result<Fundamentals> {
    let grid = fd_grid(fd_step, fd_max);
    let opts = TraceOptions::default();
    let (s0, a0) = rayon::join(
        || trace_mode(mat, Mode::S0, &grid, &opts),
        || trace_mode(mat, Mode::A0, &grid, &opts),
    );
    Ok(Fundamentals { s0: s0?, a0: a0? })
}

/// Path lengths from one impact to every sensor.
pub fn path_lengths(layout: &SensorLayout, impact: usize, path: PathLength) -> Result<Vec<f64>> {
    let r = distances(layout, impact)?;
    Ok(match path {
        PathLength::Centre => r,
        PathLength::PatchEdge => {
            let half_diag = 0.5 * layout.patch_width * std::f64::consts::SQRT_2;
            r.into_iter().map(|d| (d - half_diag).max(0.0)).collect()
        }
    })
}

/// Noise-free signals at every sensor of `layout` for the given impact.
pub fn synthesize(
    layout: &SensorLayout,
    impact: usize,
    setup: &SyntheticSetup,
    curves: &Fundamentals,
) -> Result<Channels> {
    setup.validate()?;
    layout.validate()?;
    let source = setup.source.build(setup.dt, setup.n_samples)?;
    let modes = [
        ModeWeight { curve: &curves.s0, weight: setup.s0_weight },
        ModeWeight { curve: &curves.a0, weight: setup.a0_weight },
    ];
    let names = layout.sensor_names();
    let waves = path_lengths(layout, impact, setup.path)?
        .par_iter()
        .zip(&names)
        .map(|(&r, name)| {
            propagate_dispersive(&source, &modes, r)
                .map_err(|e| Error::Channel { channel: name.clone(), source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Channels::new(names, waves)
}

/// Adds measurement noise at `snr_db` and/or a fixed-σ floor, each channel with its own stream.
pub fn contaminate(
    channels: &Channels,
    snr_db: Option<f64>,
    floor_sigma: Option<f64>,
    seed: u64,
) -> Result<Channels> {
    let mut out = Vec::with_capacity(channels.len());
    for (c, w) in channels.waveforms.iter().enumerate() {
        let mut w = w.clone();
        if let Some(snr) = snr_db {
            w = add_noise(&w, snr, stream_seed(seed, c as u64, 0))?;
        }
        if let Some(sigma) = floor_sigma {
            w = noise_floor(&w, sigma, stream_seed(seed, c as u64, 1))?;
        }
        out.push(w);
    }
    Channels::new(channels.names.clone(), out)
}

fn stream_seed(seed: u64, channel: u64, kind: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(channel.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(kind.wrapping_mul(0x94D0_49BB_1331_11EB))
}
