//! Quantities derived from picks: group-speed estimates and relative times.

use crate::error::{Error, Result};
use crate::estimators::{common_threshold, tc_pick, ToaEstimate};
use crate::signal::{distances, Channels, SensorLayout};

/// `ĉ_i = r_i / t_i` with centre-to-centre distances `r_i`; the impact is at `t = 0`.
///
/// A sensor on top of the impact yields 0 m/s.
pub fn estimate_group_speed(
    layout: &SensorLayout,
    impact_index: usize,
    estimates: &[ToaEstimate],
) -> Result<Vec<f64>> {
    let r = distances(layout, impact_index)?;
    if r.len() != estimates.len() {
        return Err(Error::InconsistentChannels(format!(
            "{} estimates for {} sensors",
            estimates.len(),
            r.len()
        )));
    }
    r.iter()
        .zip(estimates)
        .enumerate()
        .map(|(c, (&d, e))| {
            if d == 0.0 {
                log::warn!("sensor {c} coincides with the impact; speed set to 0");
                return Ok(0.0);
            }
            match e.time {
                Some(t) if t > 0.0 => Ok(d / t),
                _ => Err(Error::NonpositiveEstimate { channel: c }),
            }
        })
        .collect()
}

/// Indices of speeds at or above `limit` (e.g. the pressure speed), which are not physical.
pub fn speed_violations(speeds: &[f64], limit: f64) -> Vec<usize> {
    speeds.iter().enumerate().filter(|(_, &c)| c >= limit).map(|(i, _)| i).collect()
}

/// `t_i − t_ref` per channel (outer) and frequency (inner); `None` where either is missing.
pub fn relative_times(estimates: &[Vec<ToaEstimate>], reference: usize) -> Result<Vec<Vec<Option<f64>>>> {
    let refs = estimates.get(reference).ok_or(Error::MissingReference(reference))?;
    if estimates.iter().any(|row| row.len() != refs.len()) {
        return Err(Error::InconsistentChannels("frequency grids differ".into()));
    }
    Ok(estimates
        .iter()
        .map(|row| {
            row.iter()
                .zip(refs)
                .map(|(e, r)| Some(e.time? - r.time?))
                .collect()
        })
        .collect())
}

/// Channel with the earliest threshold crossing at `p = 1e-2` (first on ties).
pub fn default_reference(channels: &Channels) -> Result<usize> {
    let thr = common_threshold(&channels.waveforms, 1e-2)?;
    let mut best: Option<(usize, f64)> = None;
    for (c, w) in channels.waveforms.iter().enumerate() {
        if let Some(t) = tc_pick(w, thr)?.time {
            if best.is_none_or(|(_, b)| t < b) {
                best = Some((c, t));
            }
        }
    }
    best.map(|(c, _)| c).ok_or(Error::MissingReference(0))
}
