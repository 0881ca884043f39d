//! Short-term / long-term average ratio picker.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::toa::{argmax_first, round_half_up};
use crate::estimators::window::WindowSums;
use crate::estimators::{Method, ToaEstimate};
use crate::signal::Waveform;

/// Window parameterisation `n_s = α·f_s·t_dom`, `n_l = β·n_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlaParams {
    pub alpha: f64,
    pub beta: f64,
    /// Period of the dominant frequency (s).
    pub t_dom: f64,
    /// Sampling frequency (Hz).
    pub f_s: f64,
}

impl SlaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 1.0) {
            return Err(invalid("alpha", "must be >= 1"));
        }
        if !(self.beta >= 1.0) {
            return Err(invalid("beta", "must be >= 1"));
        }
        if !(self.t_dom > 0.0 && self.f_s > 0.0) {
            return Err(invalid("t_dom/f_s", "must be > 0"));
        }
        if self.n_short() < 1 {
            return Err(invalid("alpha", "short window rounds to zero samples"));
        }
        Ok(())
    }

    pub fn n_short(&self) -> usize {
        round_half_up(self.alpha * self.f_s * self.t_dom)
    }

    pub fn n_long(&self) -> usize {
        round_half_up(self.beta * self.n_short() as f64)
    }
}

/// Sums of `sq` over trailing windows of `n` samples ending at each index;
/// indices before 0 contribute `pad_sq`.
pub(crate) fn trailing_sums(sq: &[f64], n: usize, pad_sq: f64) -> Vec<f64> {
    let mut padded = vec![pad_sq; n];
    padded.extend_from_slice(sq);
    let ws = WindowSums::new(&padded);
    (0..sq.len()).map(|i| ws.sum(i + 1, i + n + 1)).collect()
}

/// STA/LTA ratio of squared samples with explicit window lengths.
pub fn sla_ratio(w: &Waveform, n_short: usize, n_long: usize) -> Result<Vec<f64>> {
    if n_short == 0 || n_long < n_short {
        return Err(invalid("windows", "need 1 <= n_short <= n_long"));
    }
    if n_long >= w.len() {
        return Err(Error::WindowTooLong {
            window: n_long,
            len: w.len(),
        });
    }
    let s = w.samples();
    let pad = 0.5 * (s[0] + s[1]);
    let sq: Vec<f64> = s.iter().map(|x| x * x).collect();
    let sta = trailing_sums(&sq, n_short, pad * pad);
    let lta = trailing_sums(&sq, n_long, pad * pad);
    let (ns, nl) = (n_short as f64, n_long as f64);
    Ok(sta
        .iter()
        .zip(&lta)
        .map(|(&a, &b)| if b > 0.0 { (a / ns) / (b / nl) } else { 1.0 })
        .collect())
}

/// Pick at the largest forward difference `R[i+1] − R[i]` of the STA/LTA ratio.
pub fn sla_pick_windows(
    w: &Waveform,
    n_short: usize,
    n_long: usize,
) -> Result<(ToaEstimate, Vec<f64>)> {
    let ratio = sla_ratio(w, n_short, n_long)?;
    let diff: Vec<f64> = ratio.windows(2).map(|p| p[1] - p[0]).collect();
    let i = argmax_first(&diff).unwrap_or(0);
    let est = ToaEstimate::found(Method::Sla, i, w.time(i))
        .with_param("n_s", n_short as f64)
        .with_param("n_l", n_long as f64);
    Ok((est, ratio))
}

pub fn sla_pick(w: &Waveform, params: &SlaParams) -> Result<(ToaEstimate, Vec<f64>)> {
    params.validate()?;
    let (mut est, ratio) = sla_pick_windows(w, params.n_short(), params.n_long())?;
    est.params.insert("alpha".into(), params.alpha);
    est.params.insert("beta".into(), params.beta);
    Ok((est, ratio))
}
