//! Parametric sweeps over picker settings.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{
    aic_pick, common_threshold, mer_pick, round_half_up, sla_pick, tc_pick, AicParams, AicVariant,
    Method, SlaParams, ToaEstimate,
};
use crate::signal::{lowpass, Channels, Waveform};

/// Aggregate of all grid points sharing one collapsed key (e.g. the product αβ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub channel: usize,
    pub key: f64,
    /// Grid points in the bucket, found or not.
    pub count: usize,
    pub found: usize,
    pub mean: Option<f64>,
    /// Population standard deviation of the found times.
    pub std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Names of the swept parameters.
    pub axis: Vec<String>,
    /// One row of parameter values per sweep point.
    pub points: Vec<Vec<f64>>,
    pub channels: Vec<String>,
    /// `estimates[point][channel]`.
    pub estimates: Vec<Vec<ToaEstimate>>,
    pub buckets: Vec<Bucket>,
}

impl SweepResult {
    fn new(axis: &[&str], points: Vec<Vec<f64>>, channels: Vec<String>, estimates: Vec<Vec<ToaEstimate>>) -> Self {
        Self {
            axis: axis.iter().map(|s| s.to_string()).collect(),
            points,
            channels,
            estimates,
            buckets: Vec::new(),
        }
    }

    pub fn estimate_count(&self) -> usize {
        self.estimates.iter().map(Vec::len).sum()
    }

    /// Estimates of one channel in sweep order.
    pub fn channel_series(&self, channel: usize) -> Vec<&ToaEstimate> {
        self.estimates.iter().map(|row| &row[channel]).collect()
    }

    /// Long format: `<axis…>,channel,index,time_s,flags`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for name in &self.axis {
            write!(out, "{name},")?;
        }
        writeln!(out, "channel,index,time_s,flags")?;
        for (point, row) in self.points.iter().zip(&self.estimates) {
            for (c, e) in row.iter().enumerate() {
                for v in point {
                    write!(out, "{v},")?;
                }
                let index = e.index.map(|i| i.to_string()).unwrap_or_default();
                let time = e.time.map(|t| format!("{t:e}")).unwrap_or_default();
                writeln!(out, "{},{},{},{}", self.channels[c], index, time, flags(e))?;
            }
        }
        Ok(())
    }

    pub fn write_buckets_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "channel,key,count,found,mean_s,std_s")?;
        for b in &self.buckets {
            let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.channels[b.channel],
                b.key,
                b.count,
                b.found,
                opt(b.mean),
                opt(b.std)
            )?;
        }
        Ok(())
    }
}

/// Semicolon-separated flags for CSV output.
pub fn flags(e: &ToaEstimate) -> String {
    let mut f = Vec::new();
    if !e.is_found() {
        f.push("not_found".to_string());
    }
    if e.in_coi {
        f.push("in_coi".to_string());
    }
    if let Some(note) = &e.note {
        f.push(note.replace([',', ';', '\n'], " "));
    }
    f.join(";")
}

fn failed(method: Method, err: Error) -> ToaEstimate {
    ToaEstimate::not_found(method).with_note(err.to_string())
}

fn check_increasing(name: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid(name, "empty"));
    }
    if values.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(invalid(name, "must be strictly increasing"));
    }
    Ok(())
}

/// Sensor indices sorted by arrival, NotFound last (stable).
pub fn arrival_order(estimates: &[ToaEstimate]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..estimates.len()).collect();
    idx.sort_by(|&a, &b| {
        let ta = estimates[a].time.unwrap_or(f64::INFINITY);
        let tb = estimates[b].time.unwrap_or(f64::INFINITY);
        ta.total_cmp(&tb)
    });
    idx
}

/// Threshold crossing with the common threshold `p·min_j max|s_j|` for every `p`.
pub fn tc_sweep(channels: &Channels, p_values: &[f64]) -> Result<SweepResult> {
    check_increasing("p_values", p_values)?;
    let estimates = p_values
        .par_iter()
        .map(|&p| {
            let thr = common_threshold(&channels.waveforms, p)?;
            channels
                .waveforms
                .iter()
                .map(|w| Ok(tc_pick(w, thr)?.with_param("p", p).with_param("threshold", thr)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let points = p_values.iter().map(|&p| vec![p]).collect();
    Ok(SweepResult::new(&["p"], points, channels.names.clone(), estimates))
}

/// Collapsed key for an (α, β) pair: the exact product for integer grids,
/// otherwise the product rounded to three significant digits.
pub fn alpha_beta_key(alpha: f64, beta: f64, integer_grid: bool) -> f64 {
    let p = alpha * beta;
    if integer_grid || p == 0.0 {
        return p;
    }
    let mag = 10f64.powi(p.abs().log10().floor() as i32 - 2);
    (p / mag).round() * mag
}

/// Full (α, β) grid of SLA picks on one channel, with αβ buckets.
pub fn sla_grid(
    channel: &Waveform,
    name: &str,
    alphas: &[f64],
    betas: &[f64],
    t_dom: f64,
    f_s: f64,
) -> Result<SweepResult> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(invalid("alphas/betas", "empty grid"));
    }
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    let estimates: Vec<Vec<ToaEstimate>> = pairs
        .par_iter()
        .map(|&(alpha, beta)| {
            let params = SlaParams { alpha, beta, t_dom, f_s };
            let e = match sla_pick(channel, &params) {
                Ok((e, _)) => e,
                Err(err) => failed(Method::Sla, err)
                    .with_param("alpha", alpha)
                    .with_param("beta", beta),
            };
            vec![e]
        })
        .collect();
    let integer_grid = alphas.iter().chain(betas).all(|v| v.fract() == 0.0);
    let keys: Vec<f64> = pairs.iter().map(|&(a, b)| alpha_beta_key(a, b, integer_grid)).collect();
    let points = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
    let mut result = SweepResult::new(&["alpha", "beta"], points, vec![name.to_string()], estimates);
    result.buckets = collapse(&result, &keys);
    Ok(result)
}

/// Groups sweep points by `keys` (one per point) and aggregates each channel's times.
pub fn collapse(result: &SweepResult, keys: &[f64]) -> Vec<Bucket> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let mut buckets = Vec::new();
    for c in 0..result.channels.len() {
        let mut start = 0;
        while start < order.len() {
            let key = keys[order[start]];
            let mut end = start;
            while end < order.len() && keys[order[end]] == key {
                end += 1;
            }
            let times: Vec<f64> = order[start..end]
                .iter()
                .filter_map(|&i| result.estimates[i][c].time)
                .collect();
            let (mean, std) = mean_std(&times);
            buckets.push(Bucket { channel: c, key, count: end - start, found: times.len(), mean, std });
            start = end;
        }
    }
    buckets
}

fn mean_std(x: &[f64]) -> (Option<f64>, Option<f64>) {
    if x.is_empty() {
        return (None, None);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.max(0.0).sqrt()))
}

/// MER picks with `n_e = round(α·f_s·t_dom)` for each α.
pub fn mer_sweep(channel: &Waveform, name: &str, alphas: &[f64], t_dom: f64, f_s: f64) -> Result<SweepResult> {
    check_increasing("alphas", alphas)?;
    let estimates = alphas
        .par_iter()
        .map(|&alpha| {
            let n_e = round_half_up(alpha * f_s * t_dom);
            let e = match mer_pick(channel, n_e) {
                Ok((e, _)) => e,
                Err(err) => failed(Method::Mer, err),
            };
            vec![e.with_param("alpha", alpha)]
        })
        .collect();
    let points = alphas.iter().map(|&a| vec![a]).collect();
    Ok(SweepResult::new(&["alpha"], points, vec![name.to_string()], estimates))
}

/// AIC picks for each override of the first window's upper bound (s).
pub fn aic_window_sweep(
    channel: &Waveform,
    name: &str,
    params: &AicParams,
    ub_values: &[f64],
    variant: AicVariant,
) -> Result<SweepResult> {
    check_increasing("ub_values", ub_values)?;
    params.validate()?;
    let estimates = ub_values
        .par_iter()
        .map(|&ub| {
            let e = aic_pick(channel, params, variant, Some(ub))
                .unwrap_or_else(|err| failed(variant.method(), err));
            vec![e.with_param("t_first_ub", ub)]
        })
        .collect();
    let points = ub_values.iter().map(|&u| vec![u]).collect();
    Ok(SweepResult::new(&["t_first_ub"], points, vec![name.to_string()], estimates))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "picker", rename_all = "snake_case")]
pub enum CutoffPicker {
    Mer { n_e: usize },
    AicGm { params: AicParams },
}

impl CutoffPicker {
    pub fn pick(&self, w: &Waveform) -> Result<ToaEstimate> {
        match self {
            CutoffPicker::Mer { n_e } => Ok(mer_pick(w, *n_e)?.0),
            CutoffPicker::AicGm { params } => aic_pick(w, params, AicVariant::Gm, None),
        }
    }

    fn method(&self) -> Method {
        match self {
            CutoffPicker::Mer { .. } => Method::Mer,
            CutoffPicker::AicGm { .. } => Method::AicGm,
        }
    }
}

/// Low-pass every channel at each cutoff, then pick. The filtered energy is
/// reported in each estimate's `energy` parameter.
pub fn cutoff_sweep(channels: &Channels, cutoffs: &[f64], picker: &CutoffPicker) -> Result<SweepResult> {
    check_increasing("cutoffs", cutoffs)?;
    let nyquist = 0.5 * channels.waveforms[0].sample_rate();
    if let Some(&bad) = cutoffs.iter().find(|&&f| !(f > 0.0 && f < nyquist)) {
        return Err(Error::CutoffOutOfRange { cutoff: bad, nyquist });
    }
    let estimates = cutoffs
        .par_iter()
        .map(|&fc| {
            channels
                .waveforms
                .iter()
                .map(|w| {
                    let e = match lowpass(w, fc) {
                        Ok(f) => picker
                            .pick(&f)
                            .unwrap_or_else(|err| failed(picker.method(), err))
                            .with_param("energy", f.stats().energy),
                        Err(err) => failed(picker.method(), err),
                    };
                    e.with_param("cutoff", fc)
                })
                .collect()
        })
        .collect();
    let points = cutoffs.iter().map(|&f| vec![f]).collect();
    Ok(SweepResult::new(&["cutoff"], points, channels.names.clone(), estimates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{delay_samples, noise_floor, tone_burst, BurstWindow};

    fn bursts(shifts: &[usize]) -> Channels {
        let src = tone_burst(100e3, 5.0, BurstWindow::Hanning, 0.2e-6, 3000).unwrap();
        let ws: Vec<Waveform> = shifts.iter().map(|&s| delay_samples(&src, s)).collect();
        let names = (1..=ws.len()).map(|i| format!("S{i}")).collect();
        Channels::new(names, ws).unwrap()
    }

    #[test]
    fn tc_sweep_shape_and_order() {
        let ch = bursts(&[900, 400, 1300, 905]);
        let ps = [1e-3, 1e-2, 1e-1];
        let r = tc_sweep(&ch, &ps).unwrap();
        assert_eq!(r.estimate_count(), ps.len() * ch.len());
        for row in &r.estimates {
            assert_eq!(arrival_order(row), vec![1, 0, 3, 2]);
        }
        let one = tc_sweep(&ch, &[1e-2]).unwrap();
        assert_eq!(one.estimates[0], r.estimates[1]);
        assert!(tc_sweep(&ch, &[1e-2, 1e-3]).is_err());
    }

    #[test]
    fn sla_grid_buckets_conserve_count() {
        let ch = bursts(&[1000]);
        let w = noise_floor(&ch.waveforms[0], 1e-4, 3).unwrap();
        let alphas = [1.0, 2.0, 3.0, 4.0, 6.0];
        let betas = [1.0, 2.0, 3.0, 4.0];
        let r = sla_grid(&w, "S1", &alphas, &betas, 10e-6, 5e6).unwrap();
        assert_eq!(r.estimate_count(), 20);
        assert_eq!(r.buckets.iter().map(|b| b.count).sum::<usize>(), 20);
        let b12 = r.buckets.iter().find(|b| b.key == 12.0).unwrap();
        // (3, 4), (4, 3) and (6, 2)
        assert_eq!(b12.count, 3);
        assert!(r.buckets.iter().all(|b| b.std.is_none_or(|s| s >= 0.0)));
    }

    #[test]
    fn single_point_grid_has_zero_std() {
        let ch = bursts(&[1000]);
        let r = sla_grid(&ch.waveforms[0], "S1", &[2.0], &[3.0], 10e-6, 5e6).unwrap();
        assert_eq!(r.buckets.len(), 1);
        assert_eq!(r.buckets[0].std, Some(0.0));
    }

    #[test]
    fn too_long_windows_are_flagged_not_fatal() {
        let ch = bursts(&[1000]);
        let r = sla_grid(&ch.waveforms[0], "S1", &[1.0], &[1.0, 100.0], 10e-6, 5e6).unwrap();
        assert!(r.estimates[0][0].is_found());
        assert!(!r.estimates[1][0].is_found());
        assert!(flags(&r.estimates[1][0]).contains("not_found"));
    }

    #[test]
    fn non_integer_keys_round_to_three_digits() {
        assert_eq!(alpha_beta_key(1.5, 2.0, false), 3.0);
        assert!((alpha_beta_key(1.234, 5.678, false) - 7.01).abs() < 1e-12);
        assert_eq!(alpha_beta_key(7.0, 9.0, true), 63.0);
    }

    #[test]
    fn constant_channel_mer_sweep() {
        let w = Waveform::new(vec![0.3; 2000], 0.2e-6, 0.0).unwrap();
        let r = mer_sweep(&w, "c", &[1.0, 5.0, 10.0], 10e-6, 5e6).unwrap();
        assert!(r.estimates.iter().all(|row| row[0].index == Some(0)));
    }

    #[test]
    fn gm_jumps_to_later_minimum_but_lm_stays() {
        use crate::signal::GaussianNoise;
        let (k1, k2, dt) = (1000usize, 2500usize, 0.2e-6);
        let mut g = GaussianNoise::new(21);
        let s: Vec<f64> = (0..4000)
            .map(|i| {
                let sd = if i < k1 { 1e-8 } else if i < k2 { 1e-4 } else { 1.0 };
                sd * g.next_standard()
            })
            .collect();
        let w = Waveform::new(s, dt, 0.0).unwrap();
        let ubs: Vec<f64> = (0..10).map(|i| (k1 as f64 * dt) + 10e-6 + i as f64 * 60e-6).collect();
        let p = AicParams::default();
        let lm = aic_window_sweep(&w, "S", &p, &ubs, AicVariant::Lm).unwrap();
        let gm = aic_window_sweep(&w, "S", &p, &ubs, AicVariant::Gm).unwrap();
        let lm_idx: Vec<_> = lm.channel_series(0).iter().map(|e| e.index.unwrap()).collect();
        let gm_idx: Vec<_> = gm.channel_series(0).iter().map(|e| e.index.unwrap()).collect();
        assert!(lm_idx.iter().all(|&i| i == lm_idx[0] && i.abs_diff(k1) <= 2), "{lm_idx:?}");
        assert!(gm_idx[0].abs_diff(k1) <= 2);
        assert!(gm_idx.last().unwrap().abs_diff(k2) <= 2, "{gm_idx:?}");
    }

    #[test]
    fn near_nyquist_cutoff_is_nearly_allpass() {
        let ch = bursts(&[800, 1200]);
        let ch = Channels::new(
            ch.names.clone(),
            ch.waveforms.iter().enumerate().map(|(i, w)| noise_floor(w, 1e-4, i as u64).unwrap()).collect(),
        )
        .unwrap();
        let picker = CutoffPicker::AicGm { params: AicParams::default() };
        let nyq = 0.5 * ch.waveforms[0].sample_rate();
        let r = cutoff_sweep(&ch, &[0.99 * nyq], &picker).unwrap();
        for (c, w) in ch.waveforms.iter().enumerate() {
            let raw = picker.pick(w).unwrap().index.unwrap();
            assert!(r.estimates[0][c].index.unwrap().abs_diff(raw) <= 1);
        }
        assert!(cutoff_sweep(&ch, &[nyq], &picker).is_err());
    }

    #[test]
    fn lower_cutoff_never_adds_energy() {
        let ch = bursts(&[800]);
        let cutoffs = [20e3, 50e3, 100e3, 200e3, 1e6];
        let r = cutoff_sweep(&ch, &cutoffs, &CutoffPicker::Mer { n_e: 100 }).unwrap();
        let e: Vec<f64> = r.estimates.iter().map(|row| row[0].params["energy"]).collect();
        for p in e.windows(2) {
            assert!(p[0] <= p[1] * (1.0 + 1e-9), "{e:?}");
        }
    }
}
