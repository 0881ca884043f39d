//! Threshold crossing on cross-channel normalized scalograms.

use crate::error::{invalid, Error, Result};
use crate::estimators::{Method, ToaEstimate};
use crate::signal::Waveform;
use crate::tfa::Scalogram;

/// Shared normalizer `W̄² = min over channels of max |W|²`, stored in every scalogram.
pub fn normalize_channels(scalograms: &mut [Scalogram]) -> Result<f64> {
    check_consistent(scalograms)?;
    let wbar = scalograms.iter().map(|s| s.max_value()).fold(f64::INFINITY, f64::min);
    if !(wbar > 0.0) {
        return Err(Error::ZeroSignal);
    }
    for s in scalograms.iter_mut() {
        s.normalizer = wbar;
    }
    Ok(wbar)
}

fn check_consistent(scalograms: &[Scalogram]) -> Result<()> {
    let Some(first) = scalograms.first() else {
        return Err(Error::InconsistentChannels("no channels".into()));
    };
    for (c, s) in scalograms.iter().enumerate().skip(1) {
        if s.freqs != first.freqs {
            return Err(Error::InconsistentChannels(format!("channel {c}: frequency grid differs")));
        }
        if s.n_times != first.n_times || s.dt != first.dt || s.t0 != first.t0 {
            return Err(Error::InconsistentChannels(format!("channel {c}: time grid differs")));
        }
    }
    Ok(())
}

/// Picks per channel (outer) and analysed frequency (inner).
#[derive(Debug, Clone, PartialEq)]
pub struct CwtTcPicks {
    pub normalizer: f64,
    pub freqs: Vec<f64>,
    pub picks: Vec<Vec<ToaEstimate>>,
}

/// Earliest time where `|W|²/W̄²` exceeds `threshold`, per channel and frequency.
///
/// `freq_subset` selects analysis frequencies by nearest bin; all bins when `None`.
pub fn cwt_tc_pick(
    scalograms: &[Scalogram],
    threshold: f64,
    freq_subset: Option<&[f64]>,
) -> Result<CwtTcPicks> {
    if !(threshold > 0.0) {
        return Err(invalid("threshold", "must be > 0"));
    }
    let mut owned = scalograms.to_vec();
    let wbar = normalize_channels(&mut owned)?;
    let first = &owned[0];
    let cols: Vec<usize> = match freq_subset {
        Some(fs) => fs.iter().map(|&f| first.nearest_freq(f)).collect(),
        None => (0..first.freqs.len()).collect(),
    };
    let level = threshold * wbar;
    let picks = owned
        .iter()
        .map(|s| {
            cols.iter()
                .map(|&j| {
                    let f = s.freqs[j];
                    let hit = (0..s.n_times).find(|&i| s.value(i, j) > level);
                    let mut e = match hit {
                        Some(i) => {
                            let mut e = ToaEstimate::found(Method::CwtTc, i, s.time(i));
                            e.in_coi = s.in_coi(i, j);
                            e
                        }
                        None => ToaEstimate::not_found(Method::CwtTc),
                    };
                    e.frequency = Some(f);
                    e.with_param("threshold", threshold).with_param("normalizer", wbar)
                })
                .collect()
        })
        .collect();
    Ok(CwtTcPicks { normalizer: wbar, freqs: cols.iter().map(|&j| first.freqs[j]).collect(), picks })
}

/// Time series `|W|²/normalizer` at the analysis frequency nearest to `f`.
pub fn scalogram_section(s: &Scalogram, f: f64) -> Result<Waveform> {
    let j = s.nearest_freq(f);
    let norm = if s.normalizer > 0.0 { s.normalizer } else { 1.0 };
    let series = (0..s.n_times).map(|i| s.value(i, j) / norm).collect();
    Waveform::new(series, s.dt, s.t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::tc_pick;
    use crate::signal::{delay_samples, tone_burst, BurstWindow};
    use crate::tfa::{cwt, freq_grid, CwtOptions};

    fn burst_at(shift: usize, amp: f64) -> Waveform {
        let src = tone_burst(80e3, 5.0, BurstWindow::Hanning, 0.2e-6, 5000).unwrap();
        delay_samples(&src, shift).scaled(amp)
    }

    fn scalograms(ws: &[Waveform]) -> Vec<Scalogram> {
        let freqs = freq_grid(50e3, 100e3, 5e3).unwrap();
        ws.iter().map(|w| cwt(w, &freqs, &CwtOptions::default()).unwrap()).collect()
    }

    #[test]
    fn boundary_threshold_hits_only_the_peak() {
        let sc = scalograms(&[burst_at(2000, 1.0)]);
        let peak = sc[0].max_value();
        let (mut pi, mut pj) = (0, 0);
        for i in 0..sc[0].n_times {
            for j in 0..sc[0].freqs.len() {
                if sc[0].value(i, j) == peak {
                    (pi, pj) = (i, j);
                }
            }
        }
        let r = cwt_tc_pick(&sc, 1.0 - 1e-12, None).unwrap();
        for (j, e) in r.picks[0].iter().enumerate() {
            if j == pj {
                assert_eq!(e.index, Some(pi));
            } else {
                assert!(!e.is_found(), "{j}");
            }
        }
        // the strict inequality never fires at exactly 1
        let r = cwt_tc_pick(&sc, 1.0, None).unwrap();
        assert!(r.picks[0].iter().all(|e| !e.is_found()));
    }

    #[test]
    fn crossing_at_start_is_flagged() {
        let sc = scalograms(&[burst_at(0, 1.0), burst_at(2500, 1.0)]);
        let r = cwt_tc_pick(&sc, 1e-3, None).unwrap();
        let e = &r.picks[0][0];
        assert_eq!(e.index, Some(0));
        assert!(e.in_coi);
        assert!(!r.picks[1][0].in_coi);
    }

    #[test]
    fn threshold_monotone_and_scale_invariant() {
        let ws = [burst_at(1500, 1.0), burst_at(2300, 0.6)];
        let sc = scalograms(&ws);
        let lo = cwt_tc_pick(&sc, 1e-3, None).unwrap();
        let hi = cwt_tc_pick(&sc, 1e-2, None).unwrap();
        for c in 0..2 {
            for (a, b) in lo.picks[c].iter().zip(&hi.picks[c]) {
                if let (Some(x), Some(y)) = (a.index, b.index) {
                    assert!(x <= y);
                }
            }
        }
        let scaled: Vec<Waveform> = ws.iter().map(|w| w.scaled(8.0)).collect();
        let r2 = cwt_tc_pick(&scalograms(&scaled), 1e-2, None).unwrap();
        for c in 0..2 {
            let a: Vec<_> = hi.picks[c].iter().map(|e| e.index).collect();
            let b: Vec<_> = r2.picks[c].iter().map(|e| e.index).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn section_crossing_matches_pick() {
        let mut sc = scalograms(&[burst_at(1500, 1.0), burst_at(2300, 0.6)]);
        let r = cwt_tc_pick(&sc, 1e-2, Some(&[70e3])).unwrap();
        normalize_channels(&mut sc).unwrap();
        for c in 0..2 {
            let sec = scalogram_section(&sc[c], 70e3).unwrap();
            let e = tc_pick(&sec, 1e-2).unwrap();
            assert_eq!(e.index, r.picks[c][0].index);
        }
        // the weaker channel sets W̄², so its section peaks at exactly 1
        let sec = scalogram_section(&sc[1], 80e3).unwrap();
        assert!(sec.max_abs() <= 1.0);
    }

    #[test]
    fn zero_section() {
        let w = Waveform::zeros(300, 1e-6).unwrap();
        let s = cwt(&w, &[50e3], &CwtOptions::default()).unwrap();
        assert!(scalogram_section(&s, 50e3).unwrap().samples().iter().all(|&v| v == 0.0));
        assert_eq!(cwt_tc_pick(&[s], 0.1, None), Err(Error::ZeroSignal));
    }

    #[test]
    fn inconsistent_grids() {
        let a = scalograms(&[burst_at(100, 1.0)]);
        let w = Waveform::zeros(4000, 0.2e-6).unwrap();
        let b = cwt(&w, &[60e3], &CwtOptions::default()).unwrap();
        let all = vec![a[0].clone(), b];
        assert!(matches!(cwt_tc_pick(&all, 0.1, None), Err(Error::InconsistentChannels(_))));
    }
}
