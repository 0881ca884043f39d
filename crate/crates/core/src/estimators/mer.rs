//! Modified energy ratio picker.

use crate::error::{invalid, Error, Result};
use crate::estimators::toa::argmax_first;
use crate::estimators::window::WindowSums;
use crate::estimators::{Method, ToaEstimate};
use crate::signal::Waveform;

/// MER trace `(|s_i|·ER_i)³` where `ER_i` is the energy in `[i, i+n_e]` over the
/// energy in `[i−n_e, i]`. Out-of-range samples take the mean of the two nearest
/// edge samples.
pub fn mer_trace(w: &Waveform, n_e: usize) -> Result<Vec<f64>> {
    let n = w.len();
    if n_e < 1 {
        return Err(invalid("n_e", "must be >= 1"));
    }
    if n_e >= n {
        return Err(Error::WindowTooLong { window: n_e, len: n });
    }
    let s = w.samples();
    let head = 0.5 * (s[0] + s[1]);
    let tail = 0.5 * (s[n - 2] + s[n - 1]);

    let mut padded = vec![head * head; n_e];
    padded.extend(s.iter().map(|v| v * v));
    padded.extend(std::iter::repeat_n(tail * tail, n_e));
    let ws = WindowSums::new(&padded);

    Ok((0..n)
        .map(|i| {
            let x = s[i].abs();
            if x == 0.0 {
                return 0.0;
            }
            // padded index of sample i is i + n_e
            let er = ws.sum(i + n_e, i + 2 * n_e + 1) / ws.sum(i, i + n_e + 1);
            (x * er).powi(3)
        })
        .collect())
}

/// Pick at the maximum of the MER trace (earliest on ties).
pub fn mer_pick(w: &Waveform, n_e: usize) -> Result<(ToaEstimate, Vec<f64>)> {
    let trace = mer_trace(w, n_e)?;
    let i = argmax_first(&trace).unwrap_or(0);
    let est = ToaEstimate::found(Method::Mer, i, w.time(i)).with_param("n_e", n_e as f64);
    Ok((est, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{noise_floor, tone_burst, BurstWindow};

    #[test]
    fn constant_signal() {
        let c = -0.7;
        let w = Waveform::new(vec![c; 300], 1.0, 0.0).unwrap();
        let (e, t) = mer_pick(&w, 25).unwrap();
        for v in &t {
            assert!((v - 0.343).abs() < 1e-12, "{v}");
        }
        assert_eq!(e.index, Some(0));
    }

    #[test]
    fn window_checks() {
        let w = Waveform::new(vec![1.0; 10], 1.0, 0.0).unwrap();
        assert!(mer_trace(&w, 0).is_err());
        assert!(matches!(mer_trace(&w, 10), Err(Error::WindowTooLong { .. })));
    }

    fn brute_force_mer(s: &[f64], ne: usize) -> Vec<f64> {
        // Direct evaluation with an explicitly padded copy of the signal.
        let n = s.len();
        let head = 0.5 * (s[0] + s[1]);
        let tail = 0.5 * (s[n - 2] + s[n - 1]);
        let at = |j: isize| -> f64 {
            if j < 0 {
                head
            } else if j >= n as isize {
                tail
            } else {
                s[j as usize]
            }
        };
        (0..n as isize)
            .map(|i| {
                let num: f64 = (i..=i + ne as isize).map(|j| at(j).powi(2)).sum();
                let den: f64 = (i - ne as isize..=i).map(|j| at(j).powi(2)).sum();
                let x = s[i as usize].abs();
                if x == 0.0 { 0.0 } else { (x * num / den).powi(3) }
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_and_lands_on_rising_half() {
        let dt = 0.2e-6;
        let burst = tone_burst(100e3, 5.0, BurstWindow::Hanning, dt, 250 + 1).unwrap();
        let mut s = vec![0.0; 3000];
        let start = 1200;
        s[start..start + 251].copy_from_slice(burst.samples());
        let w = noise_floor(&Waveform::new(s, dt, 0.0).unwrap(), 1e-4, 11).unwrap();
        let ne = 100;
        let fast = mer_trace(&w, ne).unwrap();
        let slow = brute_force_mer(w.samples(), ne);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-300));
        }
        let (e, _) = mer_pick(&w, ne).unwrap();
        let i = e.index.unwrap();
        assert!(i >= start && i <= start + 125, "{i}");
    }

    #[test]
    fn trace_is_nonnegative_and_scale_invariant() {
        let w = noise_floor(&Waveform::zeros(1500, 1.0).unwrap(), 1.0, 9).unwrap();
        let t = mer_trace(&w, 40).unwrap();
        assert!(t.iter().all(|&v| v >= 0.0));
        let (a, _) = mer_pick(&w, 40).unwrap();
        let (b, _) = mer_pick(&w.scaled(3.7), 40).unwrap();
        assert_eq!(a.index, b.index);
    }
}
