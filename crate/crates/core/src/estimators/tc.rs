//! Time-domain threshold crossing.

use crate::error::{invalid, Error, Result};
use crate::estimators::{Method, ToaEstimate};
use crate::signal::Waveform;

/// Earliest sample with `|s| > threshold`.
pub fn tc_pick(w: &Waveform, threshold: f64) -> Result<ToaEstimate> {
    if !(threshold > 0.0) {
        return Err(invalid("threshold", "must be > 0"));
    }
    let est = match w.samples().iter().position(|x| x.abs() > threshold) {
        Some(i) => ToaEstimate::found(Method::Tc, i, w.time(i)),
        None => ToaEstimate::not_found(Method::Tc).with_note("threshold never exceeded"),
    };
    Ok(est.with_param("threshold", threshold))
}

/// `p · min_j max_i |s_j(t_i)|`: a threshold every channel is guaranteed to reach for `p ≤ 1`.
pub fn common_threshold(channels: &[Waveform], p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid("p", "must be > 0"));
    }
    if channels.is_empty() {
        return Err(Error::InconsistentChannels("no channels".into()));
    }
    let base = channels
        .iter()
        .map(Waveform::max_abs)
        .fold(f64::INFINITY, f64::min);
    Ok(p * base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_crossing() {
        let w = Waveform::new(vec![0.0, 0.0, 1.0, 0.0], 1.0, 0.0).unwrap();
        let e = tc_pick(&w, 0.5).unwrap();
        assert_eq!((e.index, e.time), (Some(2), Some(2.0)));
    }

    #[test]
    fn crossing_uses_magnitude() {
        let w = Waveform::new(vec![0.1, -0.9, 1.0], 1.0, 10.0).unwrap();
        assert_eq!(tc_pick(&w, 0.5).unwrap().time, Some(11.0));
    }

    #[test]
    fn never_exceeded() {
        let w = Waveform::new(vec![0.0, 0.4, -0.2], 1.0, 0.0).unwrap();
        let e = tc_pick(&w, 0.5).unwrap();
        assert!(!e.is_found());
        assert!(tc_pick(&w, 0.0).is_err());
    }

    #[test]
    fn common_threshold_uses_smallest_peak() {
        let a = Waveform::new(vec![0.0, 2.0, -4.0], 1.0, 0.0).unwrap();
        let b = Waveform::new(vec![0.5, -1.5, 0.0], 1.0, 0.0).unwrap();
        assert_eq!(common_threshold(&[a.clone(), b], 0.1).unwrap(), 0.15000000000000002);
        assert_eq!(common_threshold(&[a.clone(), a], 0.5).unwrap(), 2.0);
    }

    proptest! {
        #[test]
        fn monotone_in_threshold(
            s in proptest::collection::vec(-1.0f64..1.0, 2..200),
            p1 in 1e-3f64..1.0,
            p2 in 1e-3f64..1.0,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let w = Waveform::new(s, 1.0, 0.0).unwrap();
            let a = tc_pick(&w, lo).unwrap();
            let b = tc_pick(&w, hi).unwrap();
            match (a.index, b.index) {
                (Some(i), Some(j)) => prop_assert!(i <= j),
                (None, Some(_)) => prop_assert!(false, "lower threshold found nothing"),
                _ => {}
            }
        }
    }
}
