//! Thin helpers over `rustfft` for real signals.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward DFT of `x` zero-padded to `len` (no scaling).
pub fn forward_real(x: &[f64], len: usize) -> Vec<Complex64> {
    assert!(len >= x.len());
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(len, Complex64::new(0.0, 0.0));
    forward_in_place(&mut buf);
    buf
}

pub fn forward_in_place(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

/// Inverse DFT scaled by `1/len`, so `inverse(forward(x)) == x`.
pub fn inverse_in_place(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

pub fn next_fast_len(n: usize) -> usize {
    n.next_power_of_two()
}

/// Signed frequency (Hz) of DFT bin `j` for length `len` and step `dt`.
pub fn bin_frequency(j: usize, len: usize, dt: f64) -> f64 {
    let j = if j <= len / 2 { j as f64 } else { j as f64 - len as f64 };
    j / (len as f64 * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip(x in proptest::collection::vec(-1e3f64..1e3, 2..300), extra in 0usize..64) {
            let len = x.len() + extra;
            let mut spec = forward_real(&x, len);
            inverse_in_place(&mut spec);
            let err: f64 = x.iter().zip(&spec).map(|(a, b)| (a - b.re).powi(2) + b.im.powi(2)).sum();
            let norm: f64 = x.iter().map(|a| a * a).sum::<f64>().max(1e-300);
            prop_assert!((err / norm).sqrt() < 1e-10);
        }
    }

    #[test]
    fn bin_frequencies() {
        assert_eq!(bin_frequency(0, 8, 0.5), 0.0);
        assert_eq!(bin_frequency(4, 8, 0.5), 1.0);
        assert_eq!(bin_frequency(5, 8, 0.5), -0.75);
    }
}
