//! Compensated prefix sums for sliding-window energies.

/// Prefix sums held as double-double pairs, so that a window sum is accurate to
/// the window's own magnitude rather than to the running total.
pub(crate) struct WindowSums {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl WindowSums {
    pub fn new(values: &[f64]) -> Self {
        let mut hi = Vec::with_capacity(values.len() + 1);
        let mut lo = Vec::with_capacity(values.len() + 1);
        let (mut h, mut l) = (0.0, 0.0);
        hi.push(h);
        lo.push(l);
        for &v in values {
            let (s, e) = two_sum(h, v);
            let (s2, e2) = two_sum(s, l + e);
            h = s2;
            l = e2;
            hi.push(h);
            lo.push(l);
        }
        Self { hi, lo }
    }

    /// Sum of `values[a..b]`.
    pub fn sum(&self, a: usize, b: usize) -> f64 {
        let (s, e) = two_sum(self.hi[b], -self.hi[a]);
        s + (e + (self.lo[b] - self.lo[a]))
    }
}
