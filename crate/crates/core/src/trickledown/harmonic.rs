//! Harmonic numbers, harmonic tail sums, and compensated accumulation.
//!
//! Conventions: `H_0 = 0`, `H_n(0) = H_n(1)`, and `H_0(0) = 0`. Several
//! published thresholds sit at margin ~0, so every condition sum in this
//! crate goes through the Neumaier accumulator.

use crate::error::{Error, Result};

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// `H_n = sum_{i=1}^{n} 1/i`, with `H_0 = 0`.
pub fn harmonic(n: usize) -> f64 {
    compensated_sum((1..=n).map(|i| 1.0 / i as f64))
}

/// `H_n(i) = sum_{j=i}^{n} 1/j`, with `H_n(0) = H_n(1)` and `H_0(0) = 0`.
pub fn harmonic_tail(n: usize, i: usize) -> Result<f64> {
    if i > n {
        return Err(Error::IndexOutOfRange { n, i });
    }
    let lo = i.max(1);
    Ok(compensated_sum((lo..=n).map(|j| 1.0 / j as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn tail_values() {
        // H_4(2) = 1/2 + 1/3 + 1/4 = 13/12
        assert!((harmonic_tail(4, 2).unwrap() - 13.0 / 12.0).abs() < 1e-15);
        // H_3(0) = H_3(1) = 11/6
        assert_eq!(harmonic_tail(3, 0).unwrap(), harmonic_tail(3, 1).unwrap());
        assert!((harmonic_tail(3, 0).unwrap() - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(harmonic_tail(0, 0).unwrap(), 0.0);
        assert!(harmonic_tail(2, 3).is_err());
        // decreasing in i
        for i in 1..=5 {
            assert!(harmonic_tail(5, i).unwrap() >= harmonic_tail(5, i + 1).unwrap_or(0.0));
        }
    }

    #[test]
    fn compensated_sum_tight_cancellation() {
        // 1 - delta - 2*eps with delta = 1 - 2*eps is exactly the rounding
        // error of delta, far below 1e-12.
        let eps = 1.0 / (193f64).sqrt();
        let delta = 1.0 - 2.0 * eps;
        let m = compensated_sum([1.0, -delta, -eps, -eps]);
        assert!(m.abs() < 1e-15, "margin {m}");
    }
}
