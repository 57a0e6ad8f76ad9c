//! Compensated floating-point accumulation.
//!
//! The recursive estimator sums tens of thousands of terms whose magnitudes
//! grow like `w_j^{-2d}`; a plain running sum loses digits once the sum
//! dwarfs the increments. The accumulator below keeps a Neumaier-style carry
//! so each add contributes at most a couple of ulps of error regardless of
//! the ordering of magnitudes.

/// Running sum with a Neumaier compensation term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated value.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }

    /// Sum an iterator with compensation.
    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }

    /// Fold another accumulator into this one (used for deterministic
    /// chunked reductions).
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }
}
