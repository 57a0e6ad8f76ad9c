//! Power-law bandwidth schedules `j ↦ c₁ · j^(-e)`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BandwidthError {
    #[error("initial bandwidth must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("decay exponent must be positive and finite, got {0}")]
    BadExponent(f64),
}

/// Deterministic shrinking bandwidth sequence used by the recursive sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSchedule {
    scale: f64,
    exponent: f64,
}

impl BandwidthSchedule {
    pub fn new(scale: f64, exponent: f64) -> Result<Self, BandwidthError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(BandwidthError::BadScale(scale));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(BandwidthError::BadExponent(exponent));
        }
        Ok(Self { scale, exponent })
    }

    /// Value at step `j >= 1`.
    #[inline]
    pub fn at(&self, j: usize) -> f64 {
        assert!(j >= 1, "bandwidth schedules start at j = 1");
        self.scale * (j as f64).powf(-self.exponent)
    }

    /// The `j = 1` value, which dominates the whole sequence.
    pub fn first(&self) -> f64 {
        self.scale
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}
