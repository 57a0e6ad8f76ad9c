//! Axis-aligned open-box state spaces.
//!
//! The process evolves in an open box `E = ∏ (lower_i, upper_i)`. Boxes keep
//! boundary detection and the distance to the boundary exact, which the
//! forced-jump bookkeeping relies on. Generalizing to other open sets means
//! implementing the same three predicates (`contains`, `dist_to_boundary`,
//! `snap_to_boundary`) for the new geometry.

use thiserror::Error;

/// Points within the tolerance of a face count as lying on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("state space needs at least one dimension")]
    Empty,
    #[error("lower bound must be strictly below upper bound in coordinate {0}")]
    EmptyInterval(usize),
    #[error("bounds must be finite in coordinate {0}")]
    NonFinite(usize),
}

/// Open axis-aligned box in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl StateSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SpaceError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(SpaceError::Empty);
        }
        for i in 0..lower.len() {
            if !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(SpaceError::NonFinite(i));
            }
            if lower[i] >= upper[i] {
                return Err(SpaceError::EmptyInterval(i));
            }
        }
        Ok(Self { lower, upper })
    }

    /// One-dimensional open interval `(lo, hi)`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self, SpaceError> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Strict interior membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&xi, (&lo, &hi))| xi > lo && xi < hi)
    }

    /// Membership in the closure `Ē`.
    pub fn contains_closure(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&xi, (&lo, &hi))| xi >= lo && xi <= hi)
    }

    /// Euclidean distance from an interior point to the boundary of the box
    /// (the nearest face). Zero on the boundary, negative values never occur
    /// for points of `Ē`.
    pub fn dist_to_boundary(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&xi, (&lo, &hi))| (xi - lo).min(hi - xi))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` lies within `tol` of some face while staying inside the
    /// closure of the box in the remaining coordinates.
    pub fn on_boundary(&self, x: &[f64], tol: f64) -> bool {
        self.contains_closure_with_slack(x, tol) && self.dist_to_boundary(x).abs() <= tol
    }

    fn contains_closure_with_slack(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&xi, (&lo, &hi))| xi >= lo - tol && xi <= hi + tol)
    }

    /// Snap every coordinate within `tol` of a face exactly onto that face.
    /// Returns true if any coordinate moved. Keeps `forced ⇔ on boundary`
    /// exact for forced-jump records.
    pub fn snap_to_boundary(&self, x: &mut [f64], tol: f64) -> bool {
        let mut snapped = false;
        for (xi, (&lo, &hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            if (*xi - lo).abs() <= tol {
                *xi = lo;
                snapped = true;
            } else if (*xi - hi).abs() <= tol {
                *xi = hi;
                snapped = true;
            }
        }
        snapped
    }
}
