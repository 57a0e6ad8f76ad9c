//! Streaming recursive kernel estimators.
//!
//! For a stream of jump records indexed `j = 1, 2, …` the state maintains,
//! at every registered evaluation point,
//!
//! ```text
//! denominator(x)   = Σ_j v_j^{-d}  K((Z_j⁻ - x) / v_j)
//! numerator(x, y)  = Σ_j w_j^{-2d} K((Z_j⁻ - x) / w_j) K((Z_j - y) / w_j)
//! ```
//!
//! with shrinking bandwidths `v_j = v₁ j^{-α}`, `w_j = w₁ j^{-β}`. After `m`
//! records (so `n = m - 1`), the marginal invariant-density estimate is
//! `p̂ₙ(x) = denominator / n`, the pair-density estimate is
//! `ĥₙ(x, y) = numerator / n`, and the transition-density estimate is the
//! raw ratio `q̂ₙ(x, y) = numerator / denominator` (the `1/n` factors cancel
//! exactly, so the ratio never routes through the divisions).
//!
//! Because the bandwidth sequences decrease, a record farther than
//! `δ·v₁` (resp. `δ·w₁`) from an evaluation point contributes exactly zero
//! to every term, which makes the support skip in [`EstimatorState::update`]
//! exact rather than approximate. Sums are compensated; terms reach
//! magnitudes of order `w_j^{-2d}` and plain accumulation would shed digits
//! over 5·10⁴ records.

use crate::accum::CompensatedSum;
use crate::bandwidth::BandwidthSchedule;
use crate::kernel::ProductKernel;
use crate::space::StateSpace;
use crate::trajectory::JumpRecord;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("targets must be registered before streaming begins")]
    RegisterAfterUpdate,
    #[error("evaluation point {0:?} lies outside the open state space")]
    OutsideDomain(Vec<f64>),
    #[error("record {got} arrived out of order, expected index {expected}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("point x = {0:?} was never registered")]
    Unregistered(Vec<f64>),
    #[error("pair (x, y) = ({0:?}, {1:?}) was never registered")]
    UnregisteredPair(Vec<f64>, Vec<f64>),
    #[error("marginal reads need at least two records, only {0} consumed")]
    TooFewRecords(usize),
    #[error("denominator at x = {0:?} is zero: no pre-jump observations near x yet")]
    ZeroDenominator(Vec<f64>),
    #[error("estimator is {expected}-dimensional, got a point of dimension {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// What to track while streaming: a marginal point, a pair, a transition
/// curve (one `x`, many `y`), or a marginal grid.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalTarget {
    Marginal { x: Vec<f64> },
    Pair { x: Vec<f64>, y: Vec<f64> },
    Curve { x: Vec<f64>, grid: Vec<Vec<f64>> },
    MarginalGrid { xs: Vec<Vec<f64>> },
}

impl EvalTarget {
    /// One-dimensional pair target.
    pub fn pair1(x: f64, y: f64) -> Self {
        EvalTarget::Pair {
            x: vec![x],
            y: vec![y],
        }
    }

    /// One-dimensional marginal target.
    pub fn marginal1(x: f64) -> Self {
        EvalTarget::Marginal { x: vec![x] }
    }

    /// One-dimensional curve target.
    pub fn curve1(x: f64, ys: &[f64]) -> Self {
        EvalTarget::Curve {
            x: vec![x],
            grid: ys.iter().map(|&y| vec![y]).collect(),
        }
    }

    /// One-dimensional marginal grid.
    pub fn grid1(xs: &[f64]) -> Self {
        EvalTarget::MarginalGrid {
            xs: xs.iter().map(|&x| vec![x]).collect(),
        }
    }
}

/// Bit-exact hash key for an evaluation point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct PointKey(Vec<u64>);

fn key_of(p: &[f64]) -> PointKey {
    PointKey(p.iter().map(|v| v.to_bits()).collect())
}

#[derive(Debug, Clone)]
struct PairCell {
    y: Vec<f64>,
    numerator: CompensatedSum,
}

/// All accumulators attached to one evaluation abscissa `x`. Every pair and
/// curve point with the same `x` shares the single denominator.
#[derive(Debug, Clone)]
struct Site {
    x: Vec<f64>,
    denominator: CompensatedSum,
    cells: Vec<PairCell>,
    cell_index: HashMap<PointKey, usize>,
}

/// Streaming accumulator state over one trajectory.
///
/// Single-writer: records must arrive in index order through
/// [`update`](Self::update). Reads may interleave with updates (the harness
/// snapshots estimates at several sample sizes during one pass).
#[derive(Debug, Clone)]
pub struct EstimatorState {
    space: StateSpace,
    kernel: ProductKernel,
    v: BandwidthSchedule,
    w: BandwidthSchedule,
    consumed: usize,
    sites: Vec<Site>,
    site_index: HashMap<PointKey, usize>,
    skip_radius_v: f64,
    skip_radius_w: f64,
    warnings: Vec<String>,
}

impl EstimatorState {
    pub fn new(
        space: StateSpace,
        kernel: ProductKernel,
        v: BandwidthSchedule,
        w: BandwidthSchedule,
    ) -> Result<Self, EstimatorError> {
        if kernel.dim() != space.dim() {
            return Err(EstimatorError::DimensionMismatch {
                expected: space.dim(),
                got: kernel.dim(),
            });
        }
        let skip_radius_v = kernel.support_radius() * v.first();
        let skip_radius_w = kernel.support_radius() * w.first();
        Ok(Self {
            space,
            kernel,
            v,
            w,
            consumed: 0,
            sites: Vec::new(),
            site_index: HashMap::new(),
            skip_radius_v,
            skip_radius_w,
            warnings: Vec::new(),
        })
    }

    /// Number of records consumed so far (`m`).
    pub fn records_consumed(&self) -> usize {
        self.consumed
    }

    /// Effective sample size `n = m - 1` entering the `1/n` normalizations.
    pub fn sample_size(&self) -> usize {
        self.consumed.saturating_sub(1)
    }

    /// Warnings accumulated at registration (support-condition violations).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Register a target. Only allowed before the first record; every
    /// coordinate must lie strictly inside the state space.
    pub fn register(&mut self, target: &EvalTarget) -> Result<(), EstimatorError> {
        if self.consumed > 0 {
            return Err(EstimatorError::RegisterAfterUpdate);
        }
        match target {
            EvalTarget::Marginal { x } => {
                self.add_site(x)?;
            }
            EvalTarget::Pair { x, y } => {
                let site = self.add_site(x)?;
                self.add_cell(site, y)?;
            }
            EvalTarget::Curve { x, grid } => {
                let site = self.add_site(x)?;
                for y in grid {
                    self.add_cell(site, y)?;
                }
            }
            EvalTarget::MarginalGrid { xs } => {
                for x in xs {
                    self.add_site(x)?;
                }
            }
        }
        Ok(())
    }

    fn check_point(&self, p: &[f64]) -> Result<(), EstimatorError> {
        if p.len() != self.space.dim() {
            return Err(EstimatorError::DimensionMismatch {
                expected: self.space.dim(),
                got: p.len(),
            });
        }
        if !self.space.contains(p) {
            return Err(EstimatorError::OutsideDomain(p.to_vec()));
        }
        Ok(())
    }

    fn add_site(&mut self, x: &[f64]) -> Result<usize, EstimatorError> {
        self.check_point(x)?;
        if let Some(&i) = self.site_index.get(&key_of(x)) {
            return Ok(i);
        }
        // Consistency condition for the asymptotic theory: the largest
        // kernel support around x must stay inside E.
        let needed = self.skip_radius_v.max(self.skip_radius_w);
        let dist = self.space.dist_to_boundary(x);
        if needed > dist {
            self.warnings.push(format!(
                "support condition violated at x = {x:?}: max(v1, w1)·δ = {needed} \
                 exceeds dist(x, ∂E) = {dist}; estimates there fall outside the \
                 guarantees of the convergence theory"
            ));
        }
        let i = self.sites.len();
        self.sites.push(Site {
            x: x.to_vec(),
            denominator: CompensatedSum::new(),
            cells: Vec::new(),
            cell_index: HashMap::new(),
        });
        self.site_index.insert(key_of(x), i);
        Ok(i)
    }

    fn add_cell(&mut self, site: usize, y: &[f64]) -> Result<(), EstimatorError> {
        self.check_point(y)?;
        let cell_key = key_of(y);
        let site = &mut self.sites[site];
        if site.cell_index.contains_key(&cell_key) {
            return Ok(());
        }
        site.cell_index.insert(cell_key, site.cells.len());
        site.cells.push(PairCell {
            y: y.to_vec(),
            numerator: CompensatedSum::new(),
        });
        Ok(())
    }

    /// Consume record `j = m + 1`, adding its term to every accumulator it
    /// can reach. Records outside the `j = 1` support radius of a site are
    /// skipped without touching any accumulator bit.
    pub fn update(&mut self, rec: &JumpRecord<'_>) -> Result<(), EstimatorError> {
        if rec.index != self.consumed + 1 {
            return Err(EstimatorError::OutOfOrder {
                expected: self.consumed + 1,
                got: rec.index,
            });
        }
        if rec.pre.len() != self.space.dim() {
            return Err(EstimatorError::DimensionMismatch {
                expected: self.space.dim(),
                got: rec.pre.len(),
            });
        }
        self.consumed = rec.index;
        let j = rec.index;
        let d = self.space.dim() as i32;
        let vj = self.v.at(j);
        let wj = self.w.at(j);
        let v_scale = vj.powi(-d);
        let w_scale = wj.powi(-2 * d);

        for site in &mut self.sites {
            let dist = euclid(rec.pre, &site.x);
            if dist < self.skip_radius_v {
                let k = self.kernel.eval_scaled(rec.pre, &site.x, vj);
                if k != 0.0 {
                    site.denominator.add(v_scale * k);
                }
            }
            if dist < self.skip_radius_w && !site.cells.is_empty() {
                let kx = self.kernel.eval_scaled(rec.pre, &site.x, wj);
                if kx != 0.0 {
                    for cell in &mut site.cells {
                        if euclid(rec.post, &cell.y) < self.skip_radius_w {
                            let ky = self.kernel.eval_scaled(rec.post, &cell.y, wj);
                            if ky != 0.0 {
                                cell.numerator.add(w_scale * kx * ky);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn site(&self, x: &[f64]) -> Result<&Site, EstimatorError> {
        self.site_index
            .get(&key_of(x))
            .map(|&i| &self.sites[i])
            .ok_or_else(|| EstimatorError::Unregistered(x.to_vec()))
    }

    fn cell<'a>(&self, site: &'a Site, y: &[f64]) -> Result<&'a PairCell, EstimatorError> {
        site.cell_index
            .get(&key_of(y))
            .map(|&i| &site.cells[i])
            .ok_or_else(|| EstimatorError::UnregisteredPair(site.x.clone(), y.to_vec()))
    }

    /// Raw denominator sum at `x` (no `1/n`).
    pub fn raw_denominator(&self, x: &[f64]) -> Result<f64, EstimatorError> {
        Ok(self.site(x)?.denominator.value())
    }

    /// Raw numerator sum at `(x, y)` (no `1/n`).
    pub fn raw_numerator(&self, x: &[f64], y: &[f64]) -> Result<f64, EstimatorError> {
        let site = self.site(x)?;
        Ok(self.cell(site, y)?.numerator.value())
    }

    /// Invariant-density estimate `p̂ₙ(x)`.
    pub fn p_hat(&self, x: &[f64]) -> Result<f64, EstimatorError> {
        let site = self.site(x)?;
        if self.consumed < 2 {
            return Err(EstimatorError::TooFewRecords(self.consumed));
        }
        Ok(site.denominator.value() / self.sample_size() as f64)
    }

    /// Pair-density estimate `ĥₙ(x, y)`.
    pub fn h_hat(&self, x: &[f64], y: &[f64]) -> Result<f64, EstimatorError> {
        let site = self.site(x)?;
        let cell = self.cell(site, y)?;
        if self.consumed < 2 {
            return Err(EstimatorError::TooFewRecords(self.consumed));
        }
        Ok(cell.numerator.value() / self.sample_size() as f64)
    }

    /// Transition-density estimate `q̂ₙ(x, y)` as the raw ratio of sums.
    ///
    /// A zero denominator is an error, not a NaN: it means no pre-jump
    /// observation has come near `x` yet, which callers must be able to
    /// distinguish from a genuine zero estimate.
    pub fn q_hat(&self, x: &[f64], y: &[f64]) -> Result<f64, EstimatorError> {
        let site = self.site(x)?;
        let cell = self.cell(site, y)?;
        let denom = site.denominator.value();
        if denom == 0.0 {
            return Err(EstimatorError::ZeroDenominator(x.to_vec()));
        }
        Ok(cell.numerator.value() / denom)
    }

    /// `q̂ₙ(x, ·)` over a grid, sharing the single denominator at `x`.
    pub fn q_hat_curve(&self, x: &[f64], grid: &[Vec<f64>]) -> Result<Vec<f64>, EstimatorError> {
        if grid.is_empty() {
            return Ok(Vec::new());
        }
        let site = self.site(x)?;
        let denom = site.denominator.value();
        if denom == 0.0 {
            return Err(EstimatorError::ZeroDenominator(x.to_vec()));
        }
        grid.iter()
            .map(|y| Ok(self.cell(site, y)?.numerator.value() / denom))
            .collect()
    }

    // One-dimensional conveniences.

    pub fn p_hat1(&self, x: f64) -> Result<f64, EstimatorError> {
        self.p_hat(&[x])
    }

    pub fn h_hat1(&self, x: f64, y: f64) -> Result<f64, EstimatorError> {
        self.h_hat(&[x], &[y])
    }

    pub fn q_hat1(&self, x: f64, y: f64) -> Result<f64, EstimatorError> {
        self.q_hat(&[x], &[y])
    }

    pub fn q_hat_curve1(&self, x: f64, ys: &[f64]) -> Result<Vec<f64>, EstimatorError> {
        let grid: Vec<Vec<f64>> = ys.iter().map(|&y| vec![y]).collect();
        self.q_hat_curve(&[x], &grid)
    }
}

#[inline]
fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&ai, &bi)| (ai - bi) * (ai - bi))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Epanechnikov, KernelRegistry};
    use std::sync::Arc;

    fn state(v1: f64, alpha: f64, w1: f64, beta: f64) -> EstimatorState {
        EstimatorState::new(
            StateSpace::interval(0.0, 3.0).unwrap(),
            ProductKernel::new(Arc::new(Epanechnikov), 1).unwrap(),
            BandwidthSchedule::new(v1, alpha).unwrap(),
            BandwidthSchedule::new(w1, beta).unwrap(),
        )
        .unwrap()
    }

    fn rec(index: usize, pre: &[f64], post: &[f64]) -> (usize, Vec<f64>, Vec<f64>) {
        (index, pre.to_vec(), post.to_vec())
    }

    fn feed(state: &mut EstimatorState, records: &[(usize, Vec<f64>, Vec<f64>)]) {
        for (index, pre, post) in records {
            state
                .update(&JumpRecord {
                    index: *index,
                    time: *index as f64,
                    gap: 1.0,
                    pre,
                    post,
                    forced: false,
                })
                .unwrap();
        }
    }

    #[test]
    fn first_record_at_the_target_matches_hand_expansion() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::pair1(1.0, 0.5)).unwrap();
        feed(&mut s, &[rec(1, &[1.0], &[0.5])]);
        // K(0) = 0.75 ⇒ denominator 0.75/0.1, numerator 0.75²/0.1².
        assert!((s.raw_denominator(&[1.0]).unwrap() - 7.5).abs() < 1e-14);
        assert!((s.raw_numerator(&[1.0], &[0.5]).unwrap() - 56.25).abs() < 1e-12);
    }

    #[test]
    fn two_term_marginal_matches_hand_expansion() {
        // Records at distance 0 and 0.05·v₂ from x.
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::marginal1(1.0)).unwrap();
        let v2 = 0.1 * 2f64.powf(-0.125);
        feed(
            &mut s,
            &[rec(1, &[1.0], &[0.5]), rec(2, &[1.0 + 0.05 * v2], &[0.5])],
        );
        let expected = 0.75 / 0.1 + 0.75 * (1.0 - 0.05f64 * 0.05) / v2;
        let got = s.p_hat1(1.0).unwrap();
        assert!(
            (got - expected).abs() <= 1e-12 * expected,
            "got {got}, expected {expected}"
        );
        // n = 1, so p̂ equals the raw two-term sum; ballpark 15.66.
        assert!((got - 15.66).abs() < 0.01);
    }

    #[test]
    fn single_matching_record_gives_h_hat_56_25() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::pair1(1.0, 0.5)).unwrap();
        feed(&mut s, &[rec(1, &[1.0], &[0.5]), rec(2, &[2.5], &[1.2])]);
        // Second record is far from the target; n = 1.
        assert!((s.h_hat1(1.0, 0.5).unwrap() - 56.25).abs() < 1e-12);
    }

    #[test]
    fn far_records_change_no_accumulator_bits() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::pair1(1.0, 0.5)).unwrap();
        feed(&mut s, &[rec(1, &[1.0], &[0.5])]);
        let denom_before = s.raw_denominator(&[1.0]).unwrap();
        let numer_before = s.raw_numerator(&[1.0], &[0.5]).unwrap();
        // 0.11 > δ·max(v₁, w₁) = 0.1 away from both coordinates.
        feed(&mut s, &[rec(2, &[1.11], &[0.61])]);
        assert_eq!(s.raw_denominator(&[1.0]).unwrap(), denom_before);
        assert_eq!(s.raw_numerator(&[1.0], &[0.5]).unwrap(), numer_before);
    }

    #[test]
    fn q_hat_is_the_raw_ratio_and_scale_free() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::pair1(1.0, 0.5)).unwrap();
        feed(
            &mut s,
            &[
                rec(1, &[0.98], &[0.52]),
                rec(2, &[1.01], &[0.49]),
                rec(3, &[1.05], &[0.55]),
            ],
        );
        let num = s.raw_numerator(&[1.0], &[0.5]).unwrap();
        let den = s.raw_denominator(&[1.0]).unwrap();
        let q = s.q_hat1(1.0, 0.5).unwrap();
        assert_eq!(q, num / den);
        // Common positive scaling cancels exactly (powers of two are exact).
        assert_eq!((4.0 * num) / (4.0 * den), q);
        // And q̂ is readable even where p̂/ĥ still refuse (m = 1).
        let mut one = state(0.1, 0.125, 0.1, 0.1);
        one.register(&EvalTarget::pair1(1.0, 0.5)).unwrap();
        feed(&mut one, &[rec(1, &[1.0], &[0.5])]);
        assert!(one.q_hat1(1.0, 0.5).is_ok());
        assert!(matches!(
            one.p_hat1(1.0),
            Err(EstimatorError::TooFewRecords(1))
        ));
    }

    #[test]
    fn zero_denominator_is_an_error_zero_numerator_is_zero() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::pair1(1.0, 0.5)).unwrap();
        assert!(matches!(
            s.q_hat1(1.0, 0.5),
            Err(EstimatorError::ZeroDenominator(_))
        ));
        // A record near x but far from y fills only the denominator.
        feed(&mut s, &[rec(1, &[1.0], &[2.0]), rec(2, &[1.02], &[2.1])]);
        assert_eq!(s.q_hat1(1.0, 0.5).unwrap(), 0.0);
        assert_eq!(s.h_hat1(1.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn marginal_estimate_is_zero_without_nearby_observations() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::marginal1(1.0)).unwrap();
        feed(&mut s, &[rec(1, &[2.0], &[1.0]), rec(2, &[2.5], &[1.2])]);
        assert_eq!(s.p_hat1(1.0).unwrap(), 0.0);
    }

    #[test]
    fn registration_contract() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::pair1(1.0, 0.5)).unwrap();
        assert_eq!(s.records_consumed(), 0);
        feed(&mut s, &[rec(1, &[1.0], &[0.5])]);
        assert!(matches!(
            s.register(&EvalTarget::marginal1(2.0)),
            Err(EstimatorError::RegisterAfterUpdate)
        ));
        let mut t = state(0.1, 0.125, 0.1, 0.1);
        assert!(matches!(
            t.register(&EvalTarget::marginal1(3.5)),
            Err(EstimatorError::OutsideDomain(_))
        ));
        assert!(matches!(
            t.p_hat1(1.0),
            Err(EstimatorError::Unregistered(_))
        ));
    }

    #[test]
    fn out_of_order_records_are_rejected() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::marginal1(1.0)).unwrap();
        feed(&mut s, &[rec(1, &[1.0], &[0.5])]);
        let bad = JumpRecord {
            index: 3,
            time: 3.0,
            gap: 1.0,
            pre: &[1.0],
            post: &[0.5],
            forced: false,
        };
        assert!(matches!(
            s.update(&bad),
            Err(EstimatorError::OutOfOrder {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn curve_shares_the_denominator_with_plain_pairs() {
        let registry = KernelRegistry::builtin();
        let base = registry.get("epanechnikov").unwrap();
        let ys: Vec<f64> = (0..64).map(|i| 0.35 + 0.3 * i as f64 / 63.0).collect();

        let mut curve = EstimatorState::new(
            StateSpace::interval(0.0, 3.0).unwrap(),
            ProductKernel::new(base.clone(), 1).unwrap(),
            BandwidthSchedule::new(0.1, 0.125).unwrap(),
            BandwidthSchedule::new(0.1, 0.1).unwrap(),
        )
        .unwrap();
        curve.register(&EvalTarget::curve1(1.0, &ys)).unwrap();

        let mut pairs = EstimatorState::new(
            StateSpace::interval(0.0, 3.0).unwrap(),
            ProductKernel::new(base, 1).unwrap(),
            BandwidthSchedule::new(0.1, 0.125).unwrap(),
            BandwidthSchedule::new(0.1, 0.1).unwrap(),
        )
        .unwrap();
        for &y in &ys {
            pairs.register(&EvalTarget::pair1(1.0, y)).unwrap();
        }

        let records: Vec<(usize, Vec<f64>, Vec<f64>)> = (1..=200)
            .map(|j| {
                let x = 0.9 + 0.2 * ((j * 37 % 100) as f64 / 100.0);
                let y = 0.4 + 0.2 * ((j * 59 % 100) as f64 / 100.0);
                rec(j, &[x], &[y])
            })
            .collect();
        feed(&mut curve, &records);
        feed(&mut pairs, &records);

        let from_curve = curve.q_hat_curve1(1.0, &ys).unwrap();
        for (i, &y) in ys.iter().enumerate() {
            assert_eq!(from_curve[i], pairs.q_hat1(1.0, y).unwrap());
        }
        // Grid of one point coincides with the plain read; empty grid is empty.
        assert_eq!(
            curve.q_hat_curve1(1.0, &ys[..1]).unwrap()[0],
            curve.q_hat1(1.0, ys[0]).unwrap()
        );
        assert!(curve.q_hat_curve1(1.0, &[]).unwrap().is_empty());
    }

    #[test]
    fn support_condition_warning_fires_near_the_boundary() {
        let mut s = state(0.1, 0.125, 0.1, 0.1);
        s.register(&EvalTarget::marginal1(2.95)).unwrap();
        assert_eq!(s.warnings().len(), 1);
        // Exactly at the support distance: no warning (supports are open).
        let mut t = state(0.1, 0.125, 0.1, 0.1);
        t.register(&EvalTarget::marginal1(2.9)).unwrap();
        assert!(t.warnings().is_empty());
    }
}
