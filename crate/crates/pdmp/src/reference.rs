//! Cross-check oracles built from the model's closed-form characteristics.
//!
//! The one-step pre-jump density
//!
//! ```text
//! r(y, z) = ∫₀^{-t⁻(z)} q(y, Φ_z(-s)) · f(Φ_z(-s), s) · DΦ_z(-s) ds
//! ```
//!
//! is the conditional density of the next pre-jump location at `z` given the
//! previous pre-jump location `y`: integrate over the elapsed time `s`, walk
//! the flow backwards from `z` to the post-jump point that would have been
//! drawn from `q(y, ·)`, and weight by the inter-jump density and the volume
//! change of the reverse flow. Averaging `r(Zⱼ⁻, x)` along a trajectory gives
//! an estimate of the invariant density that shares nothing with the kernel
//! estimator — the two are compared in the acceptance suite.

use crate::accum::CompensatedSum;
use crate::model::PdmpModel;
use crate::quad::{self, QuadError, QuadSpec};
use crate::trajectory::Trajectory;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReferenceError {
    #[error("point {0:?} is not inside the open state space")]
    OutsideDomain(Vec<f64>),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("invariant density estimate must be positive, got {0}")]
    NonPositiveDensity(f64),
    #[error("{0} is only implemented for one-dimensional state spaces")]
    OneDimensionalOnly(&'static str),
}

/// A value with a certified truncation tail and the quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBounded {
    pub value: f64,
    /// Upper bound on the mass discarded beyond the integration horizon.
    pub tail_bound: f64,
    /// Quadrature error estimate for `value`.
    pub abs_error: f64,
}

/// One-step pre-jump transition density `r(y, z)` by quadrature along the
/// backward orbit of `z`.
///
/// When the reverse flow never exits (`t⁻(z) = -∞`) the integral is
/// truncated at `spec.horizon` and the discarded tail is bounded by
/// `sup_y q(y, ·) · G(z, H) · DΦ_z(-H)`. The bound is exact for flows whose
/// reverse orbit contracts and whose survival decay along the orbit is
/// dominated by its value at `z` — true for the cell model, where both
/// factors shrink the tail far below the quadrature tolerance.
pub fn r_density(
    model: &PdmpModel,
    y: &[f64],
    z: &[f64],
    spec: &QuadSpec,
) -> Result<TailBounded, ReferenceError> {
    let space = model.space();
    if !space.contains_closure(y) {
        return Err(ReferenceError::OutsideDomain(y.to_vec()));
    }
    if !space.contains(z) {
        return Err(ReferenceError::OutsideDomain(z.to_vec()));
    }
    let flow = model.flow();
    let jumps = model.jumps();
    let transitions = model.transitions();

    let reverse_exit = flow.reverse_exit_time(space, z);
    let (upper, truncated) = if reverse_exit.is_finite() {
        (-reverse_exit, false)
    } else {
        (spec.horizon, true)
    };

    let dim = space.dim();
    let integrand = |s: f64| {
        let mut back = vec![0.0; dim];
        flow.advance(z, -s, &mut back);
        let q = transitions.density(y, &back);
        if q == 0.0 {
            return 0.0;
        }
        q * jumps.density(&back, s) * flow.jacobian_det(z, -s)
    };

    let result = quad::integrate(integrand, 0.0, upper, spec)?;
    let tail_bound = if truncated {
        let h = spec.horizon;
        transitions.density_bound(y) * jumps.survival(z, h) * flow.jacobian_det(z, -h)
    } else {
        0.0
    };
    Ok(TailBounded {
        value: result.value,
        tail_bound,
        abs_error: result.abs_error,
    })
}

/// Ergodic-average estimate of the invariant density at `x`:
/// the mean of `r(Zⱼ⁻, x)` over the trajectory's pre-jump chain.
///
/// The average is an unordered sum; it is computed over fixed-size chunks in
/// parallel and reduced in chunk order, so the result does not depend on the
/// number of worker threads.
pub fn p_ergodic(
    model: &PdmpModel,
    traj: &Trajectory,
    x: &[f64],
    spec: &QuadSpec,
) -> Result<TailBounded, ReferenceError> {
    if traj.is_empty() {
        return Err(ReferenceError::EmptyTrajectory);
    }
    if !model.space().contains(x) {
        return Err(ReferenceError::OutsideDomain(x.to_vec()));
    }

    const CHUNK: usize = 512;
    let count = traj.len();
    let chunk_results: Vec<Result<(CompensatedSum, f64, f64), ReferenceError>> = (0..count)
        .step_by(CHUNK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let mut sum = CompensatedSum::new();
            let mut tail = 0.0;
            let mut err = 0.0;
            for i in start..(start + CHUNK).min(count) {
                let rec = traj.record(i);
                let r = r_density(model, rec.pre, x, spec)?;
                sum.add(r.value);
                tail += r.tail_bound;
                err += r.abs_error;
            }
            Ok((sum, tail, err))
        })
        .collect();

    let mut total = CompensatedSum::new();
    let mut tail = 0.0;
    let mut err = 0.0;
    for chunk in chunk_results {
        let (sum, t, e) = chunk?;
        total.merge(&sum);
        tail += t;
        err += e;
    }
    let n = count as f64;
    Ok(TailBounded {
        value: total.value() / n,
        tail_bound: tail / n,
        abs_error: err / n,
    })
}

/// Asymptotic variance of the normalized transition-density estimator:
/// `q²·τ² / (p·(1 + α·d))`.
pub fn clt_variance(
    q_val: f64,
    p_val: f64,
    tau2: f64,
    alpha: f64,
    d: usize,
) -> Result<f64, ReferenceError> {
    if p_val <= 0.0 || p_val.is_nan() {
        return Err(ReferenceError::NonPositiveDensity(p_val));
    }
    Ok(q_val * q_val * tau2 / (p_val * (1.0 + alpha * d as f64)))
}

/// The curve `r(y, ·)` tabulated over a grid, ready for the `z,r` dump
/// format with its `# y=<val> H=<val> tail_bound=<val>` header.
#[derive(Debug, Clone, PartialEq)]
pub struct OneStepCurve {
    pub y: f64,
    pub horizon: f64,
    /// Largest tail bound reported across the grid.
    pub tail_bound: f64,
    pub rows: Vec<(f64, f64)>,
}

impl OneStepCurve {
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "# y={} H={} tail_bound={}",
            self.y, self.horizon, self.tail_bound
        )?;
        writeln!(out, "z,r")?;
        for (z, r) in &self.rows {
            writeln!(out, "{z},{r}")?;
        }
        Ok(())
    }
}

/// Tabulate `r(y, ·)` over `grid` (one-dimensional models).
pub fn one_step_curve(
    model: &PdmpModel,
    y: f64,
    grid: &[f64],
    spec: &QuadSpec,
) -> Result<OneStepCurve, ReferenceError> {
    if model.space().dim() != 1 {
        return Err(ReferenceError::OneDimensionalOnly("one_step_curve"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut tail_bound: f64 = 0.0;
    for &z in grid {
        let r = r_density(model, &[y], &[z], spec)?;
        tail_bound = tail_bound.max(r.tail_bound);
        rows.push((z, r.value));
    }
    Ok(OneStepCurve {
        y,
        horizon: spec.horizon,
        tail_bound,
        rows,
    })
}

/// Probability that the step after a jump from pre-jump location `y` ends in
/// a boundary hit: `E[G(Z, t⁺(Z))]` with `Z ~ q(y, ·)`, by quadrature over
/// the interior. Together with `∫ r(y, z) dz` this mass must account for all
/// probability of the one-step law.
pub fn boundary_jump_mass(
    model: &PdmpModel,
    y: &[f64],
    spec: &QuadSpec,
) -> Result<TailBounded, ReferenceError> {
    let space = model.space();
    if space.dim() != 1 {
        return Err(ReferenceError::OneDimensionalOnly("boundary_jump_mass"));
    }
    if !space.contains_closure(y) {
        return Err(ReferenceError::OutsideDomain(y.to_vec()));
    }
    let flow = model.flow();
    let jumps = model.jumps();
    let transitions = model.transitions();
    let (lo, hi) = (space.lower()[0], space.upper()[0]);

    let integrand = |zv: f64| {
        let zp = [zv];
        let q = transitions.density(y, &zp);
        if q == 0.0 {
            return 0.0;
        }
        let t_plus = flow.exit_time(space, &zp);
        if t_plus.is_infinite() {
            // Survival mass at infinity would be a stalled chain, not a
            // boundary hit; it contributes nothing here.
            return 0.0;
        }
        q * jumps.survival(&zp, t_plus)
    };
    let result = quad::integrate(integrand, lo, hi, spec)?;
    Ok(TailBounded {
        value: result.value,
        tail_bound: 0.0,
        abs_error: result.abs_error,
    })
}
