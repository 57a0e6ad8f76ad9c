//! Deterministic flows and exit times.
//!
//! A flow moves a point through the state space between jumps and satisfies
//! the semigroup identity `Φ_x(t + s) = Φ_{Φ_x(t)}(s)`. Exit times locate the
//! first boundary crossing; models with closed-form crossings override the
//! defaults, everything else falls back to bracketing by doubling followed by
//! bisection.

use crate::space::StateSpace;

/// Smallest bracketing step for the numeric exit-time search.
pub const EXIT_BRACKET_START: f64 = 1e-6;
/// Beyond this horizon a flow that has not left the closure is treated as
/// never exiting.
pub const EXIT_TIME_CAP: f64 = 1e6;
/// Absolute tolerance on the bisected crossing time.
pub const EXIT_BISECT_TOL: f64 = 1e-12;

/// Deterministic motion between jumps.
pub trait Flow: Send + Sync {
    fn dim(&self) -> usize;

    /// Write `Φ_x(t)` into `out`.
    fn advance(&self, x: &[f64], t: f64, out: &mut [f64]);

    /// `Φ_x(t)` returned as a fresh vector.
    fn at(&self, x: &[f64], t: f64) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.advance(x, t, &mut out);
        out
    }

    /// Magnitude of the Jacobian determinant of `ξ ↦ Φ_ξ(t)` at `x`.
    /// Equals 1 at `t = 0`.
    fn jacobian_det(&self, x: &[f64], t: f64) -> f64;

    /// First time `t > 0` at which the flow from `x` reaches the boundary,
    /// `f64::INFINITY` when it never does.
    fn exit_time(&self, space: &StateSpace, x: &[f64]) -> f64 {
        numeric_exit_time(self, space, x)
    }

    /// Last time `t < 0` at which the reverse flow from `x` was on the
    /// boundary, `f64::NEG_INFINITY` when it never was.
    fn reverse_exit_time(&self, space: &StateSpace, x: &[f64]) -> f64 {
        numeric_reverse_exit_time(self, space, x)
    }
}

/// Generic forward exit time: double the horizon from
/// [`EXIT_BRACKET_START`] until the flow leaves the open box (or
/// [`EXIT_TIME_CAP`] is hit, yielding the infinite sentinel), then bisect the
/// first crossing down to [`EXIT_BISECT_TOL`]. Panics if `x` is not strictly
/// inside the state space.
pub fn numeric_exit_time<F: Flow + ?Sized>(flow: &F, space: &StateSpace, x: &[f64]) -> f64 {
    assert!(
        space.contains(x),
        "exit times are defined for interior points, got {x:?}"
    );
    let mut buf = vec![0.0; x.len()];
    let mut inside = |t: f64| {
        flow.advance(x, t, &mut buf);
        space.contains(&buf)
    };

    let mut lo = 0.0;
    let mut hi = EXIT_BRACKET_START;
    loop {
        if !inside(hi) {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > EXIT_TIME_CAP {
            return f64::INFINITY;
        }
    }
    while hi - lo > EXIT_BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Generic reverse exit time; mirrors [`numeric_exit_time`] backwards in
/// time and returns a negative crossing time or `-∞`.
pub fn numeric_reverse_exit_time<F: Flow + ?Sized>(flow: &F, space: &StateSpace, x: &[f64]) -> f64 {
    let mut buf = vec![0.0; x.len()];
    let mut inside = |t: f64| {
        flow.advance(x, t, &mut buf);
        space.contains(&buf)
    };

    let mut near = 0.0;
    let mut far = -EXIT_BRACKET_START;
    loop {
        if !inside(far) {
            break;
        }
        near = far;
        far *= 2.0;
        if far < -EXIT_TIME_CAP {
            return f64::NEG_INFINITY;
        }
    }
    while near - far > EXIT_BISECT_TOL {
        let mid = 0.5 * (near + far);
        if inside(mid) {
            near = mid;
        } else {
            far = mid;
        }
    }
    0.5 * (near + far)
}
