//! Random ingredients of a process: the inter-jump law and the post-jump
//! transition law.

use crate::rng::StreamRng;

/// Conditional law of the next inter-jump time given the current post-jump
/// location `z`, described through its survival function
/// `G(z, t) = exp(-∫₀ᵗ λ(Φ_z(s)) ds)`.
pub trait JumpLaw: Send + Sync {
    /// Survival function `G(z, t)`; equals 1 at `t = 0`, nonincreasing in `t`.
    fn survival(&self, z: &[f64], t: f64) -> f64;

    /// Conditional density `f(z, t) = λ(Φ_z(t)) G(z, t)`, i.e. `-∂G/∂t`.
    fn density(&self, z: &[f64], t: f64) -> f64;

    /// Inverse of the survival function in `t`: returns the time with
    /// `G(z, t) = u` for `u` strictly inside (0, 1). Covers the continuous
    /// part of the law only; boundary atoms are handled by the sampler.
    fn inverse_survival(&self, z: &[f64], u: f64) -> f64;
}

/// Markov kernel of post-jump locations: a density `q(x, ·)` on the interior
/// of the state space plus an exact sampler.
pub trait TransitionLaw: Send + Sync {
    /// Transition density `q(x, y)`.
    fn density(&self, x: &[f64], y: &[f64]) -> f64;

    /// An upper bound on `sup_y q(x, y)`, used to truncate improper
    /// integrals with a certified tail.
    fn density_bound(&self, x: &[f64]) -> f64;

    /// Draw a post-jump location given pre-jump location `x`. Never returns
    /// `x` itself and never returns a boundary point.
    fn draw(&self, x: &[f64], rng: &mut StreamRng, out: &mut [f64]) -> Result<(), DrawError>;
}

/// Sampling failure of a [`TransitionLaw`].
#[derive(Debug, thiserror::Error, PartialEq)]
#[error("transition sampler exhausted {attempts} proposals at x = {x:?}")]
pub struct DrawError {
    pub x: Vec<f64>,
    pub attempts: usize,
}
