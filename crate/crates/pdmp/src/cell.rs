//! Cell-size growth model.
//!
//! The size of a cell grows exponentially inside `E = (0, 3)`, divides at a
//! random size-dependent rate (Weibull inter-jump law whose shape parameter
//! is the inverse of the size), and is forced to divide on hitting the
//! ceiling. Division sends size `x` to a Gaussian around `x/2` with scale
//! `σ`, truncated to `(x/2 - σ, x/2 + σ) ∩ E`. All three characteristics
//! have closed forms, which makes this the reference model for every oracle
//! in the crate.

use crate::flow::Flow;
use crate::law::{DrawError, JumpLaw, TransitionLaw};
use crate::model::{ModelBuilder, ModelError, ModelParams, PdmpModel};
use crate::normal;
use crate::rng::StreamRng;
use crate::space::StateSpace;
use std::sync::Arc;

/// Hard cap on rejection retries in the transition sampler.
const DRAW_CAP: usize = 1_000_000;

/// Parameters of the cell model. The state space is fixed to `(0, 3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellModelParams {
    /// Exponential growth rate of the size between divisions.
    pub growth_rate: f64,
    /// Scale of the truncated Gaussian division kernel.
    pub sigma: f64,
}

impl Default for CellModelParams {
    fn default() -> Self {
        Self {
            growth_rate: 0.9,
            sigma: 0.1,
        }
    }
}

impl CellModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.growth_rate > 0.0 && self.growth_rate.is_finite()) {
            return Err(ModelError::BadParam {
                key: "tau_flow".into(),
                value: self.growth_rate,
                constraint: "tau_flow > 0".into(),
            });
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(ModelError::BadParam {
                key: "sigma".into(),
                value: self.sigma,
                constraint: "sigma > 0".into(),
            });
        }
        // Keeps the truncation window nonempty for every x in (0, 3].
        if 2.0 * self.sigma >= 3.0 {
            return Err(ModelError::BadParam {
                key: "sigma".into(),
                value: self.sigma,
                constraint: "2·sigma < 3".into(),
            });
        }
        Ok(())
    }

    pub fn build(&self) -> Result<PdmpModel, ModelError> {
        self.validate()?;
        let space = state_space();
        PdmpModel::new(
            space.clone(),
            Arc::new(CellFlow {
                rate: self.growth_rate,
            }),
            Arc::new(CellJumpLaw),
            Arc::new(TruncatedGaussianTransition {
                sigma: self.sigma,
                space,
            }),
        )
    }
}

/// The open interval `(0, 3)` the cell size lives in.
pub fn state_space() -> StateSpace {
    StateSpace::interval(0.0, 3.0).expect("fixed cell state space")
}

/// Exponential growth `Φ(x, t) = x·e^{rate·t}` with analytic exit times.
#[derive(Debug, Clone, Copy)]
pub struct CellFlow {
    pub rate: f64,
}

impl Flow for CellFlow {
    fn dim(&self) -> usize {
        1
    }

    fn advance(&self, x: &[f64], t: f64, out: &mut [f64]) {
        out[0] = x[0] * (self.rate * t).exp();
    }

    fn jacobian_det(&self, _x: &[f64], t: f64) -> f64 {
        (self.rate * t).exp()
    }

    fn exit_time(&self, space: &StateSpace, x: &[f64]) -> f64 {
        assert!(
            space.contains(x),
            "exit times are defined for interior points, got {x:?}"
        );
        let ceiling = space.upper()[0];
        (ceiling / x[0]).ln() / self.rate
    }

    /// The reverse orbit decays towards 0 without ever reaching it, so the
    /// reverse exit time is `-∞` for every interior point.
    fn reverse_exit_time(&self, _space: &StateSpace, _x: &[f64]) -> f64 {
        f64::NEG_INFINITY
    }
}

/// Weibull inter-jump law with shape `1/x`:
/// `G(x, t) = exp(-t^{1/x})`, `f(x, t) = t^{(1-x)/x} exp(-t^{1/x}) / x`.
#[derive(Debug, Clone, Copy)]
pub struct CellJumpLaw;

impl JumpLaw for CellJumpLaw {
    fn survival(&self, z: &[f64], t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        (-t.powf(1.0 / z[0])).exp()
    }

    /// Evaluated as `(m/t)·e^{-m}/x` with `m = t^{1/x}`, so that the
    /// exponential underflow for tiny sizes collapses to the true limit 0
    /// instead of the naive `∞·0` NaN. At `t = 0` the limit is returned:
    /// `+∞` for x > 1, `1` for x = 1, `0` for x < 1.
    fn density(&self, z: &[f64], t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let x = z[0];
        if t == 0.0 {
            return if x > 1.0 {
                f64::INFINITY
            } else if x == 1.0 {
                1.0
            } else {
                0.0
            };
        }
        let m = t.powf(1.0 / x);
        if m > 700.0 {
            return 0.0;
        }
        m / t * (-m).exp() / x
    }

    fn inverse_survival(&self, z: &[f64], u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        (-u.ln()).powf(z[0])
    }
}

/// Gaussian around `x/2` with scale `σ`, truncated to
/// `(x/2 - σ, x/2 + σ) ∩ E`; sampled by inverse CDF.
#[derive(Debug, Clone)]
pub struct TruncatedGaussianTransition {
    pub sigma: f64,
    pub space: StateSpace,
}

impl TruncatedGaussianTransition {
    /// Open truncation window `(a, b)` for pre-jump size `x`.
    pub fn window(&self, x: f64) -> (f64, f64) {
        let mean = 0.5 * x;
        let a = (mean - self.sigma).max(self.space.lower()[0]);
        let b = (mean + self.sigma).min(self.space.upper()[0]);
        (a, b)
    }

    /// Probability mass the untruncated Gaussian assigns to the window.
    pub fn window_mass(&self, x: f64) -> f64 {
        let mean = 0.5 * x;
        let (a, b) = self.window(x);
        normal::cdf((b - mean) / self.sigma) - normal::cdf((a - mean) / self.sigma)
    }
}

impl TransitionLaw for TruncatedGaussianTransition {
    fn density(&self, x: &[f64], y: &[f64]) -> f64 {
        let (a, b) = self.window(x[0]);
        if y[0] <= a || y[0] >= b {
            return 0.0;
        }
        let mean = 0.5 * x[0];
        normal::pdf((y[0] - mean) / self.sigma) / (self.sigma * self.window_mass(x[0]))
    }

    fn density_bound(&self, x: &[f64]) -> f64 {
        normal::pdf(0.0) / (self.sigma * self.window_mass(x[0]))
    }

    fn draw(&self, x: &[f64], rng: &mut StreamRng, out: &mut [f64]) -> Result<(), DrawError> {
        let mean = 0.5 * x[0];
        let (a, b) = self.window(x[0]);
        let pa = normal::cdf((a - mean) / self.sigma);
        let pb = normal::cdf((b - mean) / self.sigma);
        for _ in 0..DRAW_CAP {
            let u = rng.uniform();
            let y = mean + self.sigma * normal::inv_cdf(pa + u * (pb - pa));
            // Floating rounding can land exactly on the window edge or on x
            // itself; both have probability ~0 and are simply redrawn.
            if y > a && y < b && y != x[0] {
                out[0] = y;
                return Ok(());
            }
        }
        Err(DrawError {
            x: x.to_vec(),
            attempts: DRAW_CAP,
        })
    }
}

/// Registry entry building the cell model from `tau_flow` / `sigma` keys.
pub struct CellModelBuilder;

impl ModelBuilder for CellModelBuilder {
    fn name(&self) -> &'static str {
        "cell"
    }

    fn build(&self, params: &ModelParams) -> Result<PdmpModel, ModelError> {
        let mut p = CellModelParams::default();
        for (key, &value) in params {
            match key.as_str() {
                "tau_flow" => p.growth_rate = value,
                "sigma" => p.sigma = value,
                other => {
                    return Err(ModelError::UnknownParam {
                        model: "cell".into(),
                        key: other.to_string(),
                    })
                }
            }
        }
        p.build()
    }
}
