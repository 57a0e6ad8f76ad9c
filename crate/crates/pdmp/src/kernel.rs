//! Compact-support smoothing kernels and the by-name registry.
//!
//! Every kernel is a nonnegative bounded density on the real line with
//! support inside `[-radius, radius]` and unit integral. Multivariate
//! smoothing uses coordinate products of a one-dimensional base kernel
//! ([`ProductKernel`]). Kernels are selected at runtime by name through
//! [`KernelRegistry`]; registration re-derives the claimed constants by
//! quadrature and rejects kernels that fail the contract, so an unbounded
//! or unnormalized kernel can never enter the registry.

use crate::quad::{self, QuadSpec};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("unknown kernel {name:?}; compactly supported kernels available: {known}")]
    Unknown { name: String, known: String },
    #[error("kernel {name:?} violates its contract: {reason}")]
    Invalid { name: String, reason: String },
    #[error("kernel dimension must be at least 1")]
    ZeroDim,
}

/// One-dimensional base kernel.
pub trait Kernel: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// Density value at `u`; exactly zero for `|u| >= radius()`.
    fn eval(&self, u: f64) -> f64;
    /// Support radius δ.
    fn radius(&self) -> f64;
    /// Supremum norm of the density.
    fn sup_norm(&self) -> f64;
    /// Closed-form `∫ K²`.
    fn tau2(&self) -> f64;
}

macro_rules! simple_kernel {
    ($ty:ident, $name:literal, $tau2:expr, $sup:expr, |$u:ident| $body:expr) => {
        #[derive(Debug, Clone, Copy)]
        pub struct $ty;

        impl Kernel for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn eval(&self, $u: f64) -> f64 {
                if $u.abs() >= 1.0 {
                    0.0
                } else {
                    $body
                }
            }
            fn radius(&self) -> f64 {
                1.0
            }
            fn sup_norm(&self) -> f64 {
                $sup
            }
            fn tau2(&self) -> f64 {
                $tau2
            }
        }
    };
}

simple_kernel!(Epanechnikov, "epanechnikov", 0.6, 0.75, |u| 0.75
    * (1.0 - u * u));
simple_kernel!(Uniform, "uniform", 0.5, 0.5, |u| {
    let _ = u;
    0.5
});
simple_kernel!(Triangular, "triangular", 2.0 / 3.0, 1.0, |u| 1.0 - u.abs());
simple_kernel!(Quartic, "quartic", 5.0 / 7.0, 15.0 / 16.0, |u| {
    let t = 1.0 - u * u;
    15.0 / 16.0 * t * t
});

/// Coordinate-product kernel on `R^d` built from a 1-d base.
#[derive(Debug, Clone)]
pub struct ProductKernel {
    base: Arc<dyn Kernel>,
    dim: usize,
}

impl ProductKernel {
    pub fn new(base: Arc<dyn Kernel>, dim: usize) -> Result<Self, KernelError> {
        if dim == 0 {
            return Err(KernelError::ZeroDim);
        }
        Ok(Self { base, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &Arc<dyn Kernel> {
        &self.base
    }

    /// `∏_i K(u_i)`.
    pub fn eval(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let mut prod = 1.0;
        for &ui in u {
            let k = self.base.eval(ui);
            if k == 0.0 {
                return 0.0;
            }
            prod *= k;
        }
        prod
    }

    /// `∏_i K((a_i - b_i) / h)` without allocating.
    pub fn eval_scaled(&self, a: &[f64], b: &[f64], h: f64) -> f64 {
        debug_assert_eq!(a.len(), self.dim);
        let mut prod = 1.0;
        for (&ai, &bi) in a.iter().zip(b) {
            let k = self.base.eval((ai - bi) / h);
            if k == 0.0 {
                return 0.0;
            }
            prod *= k;
        }
        prod
    }

    /// Radius of a Euclidean ball containing the support: the product kernel
    /// lives on the cube `[-δ, δ]^d`, so `δ·√d` bounds it.
    pub fn support_radius(&self) -> f64 {
        self.base.radius() * (self.dim as f64).sqrt()
    }

    /// `∫ K²` over `R^d`; factorizes over coordinates.
    pub fn tau2(&self) -> f64 {
        self.base.tau2().powi(self.dim as i32)
    }

    pub fn sup_norm(&self) -> f64 {
        self.base.sup_norm().powi(self.dim as i32)
    }
}

/// Numerically re-derive `∫K`, `∫K²`, the support bound, and the sup-norm
/// bound for a candidate kernel. Tolerance 1e-8 on both integrals.
pub fn validate(kernel: &dyn Kernel) -> Result<(), KernelError> {
    let invalid = |reason: String| KernelError::Invalid {
        name: kernel.name().to_string(),
        reason,
    };
    let delta = kernel.radius();
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!(
            "support radius must be finite and positive, got {delta}"
        )));
    }
    let spec = QuadSpec {
        abs_tol: 1e-12,
        max_panels: 4000,
        initial_panels: 128,
        horizon: delta,
    };
    let mass = quad::integrate(|u| kernel.eval(u), -delta, delta, &spec)
        .map_err(|e| invalid(format!("normalization quadrature failed: {e}")))?;
    if (mass.value - 1.0).abs() > 1e-8 {
        return Err(invalid(format!(
            "∫K = {} but kernels must integrate to 1",
            mass.value
        )));
    }
    let sq = quad::integrate(
        |u| {
            let k = kernel.eval(u);
            k * k
        },
        -delta,
        delta,
        &spec,
    )
    .map_err(|e| invalid(format!("τ² quadrature failed: {e}")))?;
    if (sq.value - kernel.tau2()).abs() > 1e-8 {
        return Err(invalid(format!(
            "stored τ² = {} disagrees with quadrature {}",
            kernel.tau2(),
            sq.value
        )));
    }
    // Spot checks of the support and boundedness claims.
    for i in 0..=200 {
        let u = -1.5 * delta + i as f64 * (3.0 * delta / 200.0);
        let k = kernel.eval(u);
        if k < 0.0 || k.is_nan() {
            return Err(invalid(format!("K({u}) = {k} is negative or NaN")));
        }
        if u.abs() >= delta && k != 0.0 {
            return Err(invalid(format!("K({u}) = {k} outside the support ball")));
        }
        if k > kernel.sup_norm() * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "K({u}) = {k} exceeds the declared sup-norm"
            )));
        }
    }
    Ok(())
}

/// By-name registry of base kernels.
pub struct KernelRegistry {
    kernels: BTreeMap<String, Arc<dyn Kernel>>,
}

impl KernelRegistry {
    pub fn empty() -> Self {
        Self {
            kernels: BTreeMap::new(),
        }
    }

    /// Registry holding the built-in compact-support kernels. A Gaussian is
    /// deliberately absent: its support is unbounded.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(Epanechnikov))
            .expect("builtin kernel");
        reg.register(Arc::new(Uniform)).expect("builtin kernel");
        reg.register(Arc::new(Triangular)).expect("builtin kernel");
        reg.register(Arc::new(Quartic)).expect("builtin kernel");
        reg
    }

    /// Validate and insert a kernel under its own name.
    pub fn register(&mut self, kernel: Arc<dyn Kernel>) -> Result<(), KernelError> {
        validate(kernel.as_ref())?;
        self.kernels.insert(kernel.name().to_string(), kernel);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Kernel>, KernelError> {
        self.kernels
            .get(name)
            .cloned()
            .ok_or_else(|| KernelError::Unknown {
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<String> {
        self.kernels.keys().cloned().collect()
    }
}

impl Default for KernelRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epanechnikov_values() {
        let k = Epanechnikov;
        assert_eq!(k.eval(0.0), 0.75);
        assert_eq!(k.eval(1.0), 0.0);
        assert_eq!(k.eval(2.0), 0.0);
        assert_eq!(k.eval(-1.0), 0.0);
        assert!((k.eval(0.05) - 0.748125).abs() < 1e-15);
    }

    #[test]
    fn closed_form_tau2_matches_quadrature() {
        for k in [
            Arc::new(Epanechnikov) as Arc<dyn Kernel>,
            Arc::new(Uniform),
            Arc::new(Triangular),
            Arc::new(Quartic),
        ] {
            validate(k.as_ref()).unwrap();
        }
    }

    #[test]
    fn uniform_tau2() {
        assert_eq!(Uniform.tau2(), 0.5);
    }

    #[test]
    fn product_kernel_factorizes() {
        let p = ProductKernel::new(Arc::new(Epanechnikov), 2).unwrap();
        assert!((p.tau2() - 0.36).abs() < 1e-15);
        assert_eq!(p.eval(&[0.0, 0.0]), 0.75 * 0.75);
        assert_eq!(p.eval(&[0.0, 1.0]), 0.0);
        assert!((p.support_radius() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn registry_lookup_and_unknown_error() {
        let reg = KernelRegistry::builtin();
        assert_eq!(reg.get("epanechnikov").unwrap().tau2(), 0.6);
        let err = reg.get("gaussian").unwrap_err();
        match err {
            KernelError::Unknown { known, .. } => {
                assert!(known.contains("epanechnikov"));
                assert!(known.contains("quartic"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn registry_rejects_unnormalized_kernel() {
        #[derive(Debug)]
        struct Bad;
        impl Kernel for Bad {
            fn name(&self) -> &'static str {
                "bad"
            }
            fn eval(&self, u: f64) -> f64 {
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            fn radius(&self) -> f64 {
                1.0
            }
            fn sup_norm(&self) -> f64 {
                1.0
            }
            fn tau2(&self) -> f64 {
                2.0
            }
        }
        let mut reg = KernelRegistry::empty();
        assert!(matches!(
            reg.register(Arc::new(Bad)),
            Err(KernelError::Invalid { .. })
        ));
    }
}
