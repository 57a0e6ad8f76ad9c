//! Simulation and nonparametric estimation toolkit for piecewise-deterministic
//! Markov processes (PDMPs).
//!
//! A PDMP follows a deterministic flow between jumps; jumps occur either at a
//! state-dependent random rate or deterministically when the flow reaches the
//! boundary of the state space. This crate provides:
//!
//! - exact simulation of the embedded jump chain, including boundary-forced
//!   jumps ([`sim::simulate`]);
//! - streaming recursive kernel estimators of the invariant density of the
//!   pre-jump chain and of the transition density `q(x, y)` of the post-jump
//!   location given the pre-jump location ([`estimator::EstimatorState`]);
//! - independent cross-check oracles built from one-step quadrature
//!   ([`mod@reference`]);
//! - a replicated, seed-deterministic experiment harness ([`harness`]);
//! - the growth-fragmentation cell-size case study ([`cell`]).
//!
//! Interchangeable pieces (kernels, models) live behind traits and are
//! selected by name through [`kernel::KernelRegistry`] and
//! [`model::ModelRegistry`].

pub mod accum;
pub mod bandwidth;
pub mod cell;
pub mod estimator;
pub mod flow;
pub mod harness;
pub mod kernel;
pub mod law;
pub mod model;
pub mod normal;
pub mod quad;
pub mod reference;
pub mod rng;
pub mod sim;
pub mod space;
pub mod stats;
pub mod trajectory;

pub use bandwidth::BandwidthSchedule;
pub use estimator::{EstimatorState, EvalTarget};
pub use flow::Flow;
pub use kernel::{Kernel, KernelRegistry, ProductKernel};
pub use law::{JumpLaw, TransitionLaw};
pub use model::{ModelRegistry, PdmpModel};
pub use rng::StreamRng;
pub use space::StateSpace;
pub use trajectory::Trajectory;
