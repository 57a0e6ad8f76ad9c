//! Exact simulation of the embedded jump chain.
//!
//! Between jumps the state follows the flow. The next inter-jump time is
//! drawn from the mixed law with density `f(z, ·)` on `[0, t⁺(z))` and an
//! atom of mass `G(z, t⁺(z))` at the deterministic exit time `t⁺(z)`. One
//! uniform per jump drives the draw: the atom is checked first, and the
//! continuous branch reuses the same uniform through the inverse survival
//! function, so the sampler realizes the mixed law exactly.

use crate::law::{DrawError, JumpLaw};
use crate::model::PdmpModel;
use crate::rng::StreamRng;
use crate::space::BOUNDARY_TOL;
use crate::trajectory::Trajectory;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("start point {0:?} is not inside the open state space")]
    StartOutsideDomain(Vec<f64>),
    #[error("at least one jump must be requested")]
    ZeroJumps,
    #[error("start point has dimension {got}, the model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("survival function returned {value} at z = {z:?}, t = {t}")]
    BadSurvival { z: Vec<f64>, t: f64, value: f64 },
    #[error(
        "inter-jump time diverged at z = {z:?}: the flow never exits and the \
         jump rate leaves survival mass {mass} at infinity"
    )]
    JumpTimeDiverged { z: Vec<f64>, mass: f64 },
    #[error("model inconsistency: post-jump location {point:?} of jump {index} is outside the state space")]
    PostJumpOutside { index: usize, point: Vec<f64> },
    #[error(transparent)]
    Draw(#[from] DrawError),
}

/// Draw the next inter-jump time for a chain sitting at `z` with exit time
/// `t_plus`. Returns the time and whether the jump is boundary-forced.
///
/// A single uniform `U` decides both branches: `U < G(z, t⁺)` selects the
/// boundary atom, otherwise the continuous part is hit at `G⁻¹(z, U)`, which
/// lies strictly below `t⁺` because `G` is decreasing.
pub fn sample_interjump(
    jumps: &dyn JumpLaw,
    z: &[f64],
    t_plus: f64,
    rng: &mut StreamRng,
) -> Result<(f64, bool), SimError> {
    let atom = jumps.survival(z, t_plus);
    if !(0.0..=1.0).contains(&atom) || atom.is_nan() {
        return Err(SimError::BadSurvival {
            z: z.to_vec(),
            t: t_plus,
            value: atom,
        });
    }
    let u = rng.uniform();
    if u < atom {
        if t_plus.is_infinite() {
            // Positive survival mass at an infinite exit time means the
            // chain can stall forever; no jump chain exists past this point.
            return Err(SimError::JumpTimeDiverged {
                z: z.to_vec(),
                mass: atom,
            });
        }
        return Ok((t_plus, true));
    }
    let s = jumps.inverse_survival(z, u);
    if s >= t_plus {
        // Rounding in G⁻¹ can tie with the exit time; the event is the
        // boundary hit in that case.
        return Ok((t_plus, true));
    }
    Ok((s, false))
}

/// Simulate `n_jumps` jumps from `x0` under stream 0 of `seed`.
pub fn simulate(
    model: &PdmpModel,
    x0: &[f64],
    n_jumps: usize,
    seed: u64,
) -> Result<Trajectory, SimError> {
    simulate_stream(model, x0, n_jumps, seed, 0)
}

/// Simulate under an explicit `(seed, stream)` pair. Replicate `r` of an
/// experiment uses stream `r`, making parallel replication order-independent.
pub fn simulate_stream(
    model: &PdmpModel,
    x0: &[f64],
    n_jumps: usize,
    seed: u64,
    stream: u64,
) -> Result<Trajectory, SimError> {
    let space = model.space();
    if x0.len() != space.dim() {
        return Err(SimError::DimensionMismatch {
            expected: space.dim(),
            got: x0.len(),
        });
    }
    if !space.contains(x0) {
        return Err(SimError::StartOutsideDomain(x0.to_vec()));
    }
    if n_jumps == 0 {
        return Err(SimError::ZeroJumps);
    }

    let mut rng = StreamRng::new(seed, stream);
    let mut traj = Trajectory::with_capacity(x0, seed, stream, n_jumps);
    let flow = model.flow();
    let jumps = model.jumps();
    let transitions = model.transitions();

    let mut z = x0.to_vec();
    let mut pre = vec![0.0; space.dim()];
    let mut post = vec![0.0; space.dim()];
    let mut time = 0.0;

    for index in 1..=n_jumps {
        let t_plus = flow.exit_time(space, &z);
        let (gap, sampled_forced) = sample_interjump(jumps.as_ref(), &z, t_plus, &mut rng)?;
        flow.advance(&z, gap, &mut pre);
        // An unforced jump landing outside the open box is the boundary hit
        // up to rounding; fold it into the forced branch so that
        // `forced ⇔ Zₙ⁻ ∈ ∂E` holds exactly.
        let forced = sampled_forced || !space.contains(&pre);
        if forced {
            space.snap_to_boundary(&mut pre, BOUNDARY_TOL);
        }
        transitions.draw(&pre, &mut rng, &mut post)?;
        if !space.contains(&post) {
            return Err(SimError::PostJumpOutside {
                index,
                point: post.clone(),
            });
        }
        time += gap;
        traj.push(time, gap, &pre, &post, forced);
        z.copy_from_slice(&post);
    }
    Ok(traj)
}
