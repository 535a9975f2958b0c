//! State transition model: a Gaussian random walk used as the particle
//! proposal.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::types::StateVector;

/// Draws the next state from a Gaussian centered on the previous one with
/// independent per-component standard deviations `sigma_diag`, in state
/// order (x, y, vx, vy, hx, hy). Box sizes are clamped to at least one
/// pixel afterwards.
///
/// With `advect` set, the position means advance by the velocity components
/// instead; the default keeps the mean at the previous state exactly.
///
/// Exactly six standard-normal draws are consumed per call, in component
/// order, so a fixed seed reproduces a trajectory bit for bit.
pub fn propagate<R: Rng + ?Sized>(
    s: &StateVector,
    sigma_diag: &[f64; 6],
    advect: bool,
    rng: &mut R,
) -> StateVector {
    let mut mean = s.components();
    if advect {
        mean[0] += s.vx;
        mean[1] += s.vy;
    }
    let mut next = [0.0f64; 6];
    for (k, slot) in next.iter_mut().enumerate() {
        let z: f64 = rng.sample(StandardNormal);
        *slot = mean[k] + sigma_diag[k] * z;
    }
    next[4] = next[4].max(1.0);
    next[5] = next[5].max(1.0);
    StateVector::from_components(next)
}
