use crate::dirac::{RsDiracPropagator, RsDiracState};
use crate::error::{Error, Result};

/// Evolve one six-component state per adjoint index under the free-space
/// equation. Free evolution carries no index mixing, so each state advances
/// through the identical stepper independently; the collection exists to
/// keep the index bookkeeping and the summed norm in one place.
pub fn evolve_lie_valued(states: &mut [RsDiracState], dt: f64, n_steps: usize) -> Result<()> {
    let first = states
        .first()
        .ok_or_else(|| Error::Dimension("no states to evolve".into()))?;
    let (grid, mass, speed, hbar) = (
        first.grid().clone(),
        first.mass(),
        first.speed(),
        first.hbar(),
    );
    for (a, state) in states.iter().enumerate() {
        if *state.grid() != grid {
            return Err(Error::Dimension(format!(
                "state {a} lives on a different grid"
            )));
        }
        if state.mass() != mass || state.speed() != speed || state.hbar() != hbar {
            return Err(Error::Domain(format!(
                "state {a} carries different physical constants"
            )));
        }
    }
    let prop = RsDiracPropagator::new(&grid, mass, speed, hbar, dt)?;
    for state in states.iter_mut() {
        for _ in 0..n_steps {
            prop.step(state)?;
        }
    }
    Ok(())
}

/// Norm of the whole collection: sqrt of the summed squared index norms.
pub fn lie_valued_norm(states: &[RsDiracState]) -> f64 {
    states
        .iter()
        .map(|s| {
            let n = s.norm();
            n * n
        })
        .sum::<f64>()
        .sqrt()
}
