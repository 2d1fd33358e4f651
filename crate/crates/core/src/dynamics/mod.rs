//! Classical thermal dynamics of the gauge model and its estimators.
//!
//! The chain flips one plaquette spin at a time with detailed-balance rates
//! in the energy gap, which is the number of excitations the flip creates
//! minus the number it removes (one unit per excited link, or per excited
//! cube for the dual model). Estimators feed the stability analysis: tail
//! probabilities of loop lengths, the one-step autocorrelation sum that
//! bounds the decay rate, and direct trajectory autocorrelations.

mod chain;
mod estimators;
mod exact;
mod observable;
mod rates;

pub use chain::{energy, sample_gibbs, ChainState, GibbsRun, RateCache, SyndromeModel};
pub use estimators::{
    autocorr_trajectory, batch_means, decay_rate_bound, estimate_loop_tail,
    estimate_one_step_sum, fidelity_lower_bound, one_step_experiment, EstimatorResult,
    RunContext, Trajectory, MIN_BATCHES,
};
pub use exact::{ExactEnsemble, ENUM_CAP};
pub use observable::Observable;
pub use rates::{RateFamily, RateFunction};

use crate::error::Result;
use crate::lattice::LatticeGeometry;

/// Energy change of flipping plaquette `j` in the chain's current state.
pub fn local_energy_delta(
    geom: &LatticeGeometry,
    state: &ChainState,
    j: usize,
) -> Result<i64> {
    if j >= geom.n_plaquettes() {
        return Err(crate::error::Error::InvalidCell(format!("plaquette {j}")));
    }
    Ok(state.local_delta(geom, j))
}
