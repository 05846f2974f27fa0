//! Spectral Galerkin / Euler–Maruyama simulation of the heat model with memory.
//!
//! The state is the vector of sine-basis coefficients, so `|X|₂²` and the
//! Dirichlet energy are exact sums. Delayed states come from a
//! [`HistoryBuffer`] by linear interpolation on the time grid. Each path draws
//! its increments from a ChaCha stream selected by its index; Monte Carlo
//! reduction happens in path order.

mod history;
mod monte_carlo;
mod path;
mod scheme;

pub use history::HistoryBuffer;
pub use monte_carlo::{run_monte_carlo, MSCurve, MonteCarloOutput, Z95};
pub use path::{
    brownian_increments, coarsen_increments, simulate_path, simulate_path_with_increments,
    PathRecord, SimConfig, StateTrace, STABILITY_LIMIT,
};
pub use scheme::{em_step, l2_energy, reconstruct_field};

use crate::model::HeatModelSpec;

/// History buffer initialized from the model's initial segment at `t = 0`.
pub fn init_history(m: &HeatModelSpec, cfg: &SimConfig) -> HistoryBuffer {
    HistoryBuffer::from_initial_segment(m, cfg.dt)
}
