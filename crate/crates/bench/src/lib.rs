//! Shared fixtures for the benchmarks.

use memstab::model::{HeatModelSpec, TimeFunction};
use memstab::simulate::SimConfig;

/// The feasible delayed heat instance: `ν = 5`, `b₁ = b₂ = 1`, `k = 1`,
/// `k₁ = k₂ = 0.1e^{−t}`, `p = 0.1·e₁`.
pub fn feasible_model(n_modes: usize) -> HeatModelSpec {
    let mut m = HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, n_modes);
    m.k1 = TimeFunction::exp(0.1, 1.0).expect("valid");
    m.k2 = TimeFunction::exp(0.1, 1.0).expect("valid");
    m.p_coeffs = vec![0.1];
    m
}

pub fn sim_config(dt: f64, horizon: f64, n_paths: usize) -> SimConfig {
    SimConfig {
        dt,
        horizon,
        n_paths,
        ..Default::default()
    }
}
