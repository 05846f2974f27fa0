use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::history::HistoryBuffer;
use super::scheme::{em_step_into, l2_energy, StepScratch};
use crate::error::{Error, Result};
use crate::model::HeatModelSpec;

/// Largest admissible `dt·ν·N²` for the explicit scheme.
pub const STABILITY_LIMIT: f64 = 2.0;

/// Integer grid tolerance for `T/dt` and `1/dt`.
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dt: f64,
    /// Horizon `T`.
    #[serde(rename = "T")]
    pub horizon: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    /// Record `|X|²` every `output_stride` steps.
    pub output_stride: usize,
    /// Worker threads for Monte Carlo; `None` uses the global pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Keep every grid state and increment (needed for the energy residual).
    #[serde(skip)]
    pub retain_states: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 1024.0,
            horizon: 10.0,
            n_paths: 200,
            master_seed: 20_240_601,
            output_stride: 8,
            workers: None,
            retain_states: false,
        }
    }
}

fn integral_ratio(x: f64) -> Option<usize> {
    let n = x.round();
    ((x - n).abs() <= GRID_TOL * x.max(1.0) && n >= 1.0).then_some(n as usize)
}

impl SimConfig {
    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn steps_per_unit(&self) -> usize {
        (1.0 / self.dt).round() as usize
    }

    /// Number of complete unit intervals `[N, N+1] ⊂ [0, T]`.
    pub fn n_intervals(&self) -> usize {
        self.n_steps() / self.steps_per_unit()
    }

    /// Checks grid alignment and the explicit stability bound `dt·ν·N² < 2`.
    pub fn validate(&self, m: &HeatModelSpec) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "T = {} must be positive",
                self.horizon
            )));
        }
        if integral_ratio(1.0 / self.dt).is_none() {
            return Err(Error::InvalidConfig(format!(
                "dt = {} must divide the unit interval",
                self.dt
            )));
        }
        if integral_ratio(self.horizon / self.dt).is_none() {
            return Err(Error::InvalidConfig(format!(
                "dt = {} must divide T = {}",
                self.dt, self.horizon
            )));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidConfig(
                "output_stride must be at least 1".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        let n = m.n_modes as f64;
        let cfl = self.dt * m.nu * n * n;
        if !(cfl < STABILITY_LIMIT) {
            return Err(Error::InvalidConfig(format!(
                "dt*nu*n_modes^2 = {cfl} violates the explicit stability bound {STABILITY_LIMIT}"
            )));
        }
        Ok(())
    }
}

/// Every grid state and Brownian increment of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrace {
    pub dt: f64,
    pub n_modes: usize,
    /// `(n_steps + 1) × n_modes`, row-major.
    pub states: Vec<f64>,
    pub increments: Vec<f64>,
}

impl StateTrace {
    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.n_modes..(k + 1) * self.n_modes]
    }

    pub fn n_steps(&self) -> usize {
        self.increments.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub times: Vec<f64>,
    /// `|X(t)|₂²` at `times`.
    pub energies: Vec<f64>,
    /// `max_{t_k ∈ [N, N+1]} |X(t_k)|₂²` over every grid step, `N = 0..⌊T⌋−1`.
    pub interval_sups: Vec<f64>,
    pub trace: Option<StateTrace>,
}

/// Brownian increments of path `path_index`: ChaCha8 keyed by `master_seed`,
/// with the path index selecting the stream, so the result does not depend on
/// which worker runs the path.
pub fn brownian_increments(master_seed: u64, path_index: u64, n_steps: usize, dt: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(path_index);
    let scale = dt.sqrt();
    (0..n_steps)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
        .collect()
}

/// Sums consecutive blocks of `factor` increments: the same Brownian path on a coarser grid.
pub fn coarsen_increments(fine: &[f64], factor: usize) -> Vec<f64> {
    assert!(factor > 0 && fine.len().is_multiple_of(factor));
    fine.chunks_exact(factor).map(|c| c.iter().sum()).collect()
}

/// Simulates path `path_index` with increments drawn from its own stream.
pub fn simulate_path(m: &HeatModelSpec, cfg: &SimConfig, path_index: u64) -> Result<PathRecord> {
    cfg.validate(m)?;
    let incs = brownian_increments(cfg.master_seed, path_index, cfg.n_steps(), cfg.dt);
    run_path(m, cfg, &incs)
}

/// Simulates one path driven by the given increments (one per step).
pub fn simulate_path_with_increments(
    m: &HeatModelSpec,
    cfg: &SimConfig,
    increments: &[f64],
) -> Result<PathRecord> {
    cfg.validate(m)?;
    if increments.len() != cfg.n_steps() {
        return Err(Error::InvalidConfig(format!(
            "{} increments supplied for {} steps",
            increments.len(),
            cfg.n_steps()
        )));
    }
    run_path(m, cfg, increments)
}

fn run_path(m: &HeatModelSpec, cfg: &SimConfig, increments: &[f64]) -> Result<PathRecord> {
    let dt = cfg.dt;
    let n_modes = m.n_modes;
    let n_steps = increments.len();
    let spu = cfg.steps_per_unit();
    let n_intervals = n_steps / spu;

    let mut hist = HistoryBuffer::from_initial_segment(m, dt);
    let mut scratch = StepScratch::new(n_modes);
    let mut state = hist.current().to_vec();
    let mut next = vec![0.0; n_modes];

    let mut times = Vec::with_capacity(n_steps / cfg.output_stride + 1);
    let mut energies = Vec::with_capacity(times.capacity());
    let mut sups = vec![0.0f64; n_intervals];
    let mut trace = cfg.retain_states.then(|| StateTrace {
        dt,
        n_modes,
        states: Vec::with_capacity((n_steps + 1) * n_modes),
        increments: increments.to_vec(),
    });

    let mut record = |k: usize, state: &[f64], trace: &mut Option<StateTrace>| {
        let e = l2_energy(state);
        if k.is_multiple_of(cfg.output_stride) {
            times.push(k as f64 * dt);
            energies.push(e);
        }
        let n = k / spu;
        if n < n_intervals {
            sups[n] = sups[n].max(e);
        }
        if k.is_multiple_of(spu) && k > 0 && n <= n_intervals {
            sups[n - 1] = sups[n - 1].max(e);
        }
        if let Some(tr) = trace {
            tr.states.extend_from_slice(state);
        }
    };

    record(0, &state, &mut trace);
    for (k, dw) in increments.iter().enumerate() {
        let t = k as f64 * dt;
        em_step_into(&state, &hist, t, dt, *dw, m, &mut scratch, &mut next)?;
        hist.push(&next);
        std::mem::swap(&mut state, &mut next);
        record(k + 1, &state, &mut trace);
    }

    Ok(PathRecord {
        times,
        energies,
        interval_sups: sups,
        trace,
    })
}
