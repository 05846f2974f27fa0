use rayon::prelude::*;
use serde::Serialize;

use super::path::{simulate_path, PathRecord, SimConfig};
use crate::error::{Error, Result};
use crate::model::HeatModelSpec;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Monte Carlo estimate of `t ↦ E|X(t)|₂²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MSCurve {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    /// 95% normal-approximation half-width of the mean.
    pub ci_half: Vec<f64>,
    pub n_paths: usize,
}

impl MSCurve {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Pathwise mean and confidence half-width, reduced in path order.
    pub fn from_records(records: &[PathRecord]) -> Self {
        let n = records.len();
        let times = records.first().map(|r| r.times.clone()).unwrap_or_default();
        let mut mean = vec![0.0; times.len()];
        let mut ci_half = vec![0.0; times.len()];
        for (j, (m, h)) in mean.iter_mut().zip(ci_half.iter_mut()).enumerate() {
            let mu = records.iter().map(|r| r.energies[j]).sum::<f64>() / n as f64;
            *m = mu;
            if n > 1 {
                let var = records
                    .iter()
                    .map(|r| (r.energies[j] - mu).powi(2))
                    .sum::<f64>()
                    / (n - 1) as f64;
                *h = Z95 * (var / n as f64).sqrt();
            }
        }
        Self {
            times,
            mean,
            ci_half,
            n_paths: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloOutput {
    pub curve: MSCurve,
    /// Per path, per unit interval `N`: `sup_{[N,N+1]} |X|₂²`.
    pub interval_sups: Vec<Vec<f64>>,
    /// Full records, kept only when states were retained.
    pub records: Option<Vec<PathRecord>>,
}

/// Simulates `cfg.n_paths` independent paths in parallel and reduces them in
/// index order, so the output is identical for every worker count.
pub fn run_monte_carlo(m: &HeatModelSpec, cfg: &SimConfig) -> Result<MonteCarloOutput> {
    cfg.validate(m)?;
    if cfg.n_paths < 2 {
        return Err(Error::InvalidConfig(format!(
            "n_paths = {} but at least 2 are needed",
            cfg.n_paths
        )));
    }
    let work = || -> Result<Vec<PathRecord>> {
        (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| simulate_path(m, cfg, i))
            .collect()
    };
    let records = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let curve = MSCurve::from_records(&records);
    let interval_sups = records.iter().map(|r| r.interval_sups.clone()).collect();
    Ok(MonteCarloOutput {
        curve,
        interval_sups,
        records: cfg.retain_states.then_some(records),
    })
}
