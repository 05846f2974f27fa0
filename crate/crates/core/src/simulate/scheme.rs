use std::f64::consts::PI;

use super::history::HistoryBuffer;
use crate::error::Result;
use crate::model::HeatModelSpec;

/// Scratch space for one Euler–Maruyama step.
#[derive(Debug, Clone)]
pub(crate) struct StepScratch {
    pub x_rho: Vec<f64>,
    pub x_tau: Vec<f64>,
}

impl StepScratch {
    pub fn new(n_modes: usize) -> Self {
        Self {
            x_rho: vec![0.0; n_modes],
            x_tau: vec![0.0; n_modes],
        }
    }
}

/// Writes the Euler–Maruyama update of every mode into `next`:
///
/// `X_n⁺ = X_n + dt(−νn²X_n + (b₁+k₁(t))X_n^ρ + e^{−kt}p_n) + dW (b₂+k₂(t))X_n^τ`
///
/// with `X^ρ = X(t − ρ(t))`, `X^τ = X(t − τ(t))` read from `hist`. One scalar
/// Brownian increment drives every mode.
#[allow(clippy::too_many_arguments)]
pub(crate) fn em_step_into(
    state: &[f64],
    hist: &HistoryBuffer,
    t: f64,
    dt: f64,
    dw: f64,
    m: &HeatModelSpec,
    scratch: &mut StepScratch,
    next: &mut [f64],
) -> Result<()> {
    hist.lookup_into(t - m.rho.lag(t), &mut scratch.x_rho)?;
    hist.lookup_into(t - m.tau.lag(t), &mut scratch.x_tau)?;
    let drift_gain = m.b1 + m.k1.value(t);
    let noise_gain = m.b2 + m.k2.value(t);
    let forcing = (-m.k * t).exp();
    for (i, out) in next.iter_mut().enumerate() {
        let n2 = ((i + 1) * (i + 1)) as f64;
        let p = m.p_coeffs.get(i).copied().unwrap_or(0.0);
        let x = state[i];
        let drift = -m.nu * n2 * x + drift_gain * scratch.x_rho[i] + forcing * p;
        *out = x + dt * drift + dw * noise_gain * scratch.x_tau[i];
    }
    Ok(())
}

/// One Euler–Maruyama step of the heat model against the history `hist`.
/// `dw` is the Brownian increment over `[t, t + dt]`.
pub fn em_step(
    state: &[f64],
    hist: &HistoryBuffer,
    t: f64,
    dt: f64,
    dw: f64,
    m: &HeatModelSpec,
) -> Result<Vec<f64>> {
    let mut scratch = StepScratch::new(state.len());
    let mut next = vec![0.0; state.len()];
    em_step_into(state, hist, t, dt, dw, m, &mut scratch, &mut next)?;
    Ok(next)
}

/// `|X|₂² = Σ X_n²` in the orthonormal sine basis.
pub fn l2_energy(coeffs: &[f64]) -> f64 {
    coeffs.iter().map(|c| c * c).sum()
}

/// Physical-space value `X(x) = Σ X_n √(2/π) sin(n x)`.
pub fn reconstruct_field(coeffs: &[f64], x: f64) -> f64 {
    let norm = (2.0 / PI).sqrt();
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * norm * ((i + 1) as f64 * x).sin())
        .sum()
}
