//! The stochastic heat equation on `(0, π)` with memory, in the orthonormal
//! Dirichlet sine basis `e_n(x) = √(2/π) sin(n x)`:
//!
//! `dX = [ν ∂²X + (b₁ + k₁(t)) X(t−ρ(t)) + e^{−kt} p] dt + (b₂ + k₂(t)) X(t−τ(t)) dw`

use serde::{Deserialize, Serialize};

use super::delay::DelaySpec;
use super::problem::{Attestations, MemoryEnvelope, ProblemSpec};
use super::time_function::TimeFunction;
use crate::error::{Error, Result};

/// Number of nodes used to take the supremum of the initial energy over `[−r, 0]`.
pub const INIT_SUP_GRID: usize = 1024;

/// Initial segment `φ(s)` on `[−r, 0]`, given by its spectral coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSegment {
    /// The same spectral profile at every `s`.
    Constant(Vec<f64>),
    /// `amplitude · exp(−((s − center)/width)²)` on a single mode (1-based).
    ModeBump {
        mode: usize,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Linear in `s` from `at_start` (at `s = −r`) to `at_end` (at `s = 0`).
    Linear {
        at_start: Vec<f64>,
        at_end: Vec<f64>,
    },
}

impl Default for InitialSegment {
    fn default() -> Self {
        Self::Constant(vec![1.0])
    }
}

impl InitialSegment {
    /// Writes `φ(s)` into `out` (one entry per mode, zero padded).
    pub fn fill(&self, s: f64, r: f64, out: &mut [f64]) {
        out.fill(0.0);
        match self {
            Self::Constant(c) => {
                for (o, v) in out.iter_mut().zip(c) {
                    *o = *v;
                }
            }
            Self::ModeBump {
                mode,
                amplitude,
                center,
                width,
            } => {
                if let Some(o) = out.get_mut(mode - 1) {
                    let z = (s - center) / width;
                    *o = amplitude * (-z * z).exp();
                }
            }
            Self::Linear { at_start, at_end } => {
                let w = if r > 0.0 { (s + r) / r } else { 1.0 };
                for (i, o) in out.iter_mut().enumerate() {
                    let a = at_start.get(i).copied().unwrap_or(0.0);
                    let b = at_end.get(i).copied().unwrap_or(0.0);
                    *o = a + w * (b - a);
                }
            }
        }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        let check_len = |v: &[f64], what: &str| {
            if v.len() > n_modes {
                Err(Error::InvalidModel(format!(
                    "phi {what} has {} coefficients but only {n_modes} modes",
                    v.len()
                )))
            } else if v.iter().any(|x| !x.is_finite()) {
                Err(Error::InvalidModel(format!("phi {what} must be finite")))
            } else {
                Ok(())
            }
        };
        match self {
            Self::Constant(c) => check_len(c, "profile"),
            Self::ModeBump {
                mode,
                amplitude,
                center,
                width,
            } => {
                if *mode == 0 || *mode > n_modes {
                    return Err(Error::InvalidModel(format!(
                        "phi bump mode {mode} outside 1..={n_modes}"
                    )));
                }
                if !(amplitude.is_finite()
                    && center.is_finite()
                    && width.is_finite()
                    && *width > 0.0)
                {
                    return Err(Error::InvalidModel(
                        "phi bump needs finite amplitude/center and width > 0".into(),
                    ));
                }
                Ok(())
            }
            Self::Linear { at_start, at_end } => {
                check_len(at_start, "at_start")?;
                check_len(at_end, "at_end")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatModelSpec {
    /// Diffusivity.
    pub nu: f64,
    pub b1: f64,
    pub b2: f64,
    /// Decay rate of the forcing `e^{−kt} p`.
    pub k: f64,
    pub k1: TimeFunction,
    pub k2: TimeFunction,
    /// Coefficients of `p` in the sine basis.
    pub p_coeffs: Vec<f64>,
    pub phi: InitialSegment,
    pub n_modes: usize,
    pub rho: DelaySpec,
    pub tau: DelaySpec,
}

impl HeatModelSpec {
    /// Model with the default delays, no time-varying gains, no forcing and a
    /// unit mode-1 initial segment.
    pub fn new(nu: f64, b1: f64, b2: f64, k: f64, n_modes: usize) -> Self {
        Self {
            nu,
            b1,
            b2,
            k,
            k1: TimeFunction::zero(),
            k2: TimeFunction::zero(),
            p_coeffs: Vec::new(),
            phi: InitialSegment::default(),
            n_modes,
            rho: DelaySpec::inv_one_plus_abs_sin(),
            tau: DelaySpec::inv_one_plus_abs_cos(),
        }
    }

    pub fn r(&self) -> f64 {
        self.rho.r().max(self.tau.r())
    }

    /// `|p|₂²`.
    pub fn p_norm_sq(&self) -> f64 {
        self.p_coeffs.iter().map(|c| c * c).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !pos(self.nu) {
            return Err(Error::InvalidModel(format!(
                "nu = {} must be positive",
                self.nu
            )));
        }
        if !nonneg(self.b1) || !nonneg(self.b2) {
            return Err(Error::InvalidModel("b1 and b2 must be nonnegative".into()));
        }
        if !pos(self.k) {
            return Err(Error::InvalidModel(format!(
                "k = {} must be positive",
                self.k
            )));
        }
        if self.n_modes == 0 {
            return Err(Error::InvalidModel("n_modes must be at least 1".into()));
        }
        if self.p_coeffs.len() > self.n_modes || self.p_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "p needs at most {} finite coefficients",
                self.n_modes
            )));
        }
        for (name, g) in [("k1", &self.k1), ("k2", &self.k2)] {
            if !g.is_bounded() || !g.is_nonincreasing() || !g.squared().is_integrable() {
                return Err(Error::InvalidModel(format!(
                    "{name} must be bounded, nonincreasing and square integrable"
                )));
            }
        }
        self.phi.validate(self.n_modes)
    }

    /// `sup_{s∈[−r,0]} Σ_n φ(s, n)²` over a uniform grid of [`INIT_SUP_GRID`] nodes.
    pub fn init_energy_sup(&self) -> f64 {
        let r = self.r();
        let mut buf = vec![0.0; self.n_modes];
        (0..INIT_SUP_GRID)
            .map(|i| {
                let s = -r + r * i as f64 / (INIT_SUP_GRID - 1) as f64;
                self.phi.fill(s, r, &mut buf);
                buf.iter().map(|x| x * x).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Coefficient bundle of the heat model: `λ₁ = 1`, `δ₁ = 2ν`, `α₁ ≡ 0`,
/// `δ₂ = 4b₁²`, `α₂ = 4k₁²`, `β₂ = 2e^{−2kt}|p|²`, `δ₃ = 4b₂²`, `α₃ = 4k₂²`, `β₃ ≡ 0`.
///
/// `σ₁ = 2k`, unless some active `β` term decays no faster than that, in which
/// case `σ₁` is half the slowest such rate.
pub fn map_heat_to_problem(m: &HeatModelSpec) -> Result<ProblemSpec> {
    m.validate()?;
    let p_sq = m.p_norm_sq();
    let beta2 = TimeFunction::exp(2.0 * p_sq, 2.0 * m.k)?;
    let beta3 = TimeFunction::zero();
    let f_env = TimeFunction::zero();

    let slowest = beta2
        .active_rates()
        .chain(beta3.active_rates())
        .chain(f_env.active_rates())
        .fold(f64::INFINITY, f64::min);
    let mut sigma1 = 2.0 * m.k;
    if sigma1 >= slowest {
        sigma1 = 0.5 * slowest;
    }

    Ok(ProblemSpec {
        lambda1: 1.0,
        delta1: 2.0 * m.nu,
        alpha1: TimeFunction::zero(),
        f_env,
        g_env: MemoryEnvelope {
            delta: 4.0 * m.b1 * m.b1,
            alpha: m.k1.squared().scaled(4.0)?,
            beta: beta2,
        },
        h_env: MemoryEnvelope {
            delta: 4.0 * m.b2 * m.b2,
            alpha: m.k2.squared().scaled(4.0)?,
            beta: beta3,
        },
        sigma1,
        rho: m.rho.clone(),
        tau: m.tau.clone(),
        init_energy_sup: m.init_energy_sup(),
        attestations: Attestations::all(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_problem;

    #[test]
    fn reference_mapping_constants() {
        let m = HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 16);
        let p = map_heat_to_problem(&m).unwrap();
        assert_eq!(p.lambda1, 1.0);
        assert_eq!(p.delta1, 10.0);
        assert_eq!(p.g_env.delta, 4.0);
        assert_eq!(p.h_env.delta, 4.0);
        assert!(p.alpha1.is_zero());
        assert_eq!(p.r(), 1.0);
        // no forcing: sigma1 stays at 2k
        assert_eq!(p.sigma1, 2.0);
        assert_eq!(p.init_energy_sup, 1.0);
    }

    #[test]
    fn pure_heat_has_no_memory_terms() {
        let m = HeatModelSpec::new(1.0, 0.0, 0.0, 1.0, 8);
        let p = map_heat_to_problem(&m).unwrap();
        assert_eq!(p.g_env.delta, 0.0);
        assert_eq!(p.h_env.delta, 0.0);
        assert!(p.g_env.beta.is_zero());
        assert!(p.h_env.beta.is_zero());
    }

    #[test]
    fn forcing_envelope_and_sigma1_cap() {
        let mut m = HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 16);
        m.p_coeffs = vec![1.0, 0.0, 0.0];
        let p = map_heat_to_problem(&m).unwrap();
        for t in [0.0_f64, 0.5, 2.0] {
            let expected = 2.0 * (-2.0 * t).exp();
            assert!((p.g_env.beta.eval(t).unwrap() - expected).abs() < 1e-15);
        }
        assert!(p.sigma1 < 2.0);
        assert!(validate_problem(&p).passed());
    }

    #[test]
    fn exponential_gains_validate() {
        let mut m = HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 16);
        m.k1 = TimeFunction::exp(0.1, 1.0).unwrap();
        m.k2 = TimeFunction::exp(0.1, 1.0).unwrap();
        m.p_coeffs = vec![0.1];
        let p = map_heat_to_problem(&m).unwrap();
        let rep = validate_problem(&p);
        assert!(rep.passed(), "{rep:?}");
        // alpha2 = 4 k1² = 0.04 e^{-2t}
        assert!((p.g_env.alpha.eval(0.0).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_square_integrable_gain() {
        let mut m = HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 16);
        m.k1 = TimeFunction::constant(0.1).unwrap();
        assert!(map_heat_to_problem(&m).is_err());
        m.k1 = TimeFunction::table(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(map_heat_to_problem(&m).is_err());
    }

    #[test]
    fn init_sup_over_bump() {
        let mut m = HeatModelSpec::new(1.0, 0.0, 0.0, 1.0, 4);
        m.phi = InitialSegment::ModeBump {
            mode: 2,
            amplitude: 2.0,
            center: -0.5,
            width: 0.2,
        };
        // the grid is symmetric about -0.5 only approximately; peak value 4
        let sup = m.init_energy_sup();
        assert!(sup <= 4.0 && sup > 3.99, "{sup}");
    }
}
