use std::path::{Path, PathBuf};

use memstab::certificate::CertificateOptions;
use memstab::model::{DelaySpec, HeatModelSpec, InitialSegment, TimeFunction};
use memstab::simulate::SimConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn zero_fn() -> TimeFunction {
    TimeFunction::zero()
}

fn default_modes() -> usize {
    16
}

fn default_rho() -> DelaySpec {
    DelaySpec::inv_one_plus_abs_sin()
}

fn default_tau() -> DelaySpec {
    DelaySpec::inv_one_plus_abs_cos()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("memstab-out")
}

/// The `model` section: parameters of the delayed stochastic heat equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub nu: f64,
    pub b1: f64,
    pub b2: f64,
    pub k: f64,
    #[serde(default = "zero_fn")]
    pub k1: TimeFunction,
    #[serde(default = "zero_fn")]
    pub k2: TimeFunction,
    #[serde(default)]
    pub p_coeffs: Vec<f64>,
    #[serde(default)]
    pub phi: InitialSegment,
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    #[serde(default = "default_rho")]
    pub rho: DelaySpec,
    #[serde(default = "default_tau")]
    pub tau: DelaySpec,
}

impl ModelSection {
    pub fn to_model(&self) -> HeatModelSpec {
        HeatModelSpec {
            nu: self.nu,
            b1: self.b1,
            b2: self.b2,
            k: self.k,
            k1: self.k1.clone(),
            k2: self.k2.clone(),
            p_coeffs: self.p_coeffs.clone(),
            phi: self.phi.clone(),
            n_modes: self.n_modes,
            rho: self.rho.clone(),
            tau: self.tau.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyOptions {
    /// Multiple of the 95% half-width allowed above the mean-square bound.
    pub ci_mult: f64,
    /// Tail fraction of the horizon used by the decay fit.
    pub window_fraction: f64,
    /// First unit interval inspected by the almost-sure check.
    pub n0: u32,
    /// Fitted rate must reach this fraction of the certified rate.
    pub min_rate_ratio: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            ci_mult: 3.0,
            window_fraction: 0.5,
            n0: 2,
            min_rate_ratio: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub certificate: CertificateOptions,
    #[serde(default)]
    pub verify: VerifyOptions,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Instance used by `demo`: `ν = 5`, `b₁ = b₂ = 1`, `k = 1`,
    /// `k₁ = k₂ = 0.1e^{−t}`, `p = 0.1·e₁`, unit mode-1 history, 16 modes.
    pub fn demo() -> Self {
        Self {
            model: ModelSection {
                nu: 5.0,
                b1: 1.0,
                b2: 1.0,
                k: 1.0,
                k1: TimeFunction::exp(0.1, 1.0).expect("valid"),
                k2: TimeFunction::exp(0.1, 1.0).expect("valid"),
                p_coeffs: vec![0.1],
                phi: InitialSegment::Constant(vec![1.0]),
                n_modes: 16,
                rho: default_rho(),
                tau: default_tau(),
            },
            sim: SimConfig::default(),
            certificate: CertificateOptions::default(),
            verify: VerifyOptions::default(),
            output_dir: PathBuf::from("memstab-demo"),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse {
                key,
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Range checks, each failure naming the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, message: String| {
            Err(CliError::Invalid {
                key: key.to_string(),
                message,
            })
        };
        let m = &self.model;
        if !(m.nu.is_finite() && m.nu > 0.0) {
            return bad("model.nu", format!("must be positive, got {}", m.nu));
        }
        for (key, v) in [("model.b1", m.b1), ("model.b2", m.b2)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(key, format!("must be nonnegative, got {v}"));
            }
        }
        if !(m.k.is_finite() && m.k > 0.0) {
            return bad("model.k", format!("must be positive, got {}", m.k));
        }
        if m.n_modes == 0 {
            return bad("model.n_modes", "must be at least 1".into());
        }
        if m.p_coeffs.len() > m.n_modes {
            return bad(
                "model.p_coeffs",
                format!("at most {} coefficients", m.n_modes),
            );
        }
        if let Err(e) = self.model.to_model().validate() {
            return bad("model", e.to_string());
        }
        let s = &self.sim;
        if !(s.dt.is_finite() && s.dt > 0.0) {
            return bad("sim.dt", format!("must be positive, got {}", s.dt));
        }
        if !(s.horizon.is_finite() && s.horizon > 0.0) {
            return bad("sim.T", format!("must be positive, got {}", s.horizon));
        }
        if s.n_paths < 2 {
            return bad(
                "sim.n_paths",
                format!("need at least 2 paths, got {}", s.n_paths),
            );
        }
        if s.output_stride == 0 {
            return bad("sim.output_stride", "must be at least 1".into());
        }
        if s.workers == Some(0) {
            return bad("sim.workers", "must be at least 1".into());
        }
        if let Err(e) = s.validate(&self.model.to_model()) {
            return bad("sim", e.to_string());
        }
        let c = &self.certificate;
        if !(c.gamma1_fraction > 0.0 && c.gamma1_fraction < 1.0) {
            return bad(
                "certificate.gamma1_fraction",
                format!("must lie in (0, 1), got {}", c.gamma1_fraction),
            );
        }
        if !(c.safety > 0.0 && c.safety < 1.0) {
            return bad(
                "certificate.safety",
                format!("must lie in (0, 1), got {}", c.safety),
            );
        }
        if !(c.bisection_tol > 0.0) {
            return bad(
                "certificate.bisection_tol",
                format!("must be positive, got {}", c.bisection_tol),
            );
        }
        let v = &self.verify;
        if !(v.ci_mult >= 0.0) {
            return bad(
                "verify.ci_mult",
                format!("must be nonnegative, got {}", v.ci_mult),
            );
        }
        if !(v.window_fraction > 0.0 && v.window_fraction <= 1.0) {
            return bad(
                "verify.window_fraction",
                format!("must lie in (0, 1], got {}", v.window_fraction),
            );
        }
        if !(v.min_rate_ratio >= 0.0) {
            return bad(
                "verify.min_rate_ratio",
                format!("must be nonnegative, got {}", v.min_rate_ratio),
            );
        }
        Ok(())
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    RunConfig::from_json(&text)
}
