//! Constructive mean-square and almost-sure exponential stability certificates.
//!
//! Given a [`ProblemSpec`] satisfying the coercivity, growth and integrability
//! hypotheses, [`build_certificate`] picks `γ₁`, `γ₂` and `σ`, evaluates the
//! envelope integrals `R₁, R₂, R₃` and returns constants with
//! `E|X(t)|² ≤ B e^{−σt}`. [`build_as_certificate`] adds the pathwise
//! supplement `|X(t)|² ≤ e^{σ/2} e^{−σt/2}` eventually, almost surely.

mod almost_sure;
mod hypotheses;
mod sigma;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_problem, Envelope, ProblemSpec};

pub use almost_sure::{build_as_certificate, ASCertificate, B1_GRID_STEP, B1_INFLATION};
pub use hypotheses::{
    check_hypotheses, heat_coercivity_spot_check, HypothesisRecord, HypothesisReport, Status,
};
pub use sigma::{
    bisect, check_b5, constraint_slack, optimal_gamma2, reduced_constraint, solve_sigma, B5Check,
    SigmaSolution,
};

/// Exponential weight used in `R₃ = ∫ e^{w s} β(s) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum R3Weight {
    /// `w = σ₁`, as in the original bound.
    #[default]
    Sigma1,
    /// `w = σ`, tighter and sufficient for the decay estimate.
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateOptions {
    /// `γ₁` as a fraction of the coercivity slack `δ₁ − (2√δ₂ + δ₃)/λ₁`.
    pub gamma1_fraction: f64,
    /// `σ = safety · min(σ*, σ₁)`.
    pub safety: f64,
    /// Absolute bisection tolerance on `σ*`.
    pub bisection_tol: f64,
    pub r3_weight: R3Weight,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            gamma1_fraction: 0.1,
            safety: 0.95,
            bisection_tol: 1e-9,
            r3_weight: R3Weight::Sigma1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma: f64,
    /// `(δ₁ − γ₁)λ₁`.
    pub a: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    /// `1 + sup_{[−r,0]} E|X|²`.
    pub m: f64,
    /// `e^{R₁+R₃} M`.
    pub b: f64,
    pub constraint_slack: f64,
    /// Human-readable remarks about the construction.
    pub notes: Vec<String>,
}

impl Certificate {
    /// `θ(t) = α₁(t) + e^{σr}(α₂(t)/γ₂ + α₃(t))`.
    pub fn theta(&self, p: &ProblemSpec) -> Envelope {
        let growth = (self.sigma * p.r()).exp();
        Envelope::new()
            .with(1.0, &p.alpha1)
            .with(growth / self.gamma2, &p.g_env.alpha)
            .with(growth, &p.h_env.alpha)
    }

    /// `β(t) = |f(t)|²_*/γ₁ + β₂(t)/γ₂ + β₃(t)`.
    pub fn beta(&self, p: &ProblemSpec) -> Envelope {
        Envelope::new()
            .with(1.0 / self.gamma1, &p.f_env)
            .with(1.0 / self.gamma2, &p.g_env.beta)
            .with(1.0, &p.h_env.beta)
    }

    /// Certified mean-square bound `B e^{−σt}`.
    pub fn ms_bound(&self, t: f64) -> f64 {
        self.b * (-self.sigma * t).exp()
    }
}

/// Runs the construction: `γ₁`, `a`, `(σ, γ₂)`, the envelope integrals, `M` and `B`.
pub fn build_certificate(p: &ProblemSpec, opts: &CertificateOptions) -> Result<Certificate> {
    let report = validate_problem(p);
    if !report.passed() {
        let names: Vec<_> = report
            .failures()
            .map(|i| format!("({}) {}", i.condition, i.name))
            .collect();
        return Err(Error::InvalidProblem(names.join("; ")));
    }
    if !(opts.gamma1_fraction > 0.0 && opts.gamma1_fraction < 1.0) {
        return Err(Error::Infeasible(format!(
            "gamma1_fraction {} outside (0, 1)",
            opts.gamma1_fraction
        )));
    }
    let (delta2, delta3) = (p.g_env.delta, p.h_env.delta);
    let b5 = check_b5(p.lambda1, p.delta1, delta2, delta3);
    if !b5.pass {
        return Err(Error::Infeasible(format!(
            "(B5) fails: delta1*lambda1 - 2*sqrt(delta2) - delta3 = {}",
            b5.slack
        )));
    }

    let gamma1 = opts.gamma1_fraction * (p.delta1 - (2.0 * delta2.sqrt() + delta3) / p.lambda1);
    let a = (p.delta1 - gamma1) * p.lambda1;
    let r = p.r();
    let sol = solve_sigma(
        a,
        delta2,
        delta3,
        r,
        p.sigma1,
        opts.safety,
        opts.bisection_tol,
    )?;

    let mut cert = Certificate {
        gamma1,
        gamma2: sol.gamma2,
        sigma: sol.sigma,
        a,
        r1: 0.0,
        r2: 0.0,
        r3: 0.0,
        m: 1.0 + p.init_energy_sup,
        b: 0.0,
        constraint_slack: sol.constraint_slack,
        notes: Vec::new(),
    };
    let theta = cert.theta(p);
    let beta = cert.beta(p);
    let r3_rate = match opts.r3_weight {
        R3Weight::Sigma1 => p.sigma1,
        R3Weight::Sigma => cert.sigma,
    };
    cert.r1 = theta.integrate(0.0)?;
    cert.r2 = beta.integrate(0.0)?;
    cert.r3 = beta.integrate(r3_rate)?;
    cert.b = (cert.r1 + cert.r3).exp() * cert.m;

    if theta.parts().len() > usize::from(!p.alpha1.is_zero()) {
        cert.notes.push(format!(
            "theta weights the memory gains by e^(sigma*r) = {:.6}",
            (cert.sigma * r).exp()
        ));
    }
    if cert.sigma < opts.safety * sol.sigma_star * (1.0 - 1e-12) {
        cert.notes.push(format!(
            "decay rate capped by sigma1 = {} (unconstrained root {})",
            p.sigma1, sol.sigma_star
        ));
    }
    Ok(cert)
}

/// Flat JSON form of a certificate and its almost-sure supplement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma: f64,
    pub a: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "R3")]
    pub r3: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub constraint_slack: f64,
    #[serde(rename = "B1")]
    pub b1: Option<f64>,
    pub as_rate: Option<f64>,
    pub interval_coeff: Option<f64>,
}

impl CertificateDocument {
    pub fn new(c: &Certificate, asc: Option<&ASCertificate>) -> Self {
        Self {
            gamma1: c.gamma1,
            gamma2: c.gamma2,
            sigma: c.sigma,
            a: c.a,
            r1: c.r1,
            r2: c.r2,
            r3: c.r3,
            m: c.m,
            b: c.b,
            constraint_slack: c.constraint_slack,
            b1: asc.map(|x| x.b1),
            as_rate: asc.map(|x| x.as_rate),
            interval_coeff: asc.map(|x| x.interval_coeff),
        }
    }

    pub fn certificate(&self) -> Certificate {
        Certificate {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            sigma: self.sigma,
            a: self.a,
            r1: self.r1,
            r2: self.r2,
            r3: self.r3,
            m: self.m,
            b: self.b,
            constraint_slack: self.constraint_slack,
            notes: Vec::new(),
        }
    }

    pub fn as_certificate(&self) -> Option<ASCertificate> {
        Some(ASCertificate {
            b1: self.b1?,
            as_rate: self.as_rate?,
            interval_coeff: self.interval_coeff?,
        })
    }
}
