use serde::{Deserialize, Serialize};

use super::Certificate;
use crate::error::{Error, Result};
use crate::model::{Envelope, ProblemSpec};

/// Grid spacing used to take `sup_t α(t) + e^{σt}β(t)` when tables are involved.
pub const B1_GRID_STEP: f64 = 1e-3;
/// Relative inflation applied to the grid supremum.
pub const B1_INFLATION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ASCertificate {
    /// Uniform bound on `α(t) + e^{σt}β(t)`.
    pub b1: f64,
    /// Pathwise decay rate `σ/2` of `|X(t)|²`.
    pub as_rate: f64,
    /// `2B(1 + B₁/σ)`.
    pub interval_coeff: f64,
}

impl ASCertificate {
    /// `P{sup_{[N,N+1]} |X|² > e^{−σN/2}} ≤ interval_coeff · e^{−σN/2}`.
    pub fn interval_probability_bound(&self, n: u32) -> f64 {
        self.interval_coeff * self.interval_threshold(n)
    }

    /// `ε_N² = e^{−σN/2}`.
    pub fn interval_threshold(&self, n: u32) -> f64 {
        (-self.as_rate * f64::from(n)).exp()
    }

    /// Eventual pathwise envelope `e^{σ/2} e^{−σt/2}`.
    pub fn pathwise_bound(&self, t: f64) -> f64 {
        (self.as_rate * (1.0 - t)).exp()
    }
}

/// Builds `B₁ = sup_t [α(t) + e^{σt}β(t)]` with
///
/// * `α(t) = α₁ + γ₂ + (δ₂ + α₂)e^{σr}/γ₂ + 32(δ₃ + α₃)e^{σr}`,
/// * `β(t) = 2β₁ + 2β₂/γ₂ + 64β₃`, `β₁ = |f|²_*/γ₁`.
///
/// Exponential-polynomial summands are nonincreasing once `e^{σt}β` is bounded,
/// so without tables the supremum is attained at `t = 0` and is exact. Tables
/// are covered by a grid of step [`B1_GRID_STEP`] up to the end of their support
/// (including every node), inflated by [`B1_INFLATION`].
pub fn build_as_certificate(p: &ProblemSpec, c: &Certificate) -> Result<ASCertificate> {
    let sigma = c.sigma;
    for (name, f) in [
        ("|f|^2", &p.f_env),
        ("beta2", &p.g_env.beta),
        ("beta3", &p.h_env.beta),
    ] {
        if !f.is_weighted_bounded(sigma) {
            return Err(Error::Unbounded(format!(
                "e^(sigma t)*{name} grows: some term decays slower than sigma = {sigma}"
            )));
        }
    }
    for (name, f) in [
        ("alpha1", &p.alpha1),
        ("alpha2", &p.g_env.alpha),
        ("alpha3", &p.h_env.alpha),
    ] {
        if !f.is_bounded() {
            return Err(Error::Unbounded(format!("{name} is unbounded")));
        }
    }

    let growth = (sigma * p.r()).exp();
    let constant = c.gamma2 + p.g_env.delta * growth / c.gamma2 + 32.0 * p.h_env.delta * growth;
    let alpha = Envelope::new()
        .with(1.0, &p.alpha1)
        .with(growth / c.gamma2, &p.g_env.alpha)
        .with(32.0 * growth, &p.h_env.alpha);
    let beta = Envelope::new()
        .with(2.0 / c.gamma1, &p.f_env)
        .with(2.0 / c.gamma2, &p.g_env.beta)
        .with(64.0, &p.h_env.beta);
    let total = |t: f64| -> Result<f64> {
        Ok(constant + alpha.eval(t)? + (sigma * t).exp() * beta.eval(t)?)
    };

    let tables: Vec<_> = alpha
        .parts()
        .iter()
        .chain(beta.parts())
        .filter_map(|(_, f)| f.table_nodes())
        .collect();
    let b1 = if tables.is_empty() {
        total(0.0)?
    } else {
        let horizon = tables
            .iter()
            .map(|(times, _)| *times.last().unwrap())
            .fold(0.0, f64::max);
        let steps = (horizon / B1_GRID_STEP).ceil() as usize;
        let mut sup = total(horizon)?;
        for i in 0..=steps {
            sup = sup.max(total((i as f64 * B1_GRID_STEP).min(horizon))?);
        }
        for (times, _) in &tables {
            for &t in *times {
                sup = sup.max(total(t)?);
            }
        }
        sup * (1.0 + B1_INFLATION)
    };

    Ok(ASCertificate {
        b1,
        as_rate: 0.5 * sigma,
        interval_coeff: 2.0 * c.b * (1.0 + b1 / sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{build_certificate, CertificateOptions};
    use crate::model::{map_heat_to_problem, HeatModelSpec, InitialSegment, TimeFunction};

    #[test]
    fn no_memory_gives_gamma2() {
        let mut m = HeatModelSpec::new(1.0, 0.0, 0.0, 3.0, 4);
        m.phi = InitialSegment::Constant(vec![]);
        let p = map_heat_to_problem(&m).unwrap();
        let c = build_certificate(&p, &CertificateOptions::default()).unwrap();
        let asc = build_as_certificate(&p, &c).unwrap();
        assert_eq!(asc.b1, c.gamma2);
        assert_eq!(asc.as_rate, c.sigma / 2.0);
        assert!((asc.interval_coeff - 2.0 * c.b * (1.0 + c.gamma2 / c.sigma)).abs() < 1e-12);
    }

    #[test]
    fn reference_model_constant_expression() {
        let p = map_heat_to_problem(&HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 16)).unwrap();
        let c = build_certificate(&p, &CertificateOptions::default()).unwrap();
        let asc = build_as_certificate(&p, &c).unwrap();
        let e = c.sigma.exp();
        let expected = c.gamma2 + 4.0 / c.gamma2 * e + 32.0 * 4.0 * e;
        assert!((asc.b1 - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn slow_beta_violates_b6() {
        let p0 = map_heat_to_problem(&HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 16)).unwrap();
        let c = build_certificate(&p0, &CertificateOptions::default()).unwrap();
        let mut p = p0.clone();
        p.g_env.beta = TimeFunction::exp(1.0, 0.5 * c.sigma).unwrap();
        assert!(matches!(
            build_as_certificate(&p, &c),
            Err(Error::Unbounded(_))
        ));
    }

    #[test]
    fn table_envelopes_use_grid_sup() {
        let mut p = map_heat_to_problem(&HeatModelSpec::new(5.0, 0.0, 0.0, 1.0, 16)).unwrap();
        p.h_env.alpha = TimeFunction::table(vec![0.0, 0.5, 1.0], vec![0.0, 0.01, 0.0]).unwrap();
        let c = build_certificate(&p, &CertificateOptions::default()).unwrap();
        let asc = build_as_certificate(&p, &c).unwrap();
        let peak = c.gamma2 + 32.0 * 0.01 * (c.sigma).exp();
        assert!((asc.b1 - peak * 1.05).abs() < 1e-12 * peak);
    }

    #[test]
    fn interval_bound_is_summable() {
        let p = map_heat_to_problem(&HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 16)).unwrap();
        let c = build_certificate(&p, &CertificateOptions::default()).unwrap();
        let asc = build_as_certificate(&p, &c).unwrap();
        let partial: f64 = (0..10_000).map(|n| asc.interval_probability_bound(n)).sum();
        let closed = asc.interval_coeff / (1.0 - (-asc.as_rate).exp());
        assert!((partial - closed).abs() < 1e-9 * closed);
        assert!((asc.pathwise_bound(1.0) - 1.0).abs() < 1e-15);
    }
}
