use serde::Serialize;

use super::delay::DelaySpec;
use super::time_function::TimeFunction;

/// Growth envelope of a memory coefficient:
/// `|g(t,u)|² ≤ (δ + α(t))|u|² + β(t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MemoryEnvelope {
    pub delta: f64,
    pub alpha: TimeFunction,
    pub beta: TimeFunction,
}

/// Operator properties the user asserts but the toolkit cannot check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Attestations {
    /// `t ↦ A(t, v)` is measurable.
    pub measurable: bool,
    /// `μ ↦ ⟨A(t, u + μv), w⟩` is continuous.
    pub hemicontinuous: bool,
    /// `|A(t, v)|_* ≤ c‖v‖`.
    pub bounded: bool,
}

impl Attestations {
    pub fn all() -> Self {
        Self {
            measurable: true,
            hemicontinuous: true,
            bounded: true,
        }
    }
}

/// The coefficient bundle of a stochastic evolution equation with finite memory
/// `dX = [A(t,X) + f(t) + g(t, X(t−ρ(t)))]dt + h(t, X(t−τ(t)))dW`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// Embedding constant: `λ₁|v|² ≤ ‖v‖²`.
    pub lambda1: f64,
    /// Coercivity: `−2⟨A(t,u)−A(t,v), u−v⟩ + α₁(t)|u−v|² ≥ δ₁‖u−v‖²`.
    pub delta1: f64,
    pub alpha1: TimeFunction,
    /// `t ↦ |f(t)|²_*`.
    pub f_env: TimeFunction,
    pub g_env: MemoryEnvelope,
    pub h_env: MemoryEnvelope,
    /// Exponential weight under which the forcing and `β_i` must stay integrable.
    pub sigma1: f64,
    pub rho: DelaySpec,
    pub tau: DelaySpec,
    /// `sup_{s∈[−r,0]} E|X(s)|²`.
    pub init_energy_sup: f64,
    pub attestations: Attestations,
}

impl ProblemSpec {
    /// Memory horizon shared by both delays.
    pub fn r(&self) -> f64 {
        self.rho.r().max(self.tau.r())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationItem {
    pub name: String,
    /// Hypothesis the item belongs to, e.g. `"B2"`.
    pub condition: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
}

impl ValidationReport {
    fn push(&mut self, condition: &'static str, name: &str, pass: bool, detail: String) {
        self.items.push(ValidationItem {
            name: name.to_owned(),
            condition,
            pass,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationItem> {
        self.items.iter().filter(|i| !i.pass)
    }

    /// Whether every item tagged with `condition` passed.
    pub fn condition_passed(&self, condition: &str) -> bool {
        self.items
            .iter()
            .filter(|i| i.condition == condition)
            .all(|i| i.pass)
    }
}

fn describe_rates(f: &TimeFunction) -> String {
    let rates: Vec<String> = f.active_rates().map(|q| format!("{q}")).collect();
    if rates.is_empty() {
        match f.support_end() {
            Some(end) => format!("table supported on [0, {end}]"),
            None => "identically zero".to_owned(),
        }
    } else {
        format!("active rates [{}]", rates.join(", "))
    }
}

/// Itemized sign and integrability checks. Never fails; inspect the report.
pub fn validate_problem(p: &ProblemSpec) -> ValidationReport {
    let mut rep = ValidationReport::default();
    rep.push(
        "embedding",
        "lambda1 > 0",
        p.lambda1.is_finite() && p.lambda1 > 0.0,
        format!("lambda1 = {}", p.lambda1),
    );
    rep.push(
        "B1",
        "delta1 > 0",
        p.delta1.is_finite() && p.delta1 > 0.0,
        format!("delta1 = {}", p.delta1),
    );
    rep.push(
        "B1",
        "alpha1 integrable",
        p.alpha1.is_integrable(),
        describe_rates(&p.alpha1),
    );
    for (cond, label, env) in [("B2", "2", &p.g_env), ("B3", "3", &p.h_env)] {
        rep.push(
            cond,
            &format!("delta{label} >= 0"),
            env.delta.is_finite() && env.delta >= 0.0,
            format!("delta{label} = {}", env.delta),
        );
        rep.push(
            cond,
            &format!("alpha{label} integrable"),
            env.alpha.is_integrable(),
            describe_rates(&env.alpha),
        );
        rep.push(
            cond,
            &format!("beta{label} integrable"),
            env.beta.is_integrable(),
            describe_rates(&env.beta),
        );
    }
    let sigma1_ok = p.sigma1.is_finite() && p.sigma1 > 0.0;
    rep.push(
        "B4",
        "sigma1 > 0",
        sigma1_ok,
        format!("sigma1 = {}", p.sigma1),
    );
    for (name, f) in [
        ("forcing weighted integrable", &p.f_env),
        ("beta2 weighted integrable", &p.g_env.beta),
        ("beta3 weighted integrable", &p.h_env.beta),
    ] {
        rep.push(
            "B4",
            name,
            sigma1_ok && f.is_weighted_integrable(p.sigma1),
            format!("{} against sigma1 = {}", describe_rates(f), p.sigma1),
        );
    }
    rep.push(
        "memory",
        "rho and tau share r",
        p.rho.r() == p.tau.r(),
        format!("r(rho) = {}, r(tau) = {}", p.rho.r(), p.tau.r()),
    );
    rep.push(
        "initial data",
        "init_energy_sup >= 0",
        p.init_energy_sup.is_finite() && p.init_energy_sup >= 0.0,
        format!("init_energy_sup = {}", p.init_energy_sup),
    );
    rep
}
