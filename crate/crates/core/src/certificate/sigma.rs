//! Feasibility of the decay-rate constraint
//!
//! `a > σ + γ₂ + e^{σr} δ₂/γ₂ + e^{σr} δ₃`
//!
//! and selection of `(σ, γ₂)` satisfying it strictly.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct B5Check {
    pub pass: bool,
    /// `δ₁λ₁ − 2√δ₂ − δ₃`.
    pub slack: f64,
}

/// Strict coercivity-versus-memory condition `δ₁λ₁ > 2√δ₂ + δ₃`.
pub fn check_b5(lambda1: f64, delta1: f64, delta2: f64, delta3: f64) -> B5Check {
    let slack = delta1 * lambda1 - 2.0 * delta2.sqrt() - delta3;
    B5Check {
        pass: slack > 0.0,
        slack,
    }
}

/// Minimizer `√(δ₂ e^{σr})` of `γ ↦ γ + e^{σr} δ₂/γ`.
pub fn optimal_gamma2(delta2: f64, sigma: f64, r: f64) -> f64 {
    (delta2 * (sigma * r).exp()).sqrt()
}

/// `a − σ − γ₂ − e^{σr}δ₂/γ₂ − e^{σr}δ₃`; the certificate needs this strictly positive.
pub fn constraint_slack(a: f64, sigma: f64, gamma2: f64, delta2: f64, delta3: f64, r: f64) -> f64 {
    let growth = (sigma * r).exp();
    a - sigma - gamma2 - growth * delta2 / gamma2 - growth * delta3
}

/// The constraint after eliminating `γ₂` at its optimum:
/// `φ(σ) = σ + 2√δ₂ e^{σr/2} + δ₃ e^{σr} − a`, strictly increasing in `σ`.
pub fn reduced_constraint(sigma: f64, a: f64, delta2: f64, delta3: f64, r: f64) -> f64 {
    sigma + 2.0 * delta2.sqrt() * (0.5 * sigma * r).exp() + delta3 * (sigma * r).exp() - a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaSolution {
    /// Root of the reduced constraint.
    pub sigma_star: f64,
    /// `safety · min(σ*, σ₁)`.
    pub sigma: f64,
    pub gamma2: f64,
    pub constraint_slack: f64,
    pub iterations: u32,
}

/// Bisection on an increasing function with `f(lo) < 0 < f(hi)`, stopping
/// once the bracket is narrower than `tol`. `on_step` sees every bracket.
pub fn bisect<F, O>(f: F, mut lo: f64, mut hi: f64, tol: f64, mut on_step: O) -> (f64, u32)
where
    F: Fn(f64) -> f64,
    O: FnMut(f64, f64),
{
    let mut iterations = 0;
    while hi - lo > tol {
        on_step(lo, hi);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        iterations += 1;
        if v < 0.0 {
            lo = mid;
        } else if v > 0.0 {
            hi = mid;
        } else {
            return (mid, iterations);
        }
    }
    (0.5 * (lo + hi), iterations)
}

/// Largest certifiable decay rate and the matching `γ₂`.
///
/// For `δ₂ > 0`, `γ₂` is eliminated at its optimum and `σ*` is the root of
/// [`reduced_constraint`]. For `δ₂ = 0` the root of `σ + δ₃e^{σr} − a` is
/// used and `γ₂ = ½(a − σ − δ₃e^{σr})` once `σ` is fixed. `sigma1` may be infinite.
pub fn solve_sigma(
    a: f64,
    delta2: f64,
    delta3: f64,
    r: f64,
    sigma1: f64,
    safety: f64,
    tol: f64,
) -> Result<SigmaSolution> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::Infeasible(format!(
            "safety factor {safety} outside (0, 1)"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Infeasible(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if !(sigma1 > 0.0) {
        return Err(Error::Infeasible(format!(
            "sigma1 = {sigma1} must be positive"
        )));
    }
    if !(delta2 >= 0.0 && delta3 >= 0.0 && r >= 0.0) {
        return Err(Error::Infeasible(
            "delta2, delta3 and r must be nonnegative".into(),
        ));
    }
    let phi = |s: f64| reduced_constraint(s, a, delta2, delta3, r);
    let at_zero = phi(0.0);
    if !(at_zero < 0.0) {
        return Err(Error::Infeasible(format!(
            "a = {a} does not exceed 2√δ₂ + δ₃ = {}",
            a + at_zero
        )));
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut sigma_star = None;
    loop {
        let v = phi(hi);
        if v > 0.0 {
            break;
        }
        if v == 0.0 {
            sigma_star = Some(hi);
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    let (sigma_star, iterations) = match sigma_star {
        Some(s) => (s, 0),
        None => bisect(phi, lo, hi, tol, |l, h| {
            debug_assert!(phi(l) < 0.0 && phi(h) > 0.0);
        }),
    };

    let sigma = safety * sigma_star.min(sigma1);
    let gamma2 = if delta2 > 0.0 {
        optimal_gamma2(delta2, sigma, r)
    } else {
        0.5 * (a - sigma - delta3 * (sigma * r).exp())
    };
    let slack = constraint_slack(a, sigma, gamma2, delta2, delta3, r);
    if !(slack > 0.0 && gamma2 > 0.0) {
        return Err(Error::Infeasible(format!(
            "selected sigma = {sigma}, gamma2 = {gamma2} leave slack {slack}"
        )));
    }
    Ok(SigmaSolution {
        sigma_star,
        sigma,
        gamma2,
        constraint_slack: slack,
        iterations,
    })
}
