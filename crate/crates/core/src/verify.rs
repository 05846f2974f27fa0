//! Confronts Monte Carlo output with a certificate.
//!
//! Every check returns a [`CheckRecord`]; a failing check never prevents the
//! others from running. Certificates bound expectations while the simulator
//! produces estimates, so each comparison carries a statistical allowance:
//! a multiple of the normal confidence half-width for mean-square quantities,
//! and the Wilson upper confidence offset for violation frequencies.

use serde::{Serialize, Serializer};

use crate::certificate::{ASCertificate, Certificate};
use crate::error::{Error, Result};
use crate::model::{HeatModelSpec, ProblemSpec};
use crate::simulate::{
    brownian_increments, coarsen_increments, l2_energy, simulate_path_with_increments,
    HistoryBuffer, MSCurve, PathRecord, SimConfig,
};

/// Minimum number of usable points in the fit window.
pub const MIN_FIT_POINTS: usize = 10;
/// Relative tolerance on `K(t) ≤ M` for quadrature and rounding.
pub const K_FUNCTIONAL_TOL: f64 = 1e-9;
/// Required RMS reduction per halving of `dt` in the refinement study.
pub const ENERGY_HALVING_RATIO: f64 = 1.7;
const WILSON_Z: f64 = 1.959_963_984_540_054;

fn finite_or_label<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    #[serde(serialize_with = "finite_or_label")]
    pub measured: f64,
    #[serde(serialize_with = "finite_or_label")]
    pub bound: f64,
    #[serde(serialize_with = "finite_or_label")]
    pub slack: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "[{}] {:<18} measured={:<12.6e} bound={:<12.6e} slack={:.6e}  {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.bound,
                    c.slack,
                    c.detail
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Fitted rate; `+∞` when the curve vanishes identically in the window.
    #[serde(serialize_with = "finite_or_label")]
    pub sigma_hat: f64,
    #[serde(serialize_with = "finite_or_label")]
    pub intercept: f64,
    pub r_squared: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub n_points: usize,
}

/// Least-squares fit of `log mean(t)` on `t` over the last `window_fraction`
/// of the horizon, using only points whose confidence half-width is below the mean.
pub fn fit_decay_rate(curve: &MSCurve, window_fraction: f64) -> Result<DecayFit> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::DegenerateFit(format!(
            "window fraction {window_fraction} outside (0, 1]"
        )));
    }
    let (Some(&t0), Some(&t1)) = (curve.times.first(), curve.times.last()) else {
        return Err(Error::DegenerateFit("empty curve".into()));
    };
    let t_lo = t1 - window_fraction * (t1 - t0);
    let window: Vec<usize> = (0..curve.len())
        .filter(|&j| curve.times[j] >= t_lo)
        .collect();
    if !window.is_empty() && window.iter().all(|&j| curve.mean[j] == 0.0) {
        return Ok(DecayFit {
            sigma_hat: f64::INFINITY,
            intercept: f64::NEG_INFINITY,
            r_squared: 1.0,
            t_lo,
            t_hi: t1,
            n_points: window.len(),
        });
    }
    if window.iter().any(|&j| curve.mean[j] == 0.0) {
        return Err(Error::DegenerateFit(
            "mean hits zero inside the window".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = window
        .iter()
        .filter(|&&j| curve.ci_half[j] < curve.mean[j])
        .map(|&j| (curve.times[j], curve.mean[j].ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "{} usable points, need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit {
        sigma_hat: -slope,
        intercept,
        r_squared,
        t_lo,
        t_hi: t1,
        n_points: pts.len(),
    })
}

/// Observed decay must reach `min_ratio · σ`.
pub fn check_decay_rate(fit: &DecayFit, cert: &Certificate, min_ratio: f64) -> CheckRecord {
    let bound = min_ratio * cert.sigma;
    CheckRecord {
        name: "decay_rate".into(),
        pass: fit.sigma_hat >= bound,
        measured: fit.sigma_hat,
        bound,
        slack: fit.sigma_hat - bound,
        detail: format!(
            "fit on [{:.3}, {:.3}], {} points, R^2 = {:.6}",
            fit.t_lo, fit.t_hi, fit.n_points, fit.r_squared
        ),
    }
}

/// `mean(t) ≤ B e^{−σt} + ci_mult · half(t)` at every sampled time.
///
/// `measured` is the worst ratio of the mean to its allowance and `slack` the
/// smallest log-margin `ln(allowance/mean)`: infinite for a null curve and zero
/// on the boundary.
pub fn check_ms_bound(curve: &MSCurve, cert: &Certificate, ci_mult: f64) -> CheckRecord {
    let mut pass = true;
    let mut worst_ratio = 0.0f64;
    let mut slack = f64::INFINITY;
    let mut worst_t = f64::NAN;
    for j in 0..curve.len() {
        let t = curve.times[j];
        let allowance = cert.ms_bound(t) + ci_mult * curve.ci_half[j];
        let mean = curve.mean[j];
        pass &= mean <= allowance;
        let ratio = mean / allowance;
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_t = t;
        }
        slack = slack.min((allowance / mean).ln());
    }
    CheckRecord {
        name: "ms_bound".into(),
        pass,
        measured: worst_ratio,
        bound: 1.0,
        slack,
        detail: format!(
            "E|X|^2 <= {:.6}*exp(-{:.6} t) + {ci_mult}*CI; worst at t = {worst_t}",
            cert.b, cert.sigma
        ),
    }
}

/// `K(t) = mean(t) e^{σt} exp(−∫₀ᵗ [θ(s) + e^{σs}β(s)] ds) ≤ M` with the inner
/// integral by the trapezoid rule on the curve grid. The statistical allowance
/// evaluates `K` at `mean − ci_mult·half`.
pub fn check_k_functional(
    curve: &MSCurve,
    cert: &Certificate,
    p: &ProblemSpec,
    ci_mult: f64,
) -> CheckRecord {
    let theta = cert.theta(p);
    let beta = cert.beta(p);
    let integrand = |s: f64| {
        let s = s.max(0.0);
        theta.eval(s).unwrap_or(0.0) + (cert.sigma * s).exp() * beta.eval(s).unwrap_or(0.0)
    };
    let mut cumulative = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut pass = true;
    let mut max_k = 0.0f64;
    let mut max_k_low = 0.0f64;
    for j in 0..curve.len() {
        let t = curve.times[j];
        let g = integrand(t);
        if let Some((tp, gp)) = prev {
            cumulative += 0.5 * (t - tp) * (g + gp);
        }
        prev = Some((t, g));
        let factor = (cert.sigma * t - cumulative).exp();
        let k = curve.mean[j] * factor;
        let k_low = (curve.mean[j] - ci_mult * curve.ci_half[j]).max(0.0) * factor;
        pass &= k_low <= cert.m * (1.0 + K_FUNCTIONAL_TOL);
        max_k = max_k.max(k);
        max_k_low = max_k_low.max(k_low);
    }
    CheckRecord {
        name: "k_functional".into(),
        pass,
        measured: max_k,
        bound: cert.m,
        slack: cert.m - max_k_low,
        detail: format!(
            "max K(t) = {max_k:.6e} (lower CI {max_k_low:.6e}) vs M = {}",
            cert.m
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalStat {
    pub n: u32,
    pub threshold: f64,
    pub violations: usize,
    pub frequency: f64,
    /// `min(1, interval_coeff · e^{−σN/2})`.
    pub allowed: f64,
    /// Wilson upper confidence offset added to `allowed`.
    pub statistical_slack: f64,
    /// The probability bound is at least 1 and says nothing.
    pub vacuous: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsDecayOutcome {
    pub record: CheckRecord,
    pub intervals: Vec<IntervalStat>,
    /// Per path, the last interval `N ≥ N0` whose supremum exceeded its threshold.
    pub last_violation: Vec<Option<u32>>,
}

/// Wilson score interval `(lower, upper)` for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Per interval `I_N = [N, N+1]`, `N ≥ n0`: the fraction of paths with
/// `sup_{I_N} |X|² > e^{−σN/2}` must not exceed
/// `min(1, interval_coeff · e^{−σN/2})` plus the Wilson upper offset.
pub fn check_as_decay(
    interval_sups: &[Vec<f64>],
    cert: &Certificate,
    asc: &ASCertificate,
    n0: u32,
) -> AsDecayOutcome {
    let n_paths = interval_sups.len();
    let n_intervals = interval_sups.iter().map(Vec::len).min().unwrap_or(0);
    let mut intervals = Vec::new();
    let mut last_violation = vec![None; n_paths];
    if (n_intervals as u64) < u64::from(n0) + 2 {
        return AsDecayOutcome {
            record: CheckRecord {
                name: "as_decay".into(),
                pass: false,
                measured: f64::NAN,
                bound: f64::NAN,
                slack: f64::NAN,
                detail: format!(
                    "horizon holds {n_intervals} unit intervals, need at least N0 + 2 = {}",
                    n0 + 2
                ),
            },
            intervals,
            last_violation,
        };
    }
    let half_sigma = 0.5 * cert.sigma;
    let mut pass = true;
    let mut worst_excess = f64::NEG_INFINITY;
    for n in n0..n_intervals as u32 {
        let threshold = (-half_sigma * f64::from(n)).exp();
        let mut violations = 0;
        for (path, sups) in interval_sups.iter().enumerate() {
            if sups[n as usize] > threshold {
                violations += 1;
                last_violation[path] = Some(n);
            }
        }
        let raw = asc.interval_coeff * threshold;
        let allowed = raw.min(1.0);
        let frequency = violations as f64 / n_paths as f64;
        let (_, upper) = wilson_interval(violations, n_paths);
        let statistical_slack = upper - frequency;
        let ok = frequency <= allowed + statistical_slack;
        pass &= ok;
        worst_excess = worst_excess.max(frequency - allowed - statistical_slack);
        intervals.push(IntervalStat {
            n,
            threshold,
            violations,
            frequency,
            allowed,
            statistical_slack,
            vacuous: raw >= 1.0,
            pass: ok,
        });
    }
    let vacuous = intervals.iter().filter(|s| s.vacuous).count();
    let max_freq = intervals.iter().map(|s| s.frequency).fold(0.0, f64::max);
    let eventually = last_violation.iter().filter(|v| v.is_some()).count();
    AsDecayOutcome {
        record: CheckRecord {
            name: "as_decay".into(),
            pass,
            measured: max_freq,
            bound: intervals.iter().map(|s| s.allowed).fold(0.0, f64::max),
            slack: -worst_excess,
            detail: format!(
                "N = {n0}..{}: {vacuous} vacuous intervals, {eventually}/{n_paths} paths with a violation",
                n_intervals - 1
            ),
        },
        intervals,
        last_violation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyResidual {
    /// Discrete defect of the Itô energy identity on each step.
    pub per_step: Vec<f64>,
    /// Root-mean-square of `per_step`.
    pub rms: f64,
    /// `|Σ_k r_k|`: accumulated defect of the identity over the whole horizon.
    pub cumulative: f64,
}

/// Defect of the energy identity on each step of a retained path:
///
/// `|X_{k+1}|² − |X_k|² − [2⟨X_k, AX_k + g⟩Δt + ‖h‖²Δt + 2⟨X_k, h⟩ΔW_k]`
///
/// with `⟨X, AX⟩ = −νΣn²X_n²`, `g = (b₁+k₁)X^ρ + e^{−kt}p`, `h = (b₂+k₂)X^τ`
/// at `t_k`. Delayed states are rebuilt by replaying the trace into a fresh history.
pub fn energy_residual(path: &PathRecord, m: &HeatModelSpec) -> Result<EnergyResidual> {
    let trace = path.trace.as_ref().ok_or(Error::StateNotRetained)?;
    let dt = trace.dt;
    let n_modes = trace.n_modes;
    let mut hist = HistoryBuffer::from_initial_segment(m, dt);
    let mut x_rho = vec![0.0; n_modes];
    let mut x_tau = vec![0.0; n_modes];
    let mut per_step = Vec::with_capacity(trace.n_steps());
    for k in 0..trace.n_steps() {
        let t = k as f64 * dt;
        let x = trace.state(k);
        let x_next = trace.state(k + 1);
        hist.lookup_into(t - m.rho.eval(t)?, &mut x_rho)?;
        hist.lookup_into(t - m.tau.eval(t)?, &mut x_tau)?;
        let drift_gain = m.b1 + m.k1.eval(t)?;
        let noise_gain = m.b2 + m.k2.eval(t)?;
        let forcing = (-m.k * t).exp();
        let mut pairing = 0.0;
        let mut h_sq = 0.0;
        let mut x_h = 0.0;
        for i in 0..n_modes {
            let n2 = ((i + 1) * (i + 1)) as f64;
            let p = m.p_coeffs.get(i).copied().unwrap_or(0.0);
            let ax = -m.nu * n2 * x[i];
            let g = drift_gain * x_rho[i] + forcing * p;
            let h = noise_gain * x_tau[i];
            pairing += x[i] * (ax + g);
            h_sq += h * h;
            x_h += x[i] * h;
        }
        let dw = trace.increments[k];
        let predicted = 2.0 * pairing * dt + h_sq * dt + 2.0 * x_h * dw;
        per_step.push(l2_energy(x_next) - l2_energy(x) - predicted);
        hist.push(x_next);
    }
    let rms = if per_step.is_empty() {
        0.0
    } else {
        (per_step.iter().map(|r| r * r).sum::<f64>() / per_step.len() as f64).sqrt()
    };
    let cumulative = per_step.iter().sum::<f64>().abs();
    Ok(EnergyResidual {
        per_step,
        rms,
        cumulative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementLevel {
    pub dt: f64,
    /// Per-step RMS residual averaged over paths.
    pub mean_rms: f64,
    /// Accumulated defect averaged over paths.
    pub mean_cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub levels: Vec<RefinementLevel>,
    /// `mean_rms(dt) / mean_rms(dt/2)` for consecutive levels.
    pub ratios: Vec<f64>,
    pub n_paths: usize,
}

impl RefinementStudy {
    pub fn check(&self) -> CheckRecord {
        let worst = self.ratios.iter().copied().fold(f64::INFINITY, f64::min);
        CheckRecord {
            name: "energy_refinement".into(),
            pass: !self.ratios.is_empty() && worst >= ENERGY_HALVING_RATIO,
            measured: worst,
            bound: ENERGY_HALVING_RATIO,
            slack: worst - ENERGY_HALVING_RATIO,
            detail: format!(
                "{} levels from dt = {:e}, {} paths, ratios {:?}",
                self.levels.len(),
                self.levels.first().map_or(f64::NAN, |l| l.dt),
                self.n_paths,
                self.ratios
            ),
        }
    }
}

/// Energy-identity residuals on `n_levels` dyadic refinements of `cfg.dt`.
/// Each path's Brownian increments are drawn once on the finest grid and
/// summed for coarser levels, so every level sees the same path.
pub fn energy_refinement_study(
    m: &HeatModelSpec,
    cfg: &SimConfig,
    n_levels: u32,
    n_paths: usize,
) -> Result<RefinementStudy> {
    if n_levels < 2 || n_paths == 0 {
        return Err(Error::InvalidConfig(
            "refinement study needs at least 2 levels and 1 path".into(),
        ));
    }
    let finest_factor = 1usize << (n_levels - 1);
    let finest_dt = cfg.dt / finest_factor as f64;
    let finest_steps = cfg.n_steps() * finest_factor;
    let mut levels: Vec<RefinementLevel> = (0..n_levels)
        .map(|l| RefinementLevel {
            dt: cfg.dt / f64::from(1u32 << l),
            mean_rms: 0.0,
            mean_cumulative: 0.0,
        })
        .collect();
    for path in 0..n_paths as u64 {
        let fine = brownian_increments(cfg.master_seed, path, finest_steps, finest_dt);
        for (l, level) in levels.iter_mut().enumerate() {
            let level_cfg = SimConfig {
                dt: level.dt,
                output_stride: 1 << l,
                retain_states: true,
                ..cfg.clone()
            };
            let incs = coarsen_increments(&fine, finest_factor >> l);
            let rec = simulate_path_with_increments(m, &level_cfg, &incs)?;
            let res = energy_residual(&rec, m)?;
            level.mean_rms += res.rms / n_paths as f64;
            level.mean_cumulative += res.cumulative / n_paths as f64;
        }
    }
    let ratios = levels
        .windows(2)
        .map(|w| w[0].mean_rms / w[1].mean_rms)
        .collect();
    Ok(RefinementStudy {
        levels,
        ratios,
        n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{build_as_certificate, build_certificate, CertificateOptions};
    use crate::model::{map_heat_to_problem, InitialSegment};
    use crate::simulate::{simulate_path, SimConfig};

    fn synthetic(b: f64, sigma: f64, n: usize, horizon: f64) -> MSCurve {
        let times: Vec<f64> = (0..n)
            .map(|j| horizon * j as f64 / (n - 1) as f64)
            .collect();
        MSCurve {
            mean: times.iter().map(|t| b * (-sigma * t).exp()).collect(),
            ci_half: vec![0.0; n],
            times,
            n_paths: 2,
        }
    }

    fn cert(b: f64, sigma: f64, m: f64) -> Certificate {
        Certificate {
            gamma1: 0.1,
            gamma2: 1.0,
            sigma,
            a: 1.0,
            r1: 0.0,
            r2: 0.0,
            r3: 0.0,
            m,
            b,
            constraint_slack: 0.1,
            notes: vec![],
        }
    }

    #[test]
    fn exact_exponential_fit() {
        let c = synthetic(2.5, 0.7, 200, 10.0);
        let fit = fit_decay_rate(&c, 0.5).unwrap();
        assert!((fit.sigma_hat - 0.7).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
        assert!((fit.intercept - 2.5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn zero_curve_fit_is_infinite() {
        let mut c = synthetic(1.0, 1.0, 50, 5.0);
        c.mean.iter_mut().for_each(|m| *m = 0.0);
        assert_eq!(fit_decay_rate(&c, 0.5).unwrap().sigma_hat, f64::INFINITY);
        c.mean[49] = 1e-3;
        assert!(matches!(
            fit_decay_rate(&c, 0.5),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn too_few_points() {
        let c = synthetic(1.0, 1.0, 12, 5.0);
        assert!(fit_decay_rate(&c, 0.5).is_err());
    }

    #[test]
    fn ms_bound_boundary_and_zero() {
        let c = cert(3.0, 0.4, 2.0);
        let on_bound = synthetic(3.0, 0.4, 100, 10.0);
        let rec = check_ms_bound(&on_bound, &c, 3.0);
        assert!(rec.pass);
        assert_eq!(rec.slack, 0.0);
        let mut zero = on_bound.clone();
        zero.mean.iter_mut().for_each(|m| *m = 0.0);
        let rec = check_ms_bound(&zero, &c, 3.0);
        assert!(rec.pass);
        assert_eq!(rec.slack, f64::INFINITY);
        let above = synthetic(3.1, 0.4, 100, 10.0);
        assert!(!check_ms_bound(&above, &c, 3.0).pass);
    }

    #[test]
    fn k_functional_boundary() {
        let m = HeatModelSpec::new(1.0, 0.0, 0.0, 1.0, 4);
        let p = map_heat_to_problem(&m).unwrap();
        let c = cert(2.0, 0.5, 2.0);
        let curve = synthetic(2.0, 0.5, 400, 8.0);
        let rec = check_k_functional(&curve, &c, &p, 3.0);
        assert!(rec.pass);
        assert!((rec.measured - 2.0).abs() < 1e-9 * 2.0);
        let over = synthetic(2.1, 0.5, 400, 8.0);
        assert!(!check_k_functional(&over, &c, &p, 3.0).pass);
    }

    #[test]
    fn as_decay_zero_paths_and_short_horizon() {
        let m = HeatModelSpec::new(5.0, 1.0, 1.0, 1.0, 8);
        let p = map_heat_to_problem(&m).unwrap();
        let c = build_certificate(&p, &CertificateOptions::default()).unwrap();
        let asc = build_as_certificate(&p, &c).unwrap();
        let sups = vec![vec![0.0; 10]; 50];
        let out = check_as_decay(&sups, &c, &asc, 2);
        assert!(out.record.pass);
        assert!(out.last_violation.iter().all(Option::is_none));
        // interval_coeff ≥ 2B > 1, so N0 = 2 is vacuous here
        assert!(out.intervals[0].vacuous);
        let short = check_as_decay(&vec![vec![0.0; 3]; 5], &c, &asc, 2);
        assert!(!short.record.pass);
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 200);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.02);
        let (lo, hi) = wilson_interval(100, 200);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn residual_needs_trace() {
        let m = HeatModelSpec::new(1.0, 0.0, 0.0, 1.0, 4);
        let cfg = SimConfig {
            dt: 1.0 / 64.0,
            horizon: 1.0,
            ..Default::default()
        };
        let p = simulate_path(&m, &cfg, 0).unwrap();
        assert!(matches!(
            energy_residual(&p, &m),
            Err(Error::StateNotRetained)
        ));
    }

    #[test]
    fn residual_zero_path_and_euler_square() {
        let mut m = HeatModelSpec::new(1.0, 0.0, 0.0, 1.0, 3);
        let cfg = SimConfig {
            dt: 1.0 / 64.0,
            horizon: 1.0,
            retain_states: true,
            ..Default::default()
        };
        m.phi = InitialSegment::Constant(vec![]);
        let zero = simulate_path(&m, &cfg, 0).unwrap();
        assert!(energy_residual(&zero, &m)
            .unwrap()
            .per_step
            .iter()
            .all(|r| *r == 0.0));

        // deterministic heat: the defect is exactly |AX|²Δt² per step
        m.phi = InitialSegment::Constant(vec![1.0, 0.3, -0.2]);
        let path = simulate_path(&m, &cfg, 0).unwrap();
        let res = energy_residual(&path, &m).unwrap();
        let trace = path.trace.as_ref().unwrap();
        for (k, r) in res.per_step.iter().enumerate() {
            let x = trace.state(k);
            let ax_sq: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| (((i + 1) * (i + 1)) as f64 * v).powi(2))
                .sum();
            assert!((r - ax_sq * cfg.dt * cfg.dt).abs() < 1e-14);
        }
    }
}
