use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_b5, Certificate};
use crate::model::{validate_problem, HeatModelSpec, ProblemSpec, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotEvaluated,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisRecord {
    pub condition: &'static str,
    pub status: Status,
    pub slack: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub records: Vec<HypothesisRecord>,
}

impl HypothesisReport {
    pub fn get(&self, condition: &str) -> Option<&HypothesisRecord> {
        self.records.iter().find(|r| r.condition == condition)
    }

    /// True when no record failed (unevaluated records are ignored).
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }
}

/// Samples random spectral pairs `(u, v)` and returns the smallest relative
/// slack of `−2⟨A(u−v), u−v⟩ + α₁|u−v|² − δ₁‖u−v‖²` for the truncated heat
/// operator, with `α₁ = 0` and `δ₁ = 2ν`. The linear operator meets the bound
/// with equality, so the result is zero up to rounding.
pub fn heat_coercivity_spot_check(m: &HeatModelSpec, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.n_modes;
    let delta1 = 2.0 * m.nu;
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let diff: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-1.0..1.0) - rng.random_range(-1.0..1.0))
            .collect();
        let a_diff: Vec<f64> = diff
            .iter()
            .enumerate()
            .map(|(i, d)| -m.nu * ((i + 1) * (i + 1)) as f64 * d)
            .collect();
        let pairing: f64 = a_diff.iter().zip(&diff).map(|(x, y)| x * y).sum();
        let energy: f64 = diff
            .iter()
            .enumerate()
            .map(|(i, d)| ((i + 1) * (i + 1)) as f64 * d * d)
            .sum();
        if energy == 0.0 {
            continue;
        }
        let lhs = -2.0 * pairing - delta1 * energy;
        worst = worst.min(lhs / (delta1 * energy));
    }
    worst
}

const COERCIVITY_TOL: f64 = 1e-12;

/// Evaluates (B1)–(B6) as far as the envelope representation decides them.
/// (B6) needs a certificate for `σ`; with `heat` given, (B1) is also
/// spot-checked on the truncated operator.
pub fn check_hypotheses(
    p: &ProblemSpec,
    cert: Option<&Certificate>,
    heat: Option<&HeatModelSpec>,
) -> HypothesisReport {
    let validation: ValidationReport = validate_problem(p);
    let mut records = Vec::with_capacity(6);

    let att = p.attestations;
    let attested = att.measurable && att.hemicontinuous && att.bounded;
    let mut b1_ok = validation.condition_passed("B1") && attested;
    let mut b1_slack = None;
    let mut note = format!(
        "measurability/hemicontinuity/boundedness of A attested: {}",
        if attested { "yes" } else { "no" }
    );
    if let Some(m) = heat {
        let worst = heat_coercivity_spot_check(m, 256, 0x5eed);
        b1_ok &= worst >= -COERCIVITY_TOL;
        b1_slack = Some(worst);
        note.push_str("; coercivity spot-checked on 256 random spectral pairs");
    }
    records.push(HypothesisRecord {
        condition: "B1",
        status: Status::from_bool(b1_ok),
        slack: b1_slack,
        note,
    });

    for (cond, what) in [
        ("B2", "drift memory growth envelope"),
        ("B3", "diffusion memory growth envelope"),
        ("B4", "exponentially weighted integrability"),
    ] {
        let failed: Vec<_> = validation
            .failures()
            .filter(|i| i.condition == cond)
            .map(|i| i.name.clone())
            .collect();
        records.push(HypothesisRecord {
            condition: cond,
            status: Status::from_bool(failed.is_empty()),
            slack: None,
            note: if failed.is_empty() {
                what.to_owned()
            } else {
                format!("{what}: failed {}", failed.join(", "))
            },
        });
    }

    let b5 = check_b5(p.lambda1, p.delta1, p.g_env.delta, p.h_env.delta);
    records.push(HypothesisRecord {
        condition: "B5",
        status: Status::from_bool(b5.pass),
        slack: Some(b5.slack),
        note: "delta1*lambda1 - 2*sqrt(delta2) - delta3".to_owned(),
    });

    let b6 = match cert {
        None => HypothesisRecord {
            condition: "B6",
            status: Status::NotEvaluated,
            slack: None,
            note: "needs a certificate to fix sigma".to_owned(),
        },
        Some(c) => {
            let ok = [&p.f_env, &p.g_env.beta, &p.h_env.beta]
                .iter()
                .all(|f| f.is_weighted_bounded(c.sigma))
                && [&p.alpha1, &p.g_env.alpha, &p.h_env.alpha]
                    .iter()
                    .all(|f| f.is_bounded());
            HypothesisRecord {
                condition: "B6",
                status: Status::from_bool(ok),
                slack: None,
                note: format!(
                    "alpha_i and e^(sigma t) beta_i bounded at sigma = {}",
                    c.sigma
                ),
            }
        }
    };
    records.push(b6);
    HypothesisReport { records }
}
