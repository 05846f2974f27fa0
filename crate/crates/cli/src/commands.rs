use std::path::Path;

use memstab::certificate::{
    build_as_certificate, build_certificate, check_hypotheses, ASCertificate, Certificate,
    CertificateDocument, HypothesisReport,
};
use memstab::model::{map_heat_to_problem, ProblemSpec};
use memstab::simulate::{run_monte_carlo, MSCurve};
use memstab::verify::{
    check_as_decay, check_decay_rate, check_k_functional, check_ms_bound, energy_refinement_study,
    fit_decay_rate, CheckRecord, DecayFit, IntervalStat, VerificationReport,
};
use memstab::Error;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{read_curve, read_paths, write_curve, write_json, write_paths};
use crate::CliError;

pub const CERTIFICATE_FILE: &str = "certificate.json";
pub const CURVE_FILE: &str = "curve.csv";
pub const PATHS_FILE: &str = "paths_summary.csv";
pub const REPORT_FILE: &str = "report.json";
pub const ENERGY_FILE: &str = "energy.json";

/// Levels and path count of the `energy-check` refinement study.
pub const ENERGY_LEVELS: u32 = 4;
pub const ENERGY_MAX_PATHS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    CheckFailed,
    Infeasible,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::CheckFailed => 1,
            Self::Infeasible => 2,
        }
    }
}

pub struct Certified {
    pub problem: ProblemSpec,
    pub cert: Certificate,
    pub asc: ASCertificate,
    pub hypotheses: HypothesisReport,
}

pub enum Certification {
    Feasible(Box<Certified>),
    Infeasible {
        reason: String,
        hypotheses: Option<HypothesisReport>,
    },
}

#[derive(Serialize)]
struct InfeasibleReport<'a> {
    status: &'static str,
    reason: &'a str,
    hypotheses: Option<&'a HypothesisReport>,
}

#[derive(Serialize)]
struct Report<'a> {
    status: &'static str,
    certificate: CertificateDocument,
    notes: &'a [String],
    hypotheses: &'a HypothesisReport,
    decay_fit: Option<DecayFit>,
    checks: &'a [CheckRecord],
    as_intervals: &'a [IntervalStat],
    last_violation: &'a [Option<u32>],
}

pub fn certify_model(cfg: &RunConfig) -> Result<Certification, CliError> {
    let model = cfg.model.to_model();
    let problem = map_heat_to_problem(&model).map_err(|e| CliError::Invalid {
        key: "model".into(),
        message: e.to_string(),
    })?;
    let cert = match build_certificate(&problem, &cfg.certificate) {
        Ok(c) => c,
        Err(e @ (Error::Infeasible(_) | Error::InvalidProblem(_))) => {
            return Ok(Certification::Infeasible {
                reason: e.to_string(),
                hypotheses: Some(check_hypotheses(&problem, None, Some(&model))),
            })
        }
        Err(e) => return Err(CliError::Core(e)),
    };
    let hypotheses = check_hypotheses(&problem, Some(&cert), Some(&model));
    match build_as_certificate(&problem, &cert) {
        Ok(asc) => Ok(Certification::Feasible(Box::new(Certified {
            problem,
            cert,
            asc,
            hypotheses,
        }))),
        Err(e) => Ok(Certification::Infeasible {
            reason: e.to_string(),
            hypotheses: Some(hypotheses),
        }),
    }
}

fn report_infeasible(
    out: &Path,
    reason: &str,
    hypotheses: Option<&HypothesisReport>,
) -> Result<Outcome, CliError> {
    println!("infeasible: {reason}");
    if let Some(h) = hypotheses {
        print_hypotheses(h);
    }
    write_json(
        &out.join(REPORT_FILE),
        &InfeasibleReport {
            status: "infeasible",
            reason,
            hypotheses,
        },
    )?;
    Ok(Outcome::Infeasible)
}

fn print_hypotheses(h: &HypothesisReport) {
    for r in &h.records {
        let slack = r.slack.map_or(String::new(), |s| format!(" slack={s:.6e}"));
        println!("  {:<4} {:?}{slack} {}", r.condition, r.status, r.note);
    }
}

fn print_certificate(c: &Certified) {
    let doc = CertificateDocument::new(&c.cert, Some(&c.asc));
    println!(
        "certified: E|X(t)|^2 <= {:.6} exp(-{:.6} t)  (gamma1={:.6}, gamma2={:.6}, slack={:.3e})",
        doc.b, doc.sigma, doc.gamma1, doc.gamma2, doc.constraint_slack
    );
    println!(
        "almost surely: |X(t)|^2 <= exp(sigma/2) exp(-{:.6} t) eventually  (B1={:.6})",
        c.asc.as_rate, c.asc.b1
    );
    for note in &c.cert.notes {
        println!("  note: {note}");
    }
}

pub fn certify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = &cfg.output_dir;
    match certify_model(cfg)? {
        Certification::Infeasible { reason, hypotheses } => {
            report_infeasible(out, &reason, hypotheses.as_ref())
        }
        Certification::Feasible(c) => {
            print_certificate(&c);
            print_hypotheses(&c.hypotheses);
            write_json(
                &out.join(CERTIFICATE_FILE),
                &CertificateDocument::new(&c.cert, Some(&c.asc)),
            )?;
            Ok(Outcome::Pass)
        }
    }
}

/// Runs the Monte Carlo study and writes the curve and per-interval suprema.
/// Infeasible models are still simulated; their bound columns hold NaN.
pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = &cfg.output_dir;
    let cert = match certify_model(cfg)? {
        Certification::Feasible(c) => {
            write_json(
                &out.join(CERTIFICATE_FILE),
                &CertificateDocument::new(&c.cert, Some(&c.asc)),
            )?;
            Some(c.cert)
        }
        Certification::Infeasible { reason, .. } => {
            println!("no certificate ({reason}); simulating anyway");
            None
        }
    };
    let (curve, sups) = run_study(cfg)?;
    write_curve(&out.join(CURVE_FILE), &curve, cert.as_ref())?;
    write_paths(&out.join(PATHS_FILE), &sups, cert.as_ref())?;
    if let (Some(first), Some(last)) = (curve.mean.first(), curve.mean.last()) {
        println!(
            "{} paths, mean-square {:.6e} at t=0 and {:.6e} at t={}",
            curve.n_paths,
            first,
            last,
            curve.times.last().copied().unwrap_or(0.0)
        );
    }
    Ok(Outcome::Pass)
}

fn run_study(cfg: &RunConfig) -> Result<(MSCurve, Vec<Vec<f64>>), CliError> {
    let mc = run_monte_carlo(&cfg.model.to_model(), &cfg.sim).map_err(CliError::Core)?;
    Ok((mc.curve, mc.interval_sups))
}

/// Certifies, obtains Monte Carlo data (fresh or from a previous `simulate`
/// in the same output directory) and runs every check.
pub fn verify(cfg: &RunConfig, reuse: bool) -> Result<Outcome, CliError> {
    let out = &cfg.output_dir;
    let c = match certify_model(cfg)? {
        Certification::Infeasible { reason, hypotheses } => {
            return report_infeasible(out, &reason, hypotheses.as_ref())
        }
        Certification::Feasible(c) => c,
    };
    print_certificate(&c);
    let doc = CertificateDocument::new(&c.cert, Some(&c.asc));
    write_json(&out.join(CERTIFICATE_FILE), &doc)?;

    let (curve, sups) = if reuse {
        let sups = read_paths(&out.join(PATHS_FILE))?;
        (read_curve(&out.join(CURVE_FILE), sups.len())?, sups)
    } else {
        let (curve, sups) = run_study(cfg)?;
        write_curve(&out.join(CURVE_FILE), &curve, Some(&c.cert))?;
        write_paths(&out.join(PATHS_FILE), &sups, Some(&c.cert))?;
        (curve, sups)
    };

    let v = &cfg.verify;
    let mut report = VerificationReport::default();
    report.push(check_ms_bound(&curve, &c.cert, v.ci_mult));
    let fit = match fit_decay_rate(&curve, v.window_fraction) {
        Ok(fit) => {
            report.push(check_decay_rate(&fit, &c.cert, v.min_rate_ratio));
            Some(fit)
        }
        Err(e) => {
            report.push(CheckRecord {
                name: "decay_rate".into(),
                pass: false,
                measured: f64::NAN,
                bound: v.min_rate_ratio * c.cert.sigma,
                slack: f64::NAN,
                detail: e.to_string(),
            });
            None
        }
    };
    report.push(check_k_functional(&curve, &c.cert, &c.problem, v.ci_mult));
    let as_out = check_as_decay(&sups, &c.cert, &c.asc, v.n0);
    report.push(as_out.record.clone());

    println!("{}", report.summary());
    let pass = report.passed();
    write_json(
        &out.join(REPORT_FILE),
        &Report {
            status: if pass { "pass" } else { "fail" },
            certificate: doc,
            notes: &c.cert.notes,
            hypotheses: &c.hypotheses,
            decay_fit: fit,
            checks: &report.checks,
            as_intervals: &as_out.intervals,
            last_violation: &as_out.last_violation,
        },
    )?;
    Ok(if pass {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

/// Energy-identity refinement study on `ENERGY_LEVELS` halvings of `sim.dt`.
pub fn energy_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n_paths = cfg.sim.n_paths.min(ENERGY_MAX_PATHS);
    let study = energy_refinement_study(&cfg.model.to_model(), &cfg.sim, ENERGY_LEVELS, n_paths)
        .map_err(CliError::Core)?;
    for l in &study.levels {
        println!(
            "dt={:.6e}  rms={:.6e}  cumulative={:.6e}",
            l.dt, l.mean_rms, l.mean_cumulative
        );
    }
    let check = study.check();
    let mut report = VerificationReport::default();
    report.push(check.clone());
    println!("{}", report.summary());
    #[derive(Serialize)]
    struct EnergyReport<'a> {
        study: &'a memstab::verify::RefinementStudy,
        check: &'a CheckRecord,
    }
    write_json(
        &cfg.output_dir.join(ENERGY_FILE),
        &EnergyReport {
            study: &study,
            check: &check,
        },
    )?;
    Ok(if check.pass {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}
