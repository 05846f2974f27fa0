//! CSV and JSON artifacts. Floats are written with 17 significant digits so
//! that reading them back reproduces the same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use memstab::certificate::Certificate;
use memstab::simulate::MSCurve;
use serde::Serialize;

use crate::CliError;

pub const CURVE_HEADER: &str = "t,mean_sq,ci_half,cert_bound";
pub const PATHS_HEADER: &str = "path,N,interval_sup,threshold,violated";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    write_text(path, &text)
}

pub fn curve_csv(curve: &MSCurve, cert: Option<&Certificate>) -> String {
    let mut out = String::with_capacity(80 * (curve.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for j in 0..curve.len() {
        let t = curve.times[j];
        let bound = cert.map_or(f64::NAN, |c| c.ms_bound(t));
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(t),
            fmt_f64(curve.mean[j]),
            fmt_f64(curve.ci_half[j]),
            fmt_f64(bound)
        );
    }
    out
}

/// One row per path and unit interval; thresholds are `e^{−σN/2}`.
pub fn paths_csv(interval_sups: &[Vec<f64>], cert: Option<&Certificate>) -> String {
    let mut out = String::new();
    out.push_str(PATHS_HEADER);
    out.push('\n');
    for (path, sups) in interval_sups.iter().enumerate() {
        for (n, sup) in sups.iter().enumerate() {
            let threshold = cert.map_or(f64::NAN, |c| (-0.5 * c.sigma * n as f64).exp());
            let violated = u8::from(*sup > threshold);
            let _ = writeln!(
                out,
                "{path},{n},{},{},{violated}",
                fmt_f64(*sup),
                fmt_f64(threshold)
            );
        }
    }
    out
}

pub fn write_curve(
    path: &Path,
    curve: &MSCurve,
    cert: Option<&Certificate>,
) -> Result<(), CliError> {
    write_text(path, &curve_csv(curve, cert))
}

pub fn write_paths(
    path: &Path,
    sups: &[Vec<f64>],
    cert: Option<&Certificate>,
) -> Result<(), CliError> {
    write_text(path, &paths_csv(sups, cert))
}

fn rows<'a>(
    path: &'a Path,
    text: &'a str,
    header: &str,
) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)> + 'a, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(CliError::Artifact {
            path: path.to_path_buf(),
            message: format!("expected header {header:?}"),
        });
    }
    Ok(lines
        .enumerate()
        .map(|(i, l)| (i + 2, l.split(',').collect())))
}

fn field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    cols: &[&str],
    i: usize,
) -> Result<T, CliError> {
    cols.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Artifact {
            path: path.to_path_buf(),
            message: format!("line {line}: bad or missing column {}", i + 1),
        })
}

pub fn read_curve(path: &Path, n_paths: usize) -> Result<MSCurve, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut curve = MSCurve {
        times: Vec::new(),
        mean: Vec::new(),
        ci_half: Vec::new(),
        n_paths,
    };
    for (line, cols) in rows(path, &text, CURVE_HEADER)? {
        curve.times.push(field(path, line, &cols, 0)?);
        curve.mean.push(field(path, line, &cols, 1)?);
        curve.ci_half.push(field(path, line, &cols, 2)?);
    }
    Ok(curve)
}

pub fn read_paths(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut sups: Vec<Vec<f64>> = Vec::new();
    for (line, cols) in rows(path, &text, PATHS_HEADER)? {
        let p: usize = field(path, line, &cols, 0)?;
        let n: usize = field(path, line, &cols, 1)?;
        let sup: f64 = field(path, line, &cols, 2)?;
        if p == sups.len() {
            sups.push(Vec::new());
        }
        if p + 1 != sups.len() || n != sups[p].len() {
            return Err(CliError::Artifact {
                path: path.to_path_buf(),
                message: format!("line {line}: rows out of order"),
            });
        }
        sups[p].push(sup);
    }
    Ok(sups)
}
