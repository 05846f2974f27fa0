use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayKind {
    Constant(f64),
    /// `t ↦ 1/(1 + |sin t|)`, valued in `[1/2, 1]`.
    InvOnePlusAbsSin,
    /// `t ↦ 1/(1 + |cos t|)`, valued in `[1/2, 1]`.
    InvOnePlusAbsCos,
    /// Linear interpolation of `(time, lag)` nodes starting at 0; the last lag is held afterwards.
    Table {
        times: Vec<f64>,
        lags: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDelay {
    r: f64,
    kind: DelayKind,
}

/// A time-varying lag bounded by the memory horizon `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDelay", into = "RawDelay")]
pub struct DelaySpec {
    r: f64,
    kind: DelayKind,
}

impl TryFrom<RawDelay> for DelaySpec {
    type Error = Error;
    fn try_from(raw: RawDelay) -> Result<Self> {
        Self::new(raw.r, raw.kind)
    }
}

impl From<DelaySpec> for RawDelay {
    fn from(d: DelaySpec) -> Self {
        RawDelay {
            r: d.r,
            kind: d.kind,
        }
    }
}

impl DelaySpec {
    pub fn new(r: f64, kind: DelayKind) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidDelay(format!(
                "horizon r={r} must be nonnegative"
            )));
        }
        let in_range = |lag: f64| lag.is_finite() && (0.0..=r).contains(&lag);
        match &kind {
            DelayKind::Constant(c) if !in_range(*c) => {
                return Err(Error::InvalidDelay(format!(
                    "constant lag {c} outside [0, {r}]"
                )));
            }
            DelayKind::InvOnePlusAbsSin | DelayKind::InvOnePlusAbsCos if r < 1.0 => {
                return Err(Error::InvalidDelay(format!(
                    "lag reaches 1 but horizon is r={r}"
                )));
            }
            DelayKind::Table { times, lags } => {
                if times.len() != lags.len() || times.is_empty() {
                    return Err(Error::InvalidDelay(
                        "table times/lags length mismatch".into(),
                    ));
                }
                if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidDelay(
                        "table grid must start at 0 and increase strictly".into(),
                    ));
                }
                if let Some(bad) = lags.iter().find(|l| !in_range(**l)) {
                    return Err(Error::InvalidDelay(format!(
                        "table lag {bad} outside [0, {r}]"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { r, kind })
    }

    pub fn inv_one_plus_abs_sin() -> Self {
        Self {
            r: 1.0,
            kind: DelayKind::InvOnePlusAbsSin,
        }
    }

    pub fn inv_one_plus_abs_cos() -> Self {
        Self {
            r: 1.0,
            kind: DelayKind::InvOnePlusAbsCos,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn kind(&self) -> &DelayKind {
        &self.kind
    }

    /// Lag at time `t ≥ 0`; always within `[0, r]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.lag(t))
    }

    pub(crate) fn lag(&self, t: f64) -> f64 {
        match &self.kind {
            DelayKind::Constant(c) => *c,
            DelayKind::InvOnePlusAbsSin => 1.0 / (1.0 + t.sin().abs()),
            DelayKind::InvOnePlusAbsCos => 1.0 / (1.0 + t.cos().abs()),
            DelayKind::Table { times, lags } => {
                let idx = times.partition_point(|&x| x <= t);
                let i = idx - 1;
                if times[i] == t || i + 1 == times.len() {
                    return lags[i];
                }
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                lags[i] + w * (lags[i + 1] - lags[i])
            }
        }
    }
}
