//! Nonnegative scalar envelopes of time.
//!
//! Two representations are supported, both chosen so that integrability and
//! boundedness questions are decidable from the data alone:
//!
//! * exponential polynomials `t ↦ Σ c_j e^{-q_j t}` with `c_j, q_j ≥ 0`;
//! * sampled tables on `[0, T_s]`, linearly interpolated and zero past `T_s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One term `c e^{-q t}` of an exponential polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTerm {
    pub coeff: f64,
    pub rate: f64,
}

impl ExpTerm {
    fn is_active(&self) -> bool {
        self.coeff > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum Repr {
    ExpPoly(Vec<ExpTerm>),
    Table { times: Vec<f64>, values: Vec<f64> },
}

/// Which representation a [`TimeFunction`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeFunctionKind {
    ExpPoly,
    Table,
}

/// A nonnegative function of time from a restricted family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Repr", into = "Repr")]
pub struct TimeFunction(Repr);

impl TryFrom<Repr> for TimeFunction {
    type Error = Error;

    fn try_from(repr: Repr) -> Result<Self> {
        match repr {
            Repr::ExpPoly(terms) => Self::exp_poly(terms.into_iter().map(|t| (t.coeff, t.rate))),
            Repr::Table { times, values } => Self::table(times, values),
        }
    }
}

impl From<TimeFunction> for Repr {
    fn from(f: TimeFunction) -> Self {
        f.0
    }
}

impl Default for TimeFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl TimeFunction {
    pub fn zero() -> Self {
        Self(Repr::ExpPoly(Vec::new()))
    }

    /// `t ↦ c`. Not integrable unless `c == 0`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::exp_poly([(c, 0.0)])
    }

    /// `t ↦ c e^{-q t}`.
    pub fn exp(coeff: f64, rate: f64) -> Result<Self> {
        Self::exp_poly([(coeff, rate)])
    }

    /// Builds `Σ c_j e^{-q_j t}` from `(c_j, q_j)` pairs.
    pub fn exp_poly<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut out = Vec::new();
        for (coeff, rate) in terms {
            if !(coeff.is_finite() && coeff >= 0.0) {
                return Err(Error::InvalidTimeFunction(format!(
                    "coefficient {coeff} must be finite and nonnegative"
                )));
            }
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::InvalidTimeFunction(format!(
                    "rate {rate} must be finite and nonnegative"
                )));
            }
            out.push(ExpTerm { coeff, rate });
        }
        Ok(Self(Repr::ExpPoly(out)))
    }

    /// Builds a sampled envelope. The grid must start at 0 and increase strictly.
    pub fn table(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidTimeFunction(format!(
                "table has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidTimeFunction(
                "table needs at least two nodes".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidTimeFunction(format!(
                "table grid must start at 0, starts at {}",
                times[0]
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeFunction(
                "table grid must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidTimeFunction(
                "table values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self(Repr::Table { times, values }))
    }

    pub fn kind(&self) -> TimeFunctionKind {
        match self.0 {
            Repr::ExpPoly(_) => TimeFunctionKind::ExpPoly,
            Repr::Table { .. } => TimeFunctionKind::Table,
        }
    }

    /// Terms of an exponential polynomial; empty for tables.
    pub fn exp_terms(&self) -> &[ExpTerm] {
        match &self.0 {
            Repr::ExpPoly(terms) => terms,
            Repr::Table { .. } => &[],
        }
    }

    /// End of the support of a table, `None` for exponential polynomials.
    pub fn support_end(&self) -> Option<f64> {
        match &self.0 {
            Repr::ExpPoly(_) => None,
            Repr::Table { times, .. } => times.last().copied(),
        }
    }

    /// Table nodes, if any.
    pub fn table_nodes(&self) -> Option<(&[f64], &[f64])> {
        match &self.0 {
            Repr::ExpPoly(_) => None,
            Repr::Table { times, values } => Some((times, values)),
        }
    }

    /// Decay rates of the terms with a positive coefficient.
    pub fn active_rates(&self) -> impl Iterator<Item = f64> + '_ {
        self.exp_terms()
            .iter()
            .filter(|t| t.is_active())
            .map(|t| t.rate)
    }

    /// True when the function vanishes identically.
    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::ExpPoly(terms) => terms.iter().all(|t| !t.is_active()),
            Repr::Table { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// Evaluates the function at `t ≥ 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.value(t))
    }

    /// Evaluation without the sign check on `t`; callers guarantee `t ≥ 0`.
    pub(crate) fn value(&self, t: f64) -> f64 {
        match &self.0 {
            Repr::ExpPoly(terms) => terms.iter().map(|e| e.coeff * (-e.rate * t).exp()).sum(),
            Repr::Table { times, values } => interpolate(times, values, t),
        }
    }

    /// `∫₀^∞ f < ∞`.
    pub fn is_integrable(&self) -> bool {
        self.is_weighted_integrable(0.0)
    }

    /// `∫₀^∞ e^{w t} f(t) dt < ∞`: every active term needs `q_j > w`; tables always pass.
    pub fn is_weighted_integrable(&self, weight_rate: f64) -> bool {
        self.active_rates().all(|q| q > weight_rate)
    }

    /// `sup_t e^{w t} f(t) < ∞`: every active term needs `q_j ≥ w`; tables always pass.
    pub fn is_weighted_bounded(&self, weight_rate: f64) -> bool {
        self.active_rates().all(|q| q >= weight_rate)
    }

    /// Both representations are bounded on `[0, ∞)`.
    pub fn is_bounded(&self) -> bool {
        true
    }

    /// Exponential polynomials with nonnegative rates are nonincreasing; tables
    /// are checked node by node (the drop to zero past the support is a decrease).
    pub fn is_nonincreasing(&self) -> bool {
        match &self.0 {
            Repr::ExpPoly(_) => true,
            Repr::Table { values, .. } => values.windows(2).all(|w| w[1] <= w[0]),
        }
    }

    /// `∫₀^∞ e^{w t} f(t) dt`, closed form for exponential polynomials and exact
    /// per-panel exponential weighting for tables.
    pub fn integrate(&self, weight_rate: f64) -> Result<f64> {
        match &self.0 {
            Repr::ExpPoly(terms) => {
                let mut total = 0.0;
                for term in terms.iter().filter(|t| t.is_active()) {
                    if term.rate <= weight_rate {
                        return Err(Error::DivergentIntegral {
                            rate: term.rate,
                            weight_rate,
                        });
                    }
                    total += term.coeff / (term.rate - weight_rate);
                }
                Ok(total)
            }
            Repr::Table { times, values } => Ok(times
                .windows(2)
                .zip(values.windows(2))
                .map(|(t, v)| weighted_linear_panel(t[0], t[1], v[0], v[1], weight_rate))
                .sum()),
        }
    }

    /// `c · f` for `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidTimeFunction(format!(
                "scale {c} must be nonnegative"
            )));
        }
        Ok(match &self.0 {
            Repr::ExpPoly(terms) => Self(Repr::ExpPoly(
                terms
                    .iter()
                    .map(|t| ExpTerm {
                        coeff: c * t.coeff,
                        rate: t.rate,
                    })
                    .collect(),
            )),
            Repr::Table { times, values } => Self(Repr::Table {
                times: times.clone(),
                values: values.iter().map(|v| c * v).collect(),
            }),
        })
    }

    /// Pointwise square, exact for exponential polynomials. For tables the node
    /// values are squared; by convexity of `x²` the interpolant of the squares
    /// dominates the square of the interpolant, so the result stays an upper envelope.
    pub fn squared(&self) -> Self {
        match &self.0 {
            Repr::ExpPoly(terms) => {
                let active: Vec<_> = terms.iter().filter(|t| t.is_active()).collect();
                let mut out = Vec::with_capacity(active.len() * active.len());
                for (i, a) in active.iter().enumerate() {
                    out.push(ExpTerm {
                        coeff: a.coeff * a.coeff,
                        rate: 2.0 * a.rate,
                    });
                    for b in &active[i + 1..] {
                        out.push(ExpTerm {
                            coeff: 2.0 * a.coeff * b.coeff,
                            rate: a.rate + b.rate,
                        });
                    }
                }
                Self(Repr::ExpPoly(out))
            }
            Repr::Table { times, values } => Self(Repr::Table {
                times: times.clone(),
                values: values.iter().map(|v| v * v).collect(),
            }),
        }
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let last = times.len() - 1;
    if t > times[last] {
        return 0.0;
    }
    let idx = times.partition_point(|&x| x <= t);
    if idx == 0 {
        return values[0];
    }
    let i = idx - 1;
    if times[i] == t || i == last {
        return values[i];
    }
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    values[i] + w * (values[i + 1] - values[i])
}

/// `∫_{t0}^{t1} e^{w t} ℓ(t) dt` with `ℓ` linear from `v0` to `v1`.
fn weighted_linear_panel(t0: f64, t1: f64, v0: f64, v1: f64, w: f64) -> f64 {
    let h = t1 - t0;
    if w == 0.0 {
        return 0.5 * h * (v0 + v1);
    }
    let x = w * h;
    let slope = (v1 - v0) / h;
    // ∫₀ʰ e^{ws} ds = h·E1(x), ∫₀ʰ s e^{ws} ds = h²·E2(x)
    let (e1, e2) = if x.abs() < 1e-3 {
        let mut e1 = 0.0;
        let mut e2 = 0.0;
        let mut pow = 1.0;
        let mut fact = 1.0;
        for n in 1..12 {
            fact *= n as f64;
            // x^{n-1}/n! and x^{n-1}·(n)/(n+1)!
            e1 += pow / fact;
            e2 += pow * n as f64 / (fact * (n + 1) as f64);
            pow *= x;
        }
        (e1, e2)
    } else {
        let em1 = x.exp_m1();
        (em1 / x, (x * x.exp() - em1) / (x * x))
    };
    (w * t0).exp() * (v0 * h * e1 + slope * h * h * e2)
}

/// A nonnegative combination `Σ w_i f_i(t)` of envelopes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Envelope {
    parts: Vec<(f64, TimeFunction)>,
}

impl Envelope {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `weight · f`; zero weights and zero functions are dropped.
    pub fn with(mut self, weight: f64, f: &TimeFunction) -> Self {
        debug_assert!(weight >= 0.0 && weight.is_finite());
        if weight > 0.0 && !f.is_zero() {
            self.parts.push((weight, f.clone()));
        }
        self
    }

    pub fn parts(&self) -> &[(f64, TimeFunction)] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.parts.iter().map(|(w, f)| w * f.value(t)).sum())
    }

    pub fn integrate(&self, weight_rate: f64) -> Result<f64> {
        self.parts
            .iter()
            .map(|(w, f)| f.integrate(weight_rate).map(|v| w * v))
            .sum()
    }

    pub fn is_weighted_bounded(&self, weight_rate: f64) -> bool {
        self.parts
            .iter()
            .all(|(_, f)| f.is_weighted_bounded(weight_rate))
    }
}
