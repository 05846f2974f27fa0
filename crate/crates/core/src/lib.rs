//! Exponential stability certificates for stochastic evolution equations with
//! memory, and a Monte Carlo harness that checks them on a delayed stochastic
//! heat equation.
//!
//! - [`model`]: time functions, delays, problem data and the heat model.
//! - [`certificate`]: mean-square and almost-sure decay constants.
//! - [`simulate`]: spectral Euler–Maruyama paths and Monte Carlo curves.
//! - [`verify`]: comparisons between simulated statistics and a certificate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod error;
pub mod model;
pub mod simulate;
pub mod verify;

pub use certificate::{
    build_as_certificate, build_certificate, ASCertificate, Certificate, CertificateDocument,
    CertificateOptions,
};
pub use error::{Error, Result};
pub use model::{map_heat_to_problem, HeatModelSpec, ProblemSpec, TimeFunction};
pub use simulate::{run_monte_carlo, MSCurve, SimConfig};
