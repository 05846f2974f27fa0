//! Problem data: envelopes, delays, the abstract coefficient bundle, and the
//! built-in stochastic heat equation.

mod delay;
mod heat;
mod problem;
mod time_function;

pub use delay::{DelayKind, DelaySpec};
pub use heat::{map_heat_to_problem, HeatModelSpec, InitialSegment, INIT_SUP_GRID};
pub use problem::{
    validate_problem, Attestations, MemoryEnvelope, ProblemSpec, ValidationItem, ValidationReport,
};
pub use time_function::{Envelope, ExpTerm, TimeFunction, TimeFunctionKind};
