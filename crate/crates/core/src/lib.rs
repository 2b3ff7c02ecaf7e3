//! Joint quality and energy evaluation of machine-learning models.
//!
//! The crate estimates training energy from hardware specifications,
//! integrates recorded power traces, counts parameters and floating-point
//! operations, normalizes subjective quality scores, and classifies models
//! by Pareto dominance over any number of minimization objectives.

pub mod catalog;
pub mod energy;
pub mod error;
pub mod flops;
pub mod ingest;
pub mod model;
pub mod pareto;
pub mod quality;
pub mod report;

pub use error::{Error, Result};
pub use model::{
    validate_record, CarbonIntensity, EnergyEstimate, EnergyMethod, EvalPoint, HardwareSpec,
    PowerTrace, QualityScore, RunRecord, Violation,
};
