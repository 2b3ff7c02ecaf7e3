//! Shared domain types.
//!
//! The record-like types keep public fields so that ingested data can be
//! represented even when it is invalid; [`validate_record`] reports every
//! broken rule instead of refusing to build the value. Types whose
//! invariants are load-bearing for algorithms ([`PowerTrace`],
//! [`EvalPoint`]) only exist in validated form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `normalized_loss = 1 - mos/5`.
pub const QUALITY_CONSISTENCY_TOL: f64 = 1e-12;

/// An accelerator model, its maximum power draw and how many were used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareSpec {
    pub name: String,
    pub max_power_watts: f64,
    pub count: u32,
}

impl HardwareSpec {
    pub fn new(name: impl Into<String>, max_power_watts: f64, count: u32) -> Result<Self> {
        if !(max_power_watts.is_finite() && max_power_watts > 0.0) {
            return Err(Error::Domain(format!(
                "max_power_watts must be > 0, got {max_power_watts}"
            )));
        }
        if count == 0 {
            return Err(Error::Domain("count must be ≥ 1".into()));
        }
        Ok(Self {
            name: name.into(),
            max_power_watts,
            count,
        })
    }
}

/// Mean Opinion Score together with its minimization form `1 - MOS/5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub mos: f64,
    pub normalized_loss: f64,
}

/// How an energy figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    /// Spec-sheet maximum power for the whole wall-clock duration.
    WorstCaseSpec,
    /// Integral of a recorded power trace.
    MeasuredIntegrated,
    /// Partial measurement projected to the full training run.
    MeasuredExtrapolated,
}

impl EnergyMethod {
    pub const ALL: [EnergyMethod; 3] = [
        EnergyMethod::WorstCaseSpec,
        EnergyMethod::MeasuredIntegrated,
        EnergyMethod::MeasuredExtrapolated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EnergyMethod::WorstCaseSpec => "worst_case_spec",
            EnergyMethod::MeasuredIntegrated => "measured_integrated",
            EnergyMethod::MeasuredExtrapolated => "measured_extrapolated",
        }
    }

    pub fn is_measured(self) -> bool {
        !matches!(self, EnergyMethod::WorstCaseSpec)
    }
}

impl fmt::Display for EnergyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EnergyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnergyMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown energy method {s:?} (expected one of worst_case_spec, measured_integrated, measured_extrapolated)"
                ))
            })
    }
}

/// An energy amount in kWh, tagged with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub kwh: f64,
    pub method: EnergyMethod,
}

impl EnergyEstimate {
    pub fn new(kwh: f64, method: EnergyMethod) -> Result<Self> {
        if !(kwh.is_finite() && kwh >= 0.0) {
            return Err(Error::Domain(format!("energy must be ≥ 0 kWh, got {kwh}")));
        }
        Ok(Self { kwh, method })
    }

    pub fn wh(&self) -> f64 {
        self.kwh * 1000.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarbonIntensity {
    pub region: String,
    pub g_co2_per_kwh: f64,
}

impl CarbonIntensity {
    pub fn new(region: impl Into<String>, g_co2_per_kwh: f64) -> Result<Self> {
        if !(g_co2_per_kwh.is_finite() && g_co2_per_kwh >= 0.0) {
            return Err(Error::Domain(format!(
                "carbon intensity must be ≥ 0 g/kWh, got {g_co2_per_kwh}"
            )));
        }
        Ok(Self {
            region: region.into(),
            g_co2_per_kwh,
        })
    }
}

/// One evaluated model configuration.
///
/// Energies keep their native units: training in kWh, generation in Wh for
/// the workload described by `gen_workload_desc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    /// Opaque configuration tags such as `h` or `r`; never read numerically.
    pub config_meta: BTreeMap<String, String>,
    pub hardware: HardwareSpec,
    pub train_hours: Option<f64>,
    pub quality: Option<QualityScore>,
    pub e_train: Option<EnergyEstimate>,
    pub e_gen_wh: Option<f64>,
    pub gen_workload_desc: String,
    pub param_count: Option<u64>,
    /// Additional named quality metrics (e.g. NDB, inception score).
    pub metrics: BTreeMap<String, f64>,
}

impl RunRecord {
    pub fn new(label: impl Into<String>, hardware: HardwareSpec) -> Self {
        Self {
            label: label.into(),
            config_meta: BTreeMap::new(),
            hardware,
            train_hours: None,
            quality: None,
            e_train: None,
            e_gen_wh: None,
            gen_workload_desc: String::new(),
            param_count: None,
            metrics: BTreeMap::new(),
        }
    }

    pub fn e_train_kwh(&self) -> Option<f64> {
        self.e_train.map(|e| e.kwh)
    }
}

/// A single broken rule found by [`validate_record`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.rule)
    }
}

fn check_nonneg(out: &mut Vec<Violation>, field: &str, v: f64) {
    if v.is_nan() || v.is_infinite() {
        out.push(Violation::new(field, "must be finite"));
    } else if v < 0.0 {
        out.push(Violation::new(field, "must be ≥ 0"));
    }
}

/// Checks every per-record invariant and returns the broken ones.
///
/// Label uniqueness is a dataset-level rule and is not checked here.
pub fn validate_record(r: &RunRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    if r.label.trim().is_empty() {
        out.push(Violation::new("label", "must be non-empty"));
    }
    let hw = &r.hardware;
    if !(hw.max_power_watts.is_finite() && hw.max_power_watts > 0.0) {
        out.push(Violation::new("hardware.max_power_watts", "must be > 0"));
    }
    if hw.count < 1 {
        out.push(Violation::new("hardware.count", "must be ≥ 1"));
    }
    if let Some(h) = r.train_hours {
        check_nonneg(&mut out, "train_hours", h);
    }
    if let Some(q) = r.quality {
        if !(q.mos.is_finite() && (1.0..=5.0).contains(&q.mos)) {
            out.push(Violation::new("mos", "must lie in [1,5]"));
        } else if !q.normalized_loss.is_finite()
            || (q.normalized_loss - (1.0 - q.mos / 5.0)).abs() > QUALITY_CONSISTENCY_TOL
        {
            out.push(Violation::new("normalized_loss", "must equal 1 − mos/5"));
        }
    }
    if let Some(e) = r.e_train {
        check_nonneg(&mut out, "e_train_kwh", e.kwh);
    }
    if let Some(e) = r.e_gen_wh {
        check_nonneg(&mut out, "e_gen_wh", e);
    }
    out
}

/// Time-ordered instantaneous power samples `(t_seconds, watts)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    samples: Vec<(f64, f64)>,
}

impl PowerTrace {
    /// Validates ordering and signs. Traces shorter than two samples are
    /// representable but cannot be integrated.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        for (index, &(t, w)) in samples.iter().enumerate() {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::MalformedTrace {
                    index,
                    reason: format!("timestamp must be finite and ≥ 0, got {t}"),
                });
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::MalformedTrace {
                    index,
                    reason: format!("power must be finite and ≥ 0 W, got {w}"),
                });
            }
            if index > 0 && t <= samples[index - 1].0 {
                return Err(Error::MalformedTrace {
                    index,
                    reason: format!(
                        "timestamps must be strictly increasing ({} then {t})",
                        samples[index - 1].0
                    ),
                });
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(first, last)` timestamps, if any.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.0, self.samples.last()?.0))
    }

    /// Multiplies every power sample by `factor` (must be ≥ 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|&(t, w)| (t, w * factor)).collect())
    }
}

/// A labeled point in a minimization space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalPoint {
    label: String,
    objectives: Vec<f64>,
}

impl EvalPoint {
    pub fn new(label: impl Into<String>, objectives: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if objectives.is_empty() {
            return Err(Error::Input(format!("point {label:?} has no objectives")));
        }
        if let Some(i) = objectives.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "point {label:?}: objective {i} is not finite ({})",
                objectives[i]
            )));
        }
        Ok(Self { label, objectives })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn objectives(&self) -> &[f64] {
        &self.objectives
    }

    pub fn dim(&self) -> usize {
        self.objectives.len()
    }
}
