//! Turning subjective quality scores into minimization objectives.
//!
//! MOS lives on `[1, 5]` (higher is better). The Pareto engine minimizes
//! everything, so quality enters as `1 - MOS/5`, which lies on `[0, 0.8]`
//! and approaches 0 as perceived quality improves.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::QualityScore;

pub const MOS_MIN: f64 = 1.0;
pub const MOS_MAX: f64 = 5.0;
pub const LOSS_MAX: f64 = (MOS_MAX - MOS_MIN) / MOS_MAX;

/// `mos -> 1 - mos/5`, evaluated as `(5 - mos)/5` so both ends of the
/// scale map exactly.
pub fn normalize_mos(mos: f64) -> Result<QualityScore> {
    if !(MOS_MIN..=MOS_MAX).contains(&mos) {
        return Err(Error::Domain(format!("mos must lie in [1,5], got {mos}")));
    }
    Ok(QualityScore {
        mos,
        normalized_loss: (MOS_MAX - mos) / MOS_MAX,
    })
}

/// `loss -> 5 (1 - loss)`, evaluated as `5 - 5 loss`.
pub fn denormalize(loss: f64) -> Result<f64> {
    if !(0.0..=LOSS_MAX).contains(&loss) {
        return Err(Error::Domain(format!(
            "normalized loss must lie in [0,0.8], got {loss}"
        )));
    }
    Ok(MOS_MAX - MOS_MAX * loss)
}

/// Builds a score from an ingested loss, keeping the loss at full input
/// precision rather than re-deriving it from the reconstructed MOS.
pub fn score_from_loss(loss: f64) -> Result<QualityScore> {
    let mos = denormalize(loss)?;
    Ok(QualityScore {
        mos,
        normalized_loss: loss,
    })
}

/// How a generic named metric maps onto a minimization objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricDirection {
    /// Already lower-is-better; used as is.
    #[default]
    Minimize,
    /// Higher-is-better, unbounded: negated.
    MaximizeNegate,
    /// Higher-is-better on `[0, 1]`: mapped to `1 - x`.
    MaximizeComplement,
}

impl MetricDirection {
    pub fn to_minimization(self, value: f64) -> f64 {
        match self {
            MetricDirection::Minimize => value,
            MetricDirection::MaximizeNegate => -value,
            MetricDirection::MaximizeComplement => 1.0 - value,
        }
    }
}

impl FromStr for MetricDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(MetricDirection::Minimize),
            "neg" | "max" => Ok(MetricDirection::MaximizeNegate),
            "complement" | "1-x" => Ok(MetricDirection::MaximizeComplement),
            other => Err(Error::Input(format!(
                "unknown metric direction {other:?} (expected min, neg, complement)"
            ))),
        }
    }
}

impl fmt::Display for MetricDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricDirection::Minimize => "min",
            MetricDirection::MaximizeNegate => "neg",
            MetricDirection::MaximizeComplement => "complement",
        })
    }
}
