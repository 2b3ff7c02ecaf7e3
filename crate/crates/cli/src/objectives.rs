//! Objective selection for Pareto analysis. Every objective is minimized.

use std::fmt;

use greeneval::quality::MetricDirection;
use greeneval::RunRecord;

use crate::error::{CliError, Result};

pub const DEFAULT_OBJECTIVES: &str = "quality_loss,e_train";

const BUILTIN: [&str; 6] = ["quality_loss", "mos", "e_train", "e_gen", "params", "train_hours"];

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    QualityLoss,
    /// MOS, negated so that lower is better.
    Mos,
    ETrain,
    EGen,
    Params,
    TrainHours,
    Metric(String, MetricDirection),
}

impl Objective {
    /// Parses one name: a built-in, or `metric.NAME[:min|neg|complement]`
    /// for a metric present in `metrics`.
    pub fn parse(name: &str, metrics: &[&str]) -> Result<Self> {
        let name = name.trim();
        let unknown = || CliError::UnknownObjective {
            name: name.to_string(),
            available: BUILTIN
                .iter()
                .map(|s| s.to_string())
                .chain(metrics.iter().map(|m| format!("metric.{m}")))
                .collect(),
        };
        Ok(match name {
            "quality_loss" => Objective::QualityLoss,
            "mos" => Objective::Mos,
            "e_train" => Objective::ETrain,
            "e_gen" => Objective::EGen,
            "params" => Objective::Params,
            "train_hours" => Objective::TrainHours,
            _ => {
                let Some(rest) = name.strip_prefix("metric.") else {
                    return Err(unknown());
                };
                let (metric, dir) = match rest.split_once(':') {
                    Some((m, d)) => (m, d.parse::<MetricDirection>()?),
                    None => (rest, MetricDirection::Minimize),
                };
                if !metrics.contains(&metric) {
                    return Err(unknown());
                }
                Objective::Metric(metric.to_string(), dir)
            }
        })
    }

    /// Comma-separated list; at least one name, no repeats.
    pub fn parse_list(list: &str, metrics: &[&str]) -> Result<Vec<Self>> {
        let mut out: Vec<Objective> = Vec::new();
        for name in list.split(',').filter(|s| !s.trim().is_empty()) {
            let o = Objective::parse(name, metrics)?;
            if out.contains(&o) {
                return Err(CliError::Usage(format!("objective {} selected twice", name.trim())));
            }
            out.push(o);
        }
        if out.is_empty() {
            return Err(CliError::Usage("no objectives selected".into()));
        }
        Ok(out)
    }

    /// The value to minimize, if the record reports it.
    pub fn value(&self, r: &RunRecord) -> Option<f64> {
        match self {
            Objective::QualityLoss => r.quality.map(|q| q.normalized_loss),
            Objective::Mos => r.quality.map(|q| -q.mos),
            Objective::ETrain => r.e_train_kwh(),
            Objective::EGen => r.e_gen_wh,
            Objective::Params => r.param_count.map(|p| p as f64),
            Objective::TrainHours => r.train_hours,
            Objective::Metric(m, dir) => r.metrics.get(m).map(|&v| dir.to_minimization(v)),
        }
    }

    /// Axis name with units.
    pub fn axis_label(&self) -> String {
        match self {
            Objective::QualityLoss => "1−%MOS".into(),
            Objective::Mos => "−MOS".into(),
            Objective::ETrain => "E_train (kWh)".into(),
            Objective::EGen => "E_gen (Wh)".into(),
            Objective::Params => "#params".into(),
            Objective::TrainHours => "training time (h)".into(),
            Objective::Metric(m, MetricDirection::Minimize) => m.clone(),
            Objective::Metric(m, MetricDirection::MaximizeNegate) => format!("−{m}"),
            Objective::Metric(m, MetricDirection::MaximizeComplement) => format!("1−{m}"),
        }
    }

    pub fn decimals(&self) -> Option<usize> {
        match self {
            Objective::QualityLoss | Objective::EGen => Some(3),
            Objective::ETrain | Objective::TrainHours => Some(1),
            Objective::Mos => Some(2),
            Objective::Params => Some(0),
            Objective::Metric(..) => None,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::QualityLoss => f.write_str("quality_loss"),
            Objective::Mos => f.write_str("mos"),
            Objective::ETrain => f.write_str("e_train"),
            Objective::EGen => f.write_str("e_gen"),
            Objective::Params => f.write_str("params"),
            Objective::TrainHours => f.write_str("train_hours"),
            Objective::Metric(m, d) => write!(f, "metric.{m}:{d}"),
        }
    }
}
