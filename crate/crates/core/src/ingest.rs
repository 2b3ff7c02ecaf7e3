//! Recorded power traces: parsing, integration, and extrapolation of a
//! partial training run to its full length.
//!
//! Trace files are comma-separated `t_seconds,watts`, one sample per line.
//! Lines starting with `#` are comments and an optional header row is
//! detected automatically. Epoch mark files use `epoch_index,t_seconds`.
//!
//! Power is treated as piecewise linear between samples, so integration is
//! the trapezoidal rule and sub-interval queries interpolate linearly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EnergyEstimate, EnergyMethod, PowerTrace};

pub const DEFAULT_GAP_THRESHOLD_S: f64 = 60.0;

const SECONDS_PER_HOUR: f64 = 3600.0;

/// Timestamp at which epoch `epoch_index` begins (equivalently, at which
/// epoch `epoch_index - 1` ends).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochMark {
    pub epoch_index: u64,
    pub t_seconds: f64,
}

/// Two consecutive samples further apart than the gap threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceGap {
    /// Index of the sample that ends the gap.
    pub index: usize,
    pub start_s: f64,
    pub end_s: f64,
}

impl TraceGap {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

fn require_integrable(trace: &PowerTrace) -> Result<()> {
    if trace.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "integration needs at least 2 samples, trace has {}",
            trace.len()
        )));
    }
    Ok(())
}

fn trapezoid_wh(t0: f64, w0: f64, t1: f64, w1: f64) -> f64 {
    (t1 - t0) / SECONDS_PER_HOUR * (w0 + w1) / 2.0
}

/// Trapezoidal integral of the whole trace.
pub fn integrate_trace(trace: &PowerTrace) -> Result<EnergyEstimate> {
    require_integrable(trace)?;
    let wh: f64 = trace
        .samples()
        .windows(2)
        .map(|s| trapezoid_wh(s[0].0, s[0].1, s[1].0, s[1].1))
        .sum();
    EnergyEstimate::new(wh / 1000.0, EnergyMethod::MeasuredIntegrated)
}

/// Energy in Wh between two instants inside the trace span, integrating the
/// piecewise-linear power curve.
pub fn energy_between_wh(trace: &PowerTrace, from_s: f64, to_s: f64) -> Result<f64> {
    require_integrable(trace)?;
    let (first, last) = trace.span().expect("non-empty");
    if !(first <= from_s && from_s <= to_s && to_s <= last) {
        return Err(Error::Domain(format!(
            "interval [{from_s}, {to_s}] must be ordered and lie within the trace span [{first}, {last}]"
        )));
    }
    let s = trace.samples();
    // First segment whose end lies after `from_s`.
    let start = s.partition_point(|&(t, _)| t <= from_s).saturating_sub(1);
    let mut wh = 0.0;
    for seg in s[start..].windows(2) {
        let ((ta, wa), (tb, wb)) = (seg[0], seg[1]);
        if ta >= to_s {
            break;
        }
        let a = ta.max(from_s);
        let b = tb.min(to_s);
        if b <= a {
            continue;
        }
        let at = |t: f64| {
            if t == ta {
                wa
            } else if t == tb {
                wb
            } else {
                wa + (wb - wa) * (t - ta) / (tb - ta)
            }
        };
        wh += trapezoid_wh(a, at(a), b, at(b));
    }
    Ok(wh)
}

pub fn find_gaps(trace: &PowerTrace, threshold_s: f64) -> Vec<TraceGap> {
    trace
        .samples()
        .windows(2)
        .enumerate()
        .filter(|(_, s)| s[1].0 - s[0].0 > threshold_s)
        .map(|(i, s)| TraceGap {
            index: i + 1,
            start_s: s[0].0,
            end_s: s[1].0,
        })
        .collect()
}

fn validate_marks(trace: &PowerTrace, marks: &[EpochMark]) -> Result<()> {
    if marks.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "at least one complete epoch (2 marks) is required, got {} mark(s)",
            marks.len()
        )));
    }
    let (first, last) = trace.span().ok_or_else(|| {
        Error::InsufficientData("trace has no samples".into())
    })?;
    for (i, m) in marks.iter().enumerate() {
        if !(first..=last).contains(&m.t_seconds) {
            return Err(Error::Domain(format!(
                "epoch mark {i} (t = {} s) lies outside the trace span [{first}, {last}]",
                m.t_seconds
            )));
        }
        if i > 0 {
            let prev = marks[i - 1];
            if m.epoch_index <= prev.epoch_index || m.t_seconds <= prev.t_seconds {
                return Err(Error::Input(format!(
                    "epoch marks must strictly increase in index and time (mark {i})"
                )));
            }
        }
    }
    Ok(())
}

/// Energy of each marked segment: `(epochs covered, kWh)`.
pub fn segment_energies_kwh(trace: &PowerTrace, marks: &[EpochMark]) -> Result<Vec<(u64, f64)>> {
    validate_marks(trace, marks)?;
    marks
        .windows(2)
        .map(|m| {
            let wh = energy_between_wh(trace, m[0].t_seconds, m[1].t_seconds)?;
            Ok((m[1].epoch_index - m[0].epoch_index, wh / 1000.0))
        })
        .collect()
}

/// Predicts full-training energy as the mean energy of the completed epochs
/// times `total_epochs`.
///
/// A segment between non-consecutive epoch indices counts as that many
/// epochs of equal energy.
pub fn extrapolate_training(
    trace: &PowerTrace,
    marks: &[EpochMark],
    total_epochs: u64,
) -> Result<EnergyEstimate> {
    let segments = segment_energies_kwh(trace, marks)?;
    let completed: u64 = segments.iter().map(|&(n, _)| n).sum();
    if total_epochs < completed {
        return Err(Error::Domain(format!(
            "total_epochs ({total_epochs}) is smaller than the {completed} completed epoch(s)"
        )));
    }
    let measured: f64 = segments.iter().map(|&(_, kwh)| kwh).sum();
    let mean = measured / completed as f64;
    EnergyEstimate::new(mean * total_epochs as f64, EnergyMethod::MeasuredExtrapolated)
}

fn reader(source: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source.as_bytes())
}

/// Rows of a two-column numeric file as `(line, a, b)`, skipping an
/// optional header matching `header`.
fn numeric_rows(source: &str, header: [&str; 2]) -> Result<Vec<(usize, f64, f64)>> {
    let mut rows = Vec::new();
    for (n, rec) in reader(source).records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 columns ({}), found {}", header.join(","), rec.len()),
            });
        }
        if n == 0 && rec[0].parse::<f64>().is_err() {
            if rec[0].eq_ignore_ascii_case(header[0]) && rec[1].eq_ignore_ascii_case(header[1]) {
                continue;
            }
            return Err(Error::Parse {
                line,
                message: format!(
                    "unrecognized header {:?},{:?} (expected {})",
                    &rec[0],
                    &rec[1],
                    header.join(",")
                ),
            });
        }
        let num = |i: usize| {
            rec[i].parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("{}: {:?} is not a number", header[i], &rec[i]),
            })
        };
        rows.push((line, num(0)?, num(1)?));
    }
    Ok(rows)
}

pub fn parse_trace(source: &str) -> Result<PowerTrace> {
    let rows = numeric_rows(source, ["t_seconds", "watts"])?;
    PowerTrace::new(rows.into_iter().map(|(_, t, w)| (t, w)).collect())
}

pub fn parse_marks(source: &str) -> Result<Vec<EpochMark>> {
    numeric_rows(source, ["epoch_index", "t_seconds"])?
        .into_iter()
        .map(|(line, idx, t)| {
            if !(idx >= 0.0 && idx.fract() == 0.0 && idx <= u64::MAX as f64) {
                return Err(Error::Parse {
                    line,
                    message: format!("epoch_index must be a nonnegative integer, got {idx}"),
                });
            }
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Parse {
                    line,
                    message: format!("t_seconds must be finite and ≥ 0, got {t}"),
                });
            }
            Ok(EpochMark {
                epoch_index: idx as u64,
                t_seconds: t,
            })
        })
        .collect()
}

/// Writes a trace in the format [`parse_trace`] reads, with a header row.
/// Values use shortest round-trip formatting.
pub fn write_trace(trace: &PowerTrace) -> String {
    let mut out = String::from("t_seconds,watts\n");
    for &(t, w) in trace.samples() {
        writeln!(out, "{t},{w}").unwrap();
    }
    out
}
