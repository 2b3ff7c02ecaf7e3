//! Report documents: CSV tables, a JSON export of a front, and an SVG
//! scatter plot of a two-objective space.
//!
//! All output is byte-deterministic for fixed input. Numbers in tables are
//! rounded half-to-even on their exact decimal value at the column's
//! declared precision; rounding happens only here, after any Pareto
//! classification. CSV text fields are quoted, numeric fields are not.
//!
//! In the SVG, non-dominated points carry the class `pareto-optimal` (drawn
//! blue) and dominated points `pareto-dominated` (drawn red). Every marker
//! has a `data-label` attribute and a text label at a fixed offset.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EvalPoint, RunRecord};
use crate::pareto::FrontResult;

pub const OPTIMAL_CLASS: &str = "pareto-optimal";
pub const DOMINATED_CLASS: &str = "pareto-dominated";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReportFormat {
    DelimitedTable,
    StructuredDocument,
    VectorImage,
}

/// A record attribute that can be rendered as a table column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    Label,
    /// `"<count> × <device>"`.
    Hardware,
    PowerWatts,
    GpuCount,
    TrainHours,
    ETrainKwh,
    ETrainMethod,
    EGenWh,
    GenWorkload,
    Mos,
    QualityLoss,
    ParamCount,
    Meta(String),
    Metric(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub header: String,
    pub field: Field,
    /// Decimal places for numeric fields; `None` keeps full precision.
    pub decimals: Option<usize>,
}

impl Column {
    pub fn new(header: impl Into<String>, field: Field, decimals: Option<usize>) -> Self {
        Self {
            header: header.into(),
            field,
            decimals,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportSpec {
    /// Axis names with units, one per objective.
    pub objective_labels: Vec<String>,
    /// Decimal places per objective in front tables.
    pub objective_decimals: Vec<Option<usize>>,
    /// Columns of record tables.
    pub columns: Vec<Column>,
    pub formats: BTreeSet<ReportFormat>,
}

impl ReportSpec {
    pub fn for_objectives(labels: Vec<String>, decimals: Vec<Option<usize>>) -> Self {
        Self {
            objective_labels: labels,
            objective_decimals: decimals,
            columns: Vec::new(),
            formats: [
                ReportFormat::DelimitedTable,
                ReportFormat::StructuredDocument,
                ReportFormat::VectorImage,
            ]
            .into(),
        }
    }

    /// Model / Hardware / Power / Hours / Energy, energy at one decimal.
    pub fn training_cost_table() -> Self {
        Self {
            objective_labels: Vec::new(),
            objective_decimals: Vec::new(),
            columns: vec![
                Column::new("model", Field::Label, None),
                Column::new("hardware", Field::Hardware, None),
                Column::new("power_w", Field::PowerWatts, None),
                Column::new("hours", Field::TrainHours, None),
                Column::new("energy_kwh", Field::ETrainKwh, Some(1)),
                Column::new("method", Field::ETrainMethod, None),
            ],
            formats: [ReportFormat::DelimitedTable].into(),
        }
    }

    /// Model / #param / 1−%MOS / E_train / E_gen.
    pub fn quality_energy_table() -> Self {
        Self {
            objective_labels: Vec::new(),
            objective_decimals: Vec::new(),
            columns: vec![
                Column::new("model", Field::Label, None),
                Column::new("param_count", Field::ParamCount, None),
                Column::new("quality_loss", Field::QualityLoss, Some(3)),
                Column::new("e_train_kwh", Field::ETrainKwh, Some(1)),
                Column::new("e_gen_wh", Field::EGenWh, Some(3)),
            ],
            formats: [ReportFormat::DelimitedTable].into(),
        }
    }

    fn check_dim(&self, points: &[EvalPoint]) -> Result<()> {
        let k = self.objective_labels.len();
        if self.objective_decimals.len() != k {
            return Err(Error::Input(format!(
                "{} objective labels but {} decimal settings",
                k,
                self.objective_decimals.len()
            )));
        }
        match points.iter().find(|p| p.dim() != k) {
            Some(p) => Err(Error::Dimension {
                expected: k,
                found: p.dim(),
            }),
            None => Ok(()),
        }
    }
}

/// Fixed-point rendering with half-to-even rounding; never prints `-0`.
pub fn format_decimal(v: f64, decimals: Option<usize>) -> String {
    let s = match decimals {
        Some(d) => format!("{v:.d$}"),
        None => format!("{v}"),
    };
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

enum Cell {
    Text(String),
    Number(String),
    Empty,
}

fn cell(r: &RunRecord, c: &Column) -> Cell {
    let num = |v: Option<f64>| v.map_or(Cell::Empty, |v| Cell::Number(format_decimal(v, c.decimals)));
    match &c.field {
        Field::Label => Cell::Text(r.label.clone()),
        Field::Hardware => Cell::Text(format!("{} × {}", r.hardware.count, r.hardware.name)),
        Field::PowerWatts => num(Some(r.hardware.max_power_watts)),
        Field::GpuCount => Cell::Number(r.hardware.count.to_string()),
        Field::TrainHours => num(r.train_hours),
        Field::ETrainKwh => num(r.e_train_kwh()),
        Field::ETrainMethod => r
            .e_train
            .map_or(Cell::Empty, |e| Cell::Text(e.method.to_string())),
        Field::EGenWh => num(r.e_gen_wh),
        Field::GenWorkload => Cell::Text(r.gen_workload_desc.clone()),
        Field::Mos => num(r.quality.map(|q| q.mos)),
        Field::QualityLoss => num(r.quality.map(|q| q.normalized_loss)),
        Field::ParamCount => r
            .param_count
            .map_or(Cell::Empty, |p| Cell::Number(p.to_string())),
        Field::Meta(k) => r
            .config_meta
            .get(k)
            .map_or(Cell::Empty, |v| Cell::Text(v.clone())),
        Field::Metric(k) => num(r.metrics.get(k).copied()),
    }
}

/// Quotes text cells and leaves numbers bare.
fn csv_line(out: &mut String, cells: impl IntoIterator<Item = Cell>) {
    let parts: Vec<String> = cells
        .into_iter()
        .map(|c| match c {
            Cell::Text(t) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Number(n) => n,
            Cell::Empty => String::new(),
        })
        .collect();
    out.push_str(&parts.join(","));
    out.push('\n');
}

/// One row per record, columns as declared by `spec.columns`.
pub fn emit_table(records: &[RunRecord], spec: &ReportSpec) -> Result<String> {
    if spec.columns.is_empty() {
        return Err(Error::Input("report spec declares no columns".into()));
    }
    let mut out = String::new();
    csv_line(&mut out, spec.columns.iter().map(|c| Cell::Text(c.header.clone())));
    for r in records {
        csv_line(&mut out, spec.columns.iter().map(|c| cell(r, c)));
    }
    Ok(out)
}

fn status_of<'a>(front: &'a FrontResult, label: &str) -> Result<(&'static str, &'a [String])> {
    if front.is_optimal(label) {
        return Ok(("optimal", &[]));
    }
    front
        .dominators_of(label)
        .map(|d| ("dominated", d))
        .ok_or_else(|| Error::Input(format!("point {label:?} is not part of the front result")))
}

/// `label, <objectives...>, status, dominated_by` with dominators joined by
/// `;`.
pub fn emit_front_table(front: &FrontResult, points: &[EvalPoint], spec: &ReportSpec) -> Result<String> {
    spec.check_dim(points)?;
    let mut out = String::new();
    let header = std::iter::once("label".to_string())
        .chain(spec.objective_labels.iter().cloned())
        .chain(["status".to_string(), "dominated_by".to_string()]);
    csv_line(&mut out, header.map(Cell::Text));
    for p in points {
        let (status, doms) = status_of(front, p.label())?;
        let mut cells = vec![Cell::Text(p.label().to_string())];
        cells.extend(
            p.objectives()
                .iter()
                .zip(&spec.objective_decimals)
                .map(|(&v, &d)| Cell::Number(format_decimal(v, d))),
        );
        cells.push(Cell::Text(status.into()));
        cells.push(Cell::Text(doms.join(";")));
        csv_line(&mut out, cells);
    }
    Ok(out)
}

#[derive(Serialize)]
struct FrontPointDoc<'a> {
    label: &'a str,
    objectives: &'a [f64],
    status: &'static str,
    dominators: &'a [String],
}

#[derive(Serialize)]
struct FrontDoc<'a> {
    objectives: &'a [String],
    points: Vec<FrontPointDoc<'a>>,
    optimal: &'a [String],
    dominated: &'a [crate::pareto::Dominated],
}

/// JSON export of a front: objective names, every point with its full
/// precision objectives and status, and the optimal/dominated partition.
pub fn emit_front_json(front: &FrontResult, points: &[EvalPoint], spec: &ReportSpec) -> Result<String> {
    spec.check_dim(points)?;
    let points = points
        .iter()
        .map(|p| {
            let (status, dominators) = status_of(front, p.label())?;
            Ok(FrontPointDoc {
                label: p.label(),
                objectives: p.objectives(),
                status,
                dominators,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = FrontDoc {
        objectives: &spec.objective_labels,
        points,
        optimal: &front.optimal,
        dominated: &front.dominated,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("front document serializes");
    s.push('\n');
    Ok(s)
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 40.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const LABEL_DX: f64 = 7.0;
const LABEL_DY: f64 = -7.0;

/// Data range padded by 5% on each side; degenerate ranges are widened.
fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span == 0.0 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        return (lo - pad, hi + pad);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

/// Decimal places that keep neighbouring ticks distinguishable.
fn tick_decimals(lo: f64, hi: f64) -> usize {
    let step = (hi - lo) / (TICKS - 1) as f64;
    let mut d = 0;
    while d < 10 && step * 10f64.powi(d as i32) < 1.0 {
        d += 1;
    }
    d
}

/// SVG scatter of a two-objective space with the front highlighted.
pub fn emit_scatter(front: &FrontResult, points: &[EvalPoint], spec: &ReportSpec) -> Result<String> {
    if spec.objective_labels.len() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: spec.objective_labels.len(),
        });
    }
    spec.check_dim(points)?;

    let (x_lo, x_hi) = axis_range(points.iter().map(|p| p.objectives()[0]));
    let (y_lo, y_hi) = axis_range(points.iter().map(|p| p.objectives()[1]));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
    let x_axis_y = MARGIN_TOP + plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    s.push_str("<style>\n");
    writeln!(s, ".{OPTIMAL_CLASS} {{ fill: blue; }}").unwrap();
    writeln!(s, ".{DOMINATED_CLASS} {{ fill: red; }}").unwrap();
    s.push_str(".pareto-front { fill: none; stroke: blue; stroke-dasharray: 4 3; }\n");
    s.push_str(".axis { stroke: black; }\n");
    s.push_str("text { font-family: sans-serif; font-size: 12px; }\n");
    s.push_str("</style>\n");
    writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();

    // axes
    writeln!(
        s,
        r#"<line class="axis" x1="{MARGIN_LEFT:.2}" y1="{x_axis_y:.2}" x2="{:.2}" y2="{x_axis_y:.2}"/>"#,
        MARGIN_LEFT + plot_w
    )
    .unwrap();
    writeln!(
        s,
        r#"<line class="axis" x1="{MARGIN_LEFT:.2}" y1="{MARGIN_TOP:.2}" x2="{MARGIN_LEFT:.2}" y2="{x_axis_y:.2}"/>"#
    )
    .unwrap();
    let (xd, yd) = (tick_decimals(x_lo, x_hi), tick_decimals(y_lo, y_hi));
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let (px, py) = (sx(xv), sy(yv));
        writeln!(
            s,
            r#"<line class="axis" x1="{px:.2}" y1="{x_axis_y:.2}" x2="{px:.2}" y2="{:.2}"/>"#,
            x_axis_y + 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x_axis_y + 18.0,
            format_decimal(xv, Some(xd))
        )
        .unwrap();
        writeln!(
            s,
            r#"<line class="axis" x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT:.2}" y2="{py:.2}"/>"#,
            MARGIN_LEFT - 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 8.0,
            py + 4.0,
            format_decimal(yv, Some(yd))
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        xml_escape(&spec.objective_labels[0])
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="20.00" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20.00 {0:.2})">{1}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        xml_escape(&spec.objective_labels[1])
    )
    .unwrap();

    // front polyline through the optimal points, ordered along the x axis
    let mut front_pts: Vec<&EvalPoint> = points.iter().filter(|p| front.is_optimal(p.label())).collect();
    front_pts.sort_by(|a, b| {
        let (a, b) = (a.objectives(), b.objectives());
        a[0].partial_cmp(&b[0])
            .unwrap()
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });
    if front_pts.len() > 1 {
        let coords: Vec<String> = front_pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.objectives()[0]), sy(p.objectives()[1])))
            .collect();
        writeln!(s, r#"<polyline class="pareto-front" points="{}"/>"#, coords.join(" ")).unwrap();
    }

    for p in points {
        let (status, _) = status_of(front, p.label())?;
        let class = if status == "optimal" { OPTIMAL_CLASS } else { DOMINATED_CLASS };
        let (px, py) = (sx(p.objectives()[0]), sy(p.objectives()[1]));
        let label = xml_escape(p.label());
        writeln!(
            s,
            r#"<circle class="{class}" data-label="{label}" cx="{px:.2}" cy="{py:.2}" r="5"/>"#
        )
        .unwrap();
        writeln!(
            s,
            r#"<text class="point-label" x="{:.2}" y="{:.2}">{label}</text>"#,
            px + LABEL_DX,
            py + LABEL_DY
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}
