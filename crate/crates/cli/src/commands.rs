//! One function per subcommand. Each returns what it would print; files
//! are written only into the output directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use greeneval::catalog::Catalog;
use greeneval::energy::{estimate_vs_measured, worst_case_kwh, Comparison};
use greeneval::flops::{parse_stack, stack_totals, MacFactor, TensorShape};
use greeneval::ingest::{extrapolate_training, find_gaps, integrate_trace, parse_marks, parse_trace, segment_energies_kwh};
use greeneval::pareto::pareto_front;
use greeneval::report::{emit_front_json, emit_front_table, emit_scatter, emit_table, format_decimal, ReportSpec};
use greeneval::EvalPoint;

use crate::cli::{Cli, Command, GlobalArgs, TableKind};
use crate::dataset::Dataset;
use crate::error::{CliError, Result};
use crate::objectives::{Objective, DEFAULT_OBJECTIVES};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Estimate { records } => estimate(g, records),
        Command::Pareto { records } => pareto(g, records),
        Command::Ingest {
            trace,
            marks,
            total_epochs,
            gap_threshold,
        } => ingest(trace, marks.as_deref().zip(*total_epochs), *gap_threshold),
        Command::Flops { stack, input_shape } => flops(g, stack, input_shape),
        Command::Report { records, table } => report(g, records, *table),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn catalog(g: &GlobalArgs) -> Result<Catalog> {
    match &g.catalog {
        Some(p) => Ok(Catalog::load(&read(p)?)?),
        None => Ok(Catalog::seed()),
    }
}

fn out_dir(g: &GlobalArgs) -> PathBuf {
    g.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Writes all `files` into `dir`, or none of them if any would overwrite an
/// input, or an existing file without `force`.
fn write_outputs(dir: &Path, files: &[(&str, String)], force: bool, inputs: &[&Path]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let inputs: Vec<PathBuf> = inputs.iter().filter_map(|p| p.canonicalize().ok()).collect();
    let targets: Vec<PathBuf> = files.iter().map(|(name, _)| dir.join(name)).collect();
    for t in &targets {
        if let Ok(canon) = t.canonicalize() {
            if inputs.contains(&canon) {
                return Err(CliError::WouldClobberInput(t.clone()));
            }
            if !force {
                return Err(CliError::OutputExists(t.clone()));
            }
        }
    }
    for (t, (_, content)) in targets.iter().zip(files) {
        std::fs::write(t, content).map_err(|e| CliError::io(t, e))?;
    }
    Ok(targets)
}

fn wrote(out: &mut String, paths: &[PathBuf]) {
    for p in paths {
        out.push_str(&format!("wrote {}\n", p.display()));
    }
}

fn signed(v: f64, decimals: usize) -> String {
    let s = format_decimal(v, Some(decimals));
    if s.starts_with('-') {
        s
    } else {
        format!("+{s}")
    }
}

/// `model,estimate_kwh,measured_kwh,delta_kwh,relative_pct`.
pub fn comparison_table(rows: &[(String, Comparison)]) -> String {
    let mut out = String::from("model,estimate_kwh,measured_kwh,delta_kwh,relative_pct\n");
    for (label, c) in rows {
        let rel = c.relative.map_or_else(|| "n/a".to_string(), |r| signed(r * 100.0, 2));
        out.push_str(&format!(
            "\"{}\",{},{},{},{}\n",
            label.replace('"', "\"\""),
            format_decimal(c.estimate.kwh, Some(3)),
            format_decimal(c.measured.kwh, Some(3)),
            signed(c.delta_kwh, 3),
            rel
        ));
    }
    out
}

pub fn estimate(g: &GlobalArgs, records_path: &Path) -> Result<Outcome> {
    let mut ds = Dataset::load(records_path, &catalog(g)?)?;
    let mut warnings = Vec::new();
    let mut comparisons = Vec::new();
    for r in &mut ds.records {
        let worst = r.train_hours.map(|h| worst_case_kwh(&r.hardware, h)).transpose()?;
        match (r.e_train, worst) {
            (Some(m), Some(w)) if m.method.is_measured() => {
                comparisons.push((r.label.clone(), estimate_vs_measured(&w, &m)));
            }
            (Some(m), None) if m.method.is_measured() => {}
            (_, Some(w)) => r.e_train = Some(w),
            (_, None) => warnings.push(format!(
                "{}: no train_hours and no measured energy; left without e_train",
                r.label
            )),
        }
    }

    let table = emit_table(&ds.records, &ReportSpec::training_cost_table())?;
    let mut stdout = table.clone();
    let mut files = vec![("records.csv", ds.to_csv()), ("report.csv", table)];
    if !comparisons.is_empty() {
        let cmp = comparison_table(&comparisons);
        stdout.push('\n');
        stdout.push_str(&cmp);
        files.push(("comparison.csv", cmp));
    }
    let paths = write_outputs(&out_dir(g), &files, g.force, &[records_path])?;
    stdout.push('\n');
    wrote(&mut stdout, &paths);
    Ok(Outcome { stdout, warnings })
}

/// Points for the selected objectives, plus labels of records skipped for
/// missing values.
pub fn select_points(ds: &Dataset, objectives: &[Objective]) -> Result<(Vec<EvalPoint>, Vec<String>)> {
    let mut points = Vec::new();
    let mut missing = Vec::new();
    for r in &ds.records {
        let values: Option<Vec<f64>> = objectives.iter().map(|o| o.value(r)).collect();
        match values {
            Some(v) => points.push(EvalPoint::new(r.label.clone(), v)?),
            None => {
                let absent: Vec<String> = objectives
                    .iter()
                    .filter(|o| o.value(r).is_none())
                    .map(ToString::to_string)
                    .collect();
                missing.push(format!("{} ({})", r.label, absent.join(", ")));
            }
        }
    }
    Ok((points, missing))
}

pub fn pareto(g: &GlobalArgs, records_path: &Path) -> Result<Outcome> {
    let ds = Dataset::load(records_path, &catalog(g)?)?;
    let list = g.objectives.as_deref().unwrap_or(DEFAULT_OBJECTIVES);
    let metrics: Vec<&str> = ds.metric_names().into_iter().collect();
    let objectives = Objective::parse_list(list, &metrics)?;
    let (points, missing) = select_points(&ds, &objectives)?;
    let mut warnings = Vec::new();
    if !missing.is_empty() {
        if !g.exclude_incomplete {
            return Err(CliError::Incomplete { missing });
        }
        warnings.push(format!("excluded {} record(s): {}", missing.len(), missing.join(", ")));
    }
    if points.is_empty() {
        return Err(CliError::NoRecords {
            excluded: missing.len(),
        });
    }
    if objectives.contains(&Objective::ETrain) {
        let included: BTreeSet<&str> = points.iter().map(EvalPoint::label).collect();
        let methods: BTreeSet<&str> = ds
            .records
            .iter()
            .filter(|r| included.contains(r.label.as_str()))
            .filter_map(|r| r.e_train.map(|e| e.method.as_str()))
            .collect();
        if methods.len() > 1 {
            warnings.push(format!(
                "e_train mixes methods ({}); estimates and measurements are not directly comparable",
                methods.into_iter().collect::<Vec<_>>().join(", ")
            ));
        }
    }

    let front = pareto_front(&points)?;
    let spec = ReportSpec::for_objectives(
        objectives.iter().map(Objective::axis_label).collect(),
        objectives.iter().map(Objective::decimals).collect(),
    );
    let mut files = vec![
        ("report.csv", emit_front_table(&front, &points, &spec)?),
        ("front.json", emit_front_json(&front, &points, &spec)?),
    ];
    if objectives.len() == 2 {
        files.push(("scatter.svg", emit_scatter(&front, &points, &spec)?));
    }
    let paths = write_outputs(&out_dir(g), &files, g.force, &[records_path])?;

    let names: Vec<String> = objectives.iter().map(ToString::to_string).collect();
    let mut stdout = format!(
        "objectives: {}\npoints: {}\noptimal: {}\n",
        names.join(", "),
        points.len(),
        front.optimal.join(", ")
    );
    for d in &front.dominated {
        stdout.push_str(&format!("dominated: {} (by {})\n", d.label, d.dominators.join(", ")));
    }
    wrote(&mut stdout, &paths);
    Ok(Outcome { stdout, warnings })
}

const MAX_GAP_WARNINGS: usize = 5;

pub fn ingest(trace_path: &Path, extrapolate: Option<(&Path, u64)>, gap_threshold: f64) -> Result<Outcome> {
    let trace = parse_trace(&read(trace_path)?)?;
    let total = integrate_trace(&trace)?;
    let (first, last) = trace.span().expect("integrated traces are non-empty");
    let gaps = find_gaps(&trace, gap_threshold);
    let mut warnings: Vec<String> = gaps
        .iter()
        .take(MAX_GAP_WARNINGS)
        .map(|gap| {
            format!(
                "gap of {} s before sample {} ({} s to {} s)",
                gap.duration_s(),
                gap.index,
                gap.start_s,
                gap.end_s
            )
        })
        .collect();
    if gaps.len() > MAX_GAP_WARNINGS {
        warnings.push(format!("{} more gap(s) above {gap_threshold} s", gaps.len() - MAX_GAP_WARNINGS));
    }
    let mut stdout = format!(
        "samples: {}\nspan_s: {first} .. {last}\nintegrated_wh: {}\nintegrated_kwh: {}\n",
        trace.len(),
        format_decimal(total.wh(), Some(6)),
        format_decimal(total.kwh, Some(9)),
    );
    if let Some((marks_path, total_epochs)) = extrapolate {
        let marks = parse_marks(&read(marks_path)?)?;
        let segments = segment_energies_kwh(&trace, &marks)?;
        for (m, (epochs, kwh)) in marks.iter().zip(&segments) {
            stdout.push_str(&format!(
                "segment from epoch {} ({} epoch(s)): {} kWh\n",
                m.epoch_index,
                epochs,
                format_decimal(*kwh, Some(6))
            ));
        }
        let completed: u64 = segments.iter().map(|s| s.0).sum();
        let e = extrapolate_training(&trace, &marks, total_epochs)?;
        stdout.push_str(&format!(
            "completed_epochs: {completed}\ntotal_epochs: {total_epochs}\nextrapolated_kwh: {}\nmethod: {}\n",
            format_decimal(e.kwh, Some(6)),
            e.method
        ));
    }
    Ok(Outcome { stdout, warnings })
}

pub fn flops(g: &GlobalArgs, stack_path: &Path, input_shape: &str) -> Result<Outcome> {
    let layers = parse_stack(&read(stack_path)?)?;
    let input: TensorShape = input_shape.parse()?;
    let totals = stack_totals(&layers, &input, MacFactor::from_factor(g.mac_factor)?)?;
    let mut stdout = String::from("layer,kind,output_shape,params,fpo\n");
    for (i, l) in totals.layers.iter().enumerate() {
        stdout.push_str(&format!("{i},{},\"{}\",{},{}\n", l.kind, l.output, l.params, l.fpo));
    }
    stdout.push_str(&format!(
        "total,,\"{}\",{},{}\n",
        totals.output(),
        totals.params,
        totals.fpo
    ));
    stdout.push_str(&format!(
        "# forward pass only; {} FPO per multiply-accumulate; activations not counted\n",
        g.mac_factor
    ));
    Ok(Outcome {
        stdout,
        warnings: Vec::new(),
    })
}

pub fn report(g: &GlobalArgs, records_path: &Path, table: TableKind) -> Result<Outcome> {
    let ds = Dataset::load(records_path, &catalog(g)?)?;
    let spec = match table {
        TableKind::TrainingCost => ReportSpec::training_cost_table(),
        TableKind::QualityEnergy => ReportSpec::quality_energy_table(),
        TableKind::Auto if ds.records.iter().any(|r| r.quality.is_some()) => ReportSpec::quality_energy_table(),
        TableKind::Auto => ReportSpec::training_cost_table(),
    };
    let mut stdout = emit_table(&ds.records, &spec)?;
    if let Some(dir) = &g.out {
        let paths = write_outputs(dir, &[("report.csv", stdout.clone())], g.force, &[records_path])?;
        stdout.push('\n');
        wrote(&mut stdout, &paths);
    }
    Ok(Outcome {
        stdout,
        warnings: Vec::new(),
    })
}
