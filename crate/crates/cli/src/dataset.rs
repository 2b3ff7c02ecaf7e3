//! The records file: one CSV row per evaluated configuration.
//!
//! Recognized columns are `label`, `hardware`, `gpu_count`,
//! `max_power_watts`, `train_hours`, `mos`, `quality_loss`, `e_train_kwh`,
//! `e_train_method`, `e_gen_wh`, `gen_workload` and `param_count`, plus any
//! number of `config_meta.<key>` and `metric.<name>` columns. Only `label`
//! and `hardware` are required. Empty cells mean "not reported".
//!
//! Hardware names resolve through the catalog unless the row supplies
//! `max_power_watts`, which then overrides the catalog.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use greeneval::catalog::Catalog;
use greeneval::quality::{normalize_mos, score_from_loss};
use greeneval::{validate_record, EnergyEstimate, EnergyMethod, HardwareSpec, RunRecord};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;

const KNOWN: [&str; 12] = [
    "label",
    "hardware",
    "gpu_count",
    "max_power_watts",
    "train_hours",
    "mos",
    "quality_loss",
    "e_train_kwh",
    "e_train_method",
    "e_gen_wh",
    "gen_workload",
    "param_count",
];
const META_PREFIX: &str = "config_meta.";
const METRIC_PREFIX: &str = "metric.";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetProvenance {
    pub path: PathBuf,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<RunRecord>,
    pub provenance: DatasetProvenance,
}

fn parse_err(line: usize, message: impl Into<String>) -> CliError {
    greeneval::Error::Parse {
        line,
        message: message.into(),
    }
    .into()
}

/// Catalog names closest to `name`, best first, one per device.
pub fn nearest_names(catalog: &Catalog, name: &str, n: usize) -> Vec<String> {
    let needle = name.trim().to_lowercase();
    let mut scored: Vec<(f64, &str)> = catalog
        .entries()
        .iter()
        .map(|e| {
            let best = std::iter::once(&e.name)
                .chain(&e.aliases)
                .map(|a| strsim::normalized_damerau_levenshtein(&needle, &a.to_lowercase()))
                .fold(0.0, f64::max);
            (best, e.name.as_str())
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored.into_iter().take(n).map(|(_, s)| s.to_string()).collect()
}

struct Row<'a> {
    line: usize,
    cells: HashMap<&'a str, &'a str>,
}

impl Row<'_> {
    fn get(&self, col: &str) -> Option<&str> {
        self.cells.get(col).copied().filter(|v| !v.is_empty())
    }

    fn num<T: std::str::FromStr>(&self, col: &str) -> Result<Option<T>> {
        self.get(col)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| parse_err(self.line, format!("{col}: {v:?} is not a valid number")))
            })
            .transpose()
    }
}

fn record_from_row(row: &Row<'_>, catalog: &Catalog) -> Result<RunRecord> {
    let line = row.line;
    let label = row.get("label").ok_or_else(|| parse_err(line, "label is empty"))?;
    let hw_name = row.get("hardware").ok_or_else(|| parse_err(line, "hardware is empty"))?;
    let count = row.num::<u32>("gpu_count")?.unwrap_or(1);
    let hardware = match row.num::<f64>("max_power_watts")? {
        Some(w) => HardwareSpec::new(hw_name, w, count)?,
        None => match catalog.lookup(hw_name) {
            Some(entry) => entry.hardware(count)?,
            None => {
                return Err(CliError::UnresolvedHardware {
                    line,
                    name: hw_name.to_string(),
                    nearest: nearest_names(catalog, hw_name, 3),
                })
            }
        },
    };
    let mut r = RunRecord::new(label, hardware);
    r.train_hours = row.num("train_hours")?;
    r.quality = match (row.num::<f64>("mos")?, row.num::<f64>("quality_loss")?) {
        (Some(_), Some(_)) => {
            return Err(parse_err(line, "give either mos or quality_loss, not both"));
        }
        (Some(m), None) => Some(normalize_mos(m)?),
        (None, Some(l)) => Some(score_from_loss(l)?),
        (None, None) => None,
    };
    let method = row
        .get("e_train_method")
        .map(|m| m.parse::<EnergyMethod>())
        .transpose()?;
    r.e_train = match (row.num::<f64>("e_train_kwh")?, method) {
        (Some(kwh), m) => Some(EnergyEstimate::new(
            kwh,
            m.unwrap_or(EnergyMethod::MeasuredIntegrated),
        )?),
        (None, Some(_)) => return Err(parse_err(line, "e_train_method given without e_train_kwh")),
        (None, None) => None,
    };
    r.e_gen_wh = row.num("e_gen_wh")?;
    r.gen_workload_desc = row.get("gen_workload").unwrap_or_default().to_string();
    r.param_count = row.num("param_count")?;
    for (&col, &v) in &row.cells {
        if v.is_empty() {
            continue;
        }
        if let Some(key) = col.strip_prefix(META_PREFIX) {
            r.config_meta.insert(key.to_string(), v.to_string());
        } else if let Some(name) = col.strip_prefix(METRIC_PREFIX) {
            r.metrics.insert(name.to_string(), row.num(col)?.unwrap_or_default());
        }
    }
    Ok(r)
}

impl Dataset {
    pub fn load(path: &Path, catalog: &Catalog) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&source, path, catalog)
    }

    /// Parses records; `path` is kept as provenance only.
    pub fn parse(source: &str, path: &Path, catalog: &Catalog) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(source.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        let mut seen = BTreeSet::new();
        for col in &header {
            let known = KNOWN.contains(&col)
                || col.strip_prefix(META_PREFIX).is_some_and(|k| !k.is_empty())
                || col.strip_prefix(METRIC_PREFIX).is_some_and(|k| !k.is_empty());
            if !known {
                return Err(parse_err(
                    1,
                    format!(
                        "unknown column {col:?} (expected {}, {META_PREFIX}*, {METRIC_PREFIX}*)",
                        KNOWN.join(", ")
                    ),
                ));
            }
            if !seen.insert(col) {
                return Err(parse_err(1, format!("column {col:?} appears twice")));
            }
        }
        for required in ["label", "hardware"] {
            if !seen.contains(required) {
                return Err(parse_err(1, format!("missing required column {required:?}")));
            }
        }

        let mut records = Vec::new();
        let mut first_line: HashMap<String, usize> = HashMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let row = Row {
                line,
                cells: header.iter().zip(rec.iter()).collect(),
            };
            let r = record_from_row(&row, catalog)?;
            if let Some(&first) = first_line.get(&r.label) {
                return Err(CliError::DuplicateLabel {
                    line,
                    label: r.label,
                    first,
                });
            }
            let violations = validate_record(&r);
            if !violations.is_empty() {
                return Err(CliError::InvalidRecord {
                    line,
                    label: r.label,
                    violations: violations.iter().map(ToString::to_string).collect(),
                });
            }
            first_line.insert(r.label.clone(), line);
            records.push(r);
        }
        Ok(Dataset {
            records,
            provenance: DatasetProvenance {
                path: path.to_path_buf(),
                format_version: FORMAT_VERSION,
            },
        })
    }

    /// Names of every `metric.*` value present on some record.
    pub fn metric_names(&self) -> BTreeSet<&str> {
        self.records
            .iter()
            .flat_map(|r| r.metrics.keys().map(String::as_str))
            .collect()
    }

    /// The records in the same file format, with `max_power_watts` spelled
    /// out so the file no longer depends on a catalog. Quality is written as
    /// `quality_loss`.
    pub fn to_csv(&self) -> String {
        let meta: BTreeSet<&str> = self
            .records
            .iter()
            .flat_map(|r| r.config_meta.keys().map(String::as_str))
            .collect();
        let metrics = self.metric_names();
        let mut w = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(Vec::new());
        let header: Vec<String> = [
            "label",
            "hardware",
            "gpu_count",
            "max_power_watts",
            "train_hours",
            "quality_loss",
            "e_train_kwh",
            "e_train_method",
            "e_gen_wh",
            "gen_workload",
            "param_count",
        ]
        .iter()
        .map(|s| s.to_string())
        .chain(meta.iter().map(|k| format!("{META_PREFIX}{k}")))
        .chain(metrics.iter().map(|k| format!("{METRIC_PREFIX}{k}")))
        .collect();
        w.write_record(&header).expect("in-memory write");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let mut row = vec![
                r.label.clone(),
                r.hardware.name.clone(),
                r.hardware.count.to_string(),
                r.hardware.max_power_watts.to_string(),
                opt(r.train_hours),
                opt(r.quality.map(|q| q.normalized_loss)),
                opt(r.e_train_kwh()),
                r.e_train.map(|e| e.method.to_string()).unwrap_or_default(),
                opt(r.e_gen_wh),
                r.gen_workload_desc.clone(),
                r.param_count.map(|p| p.to_string()).unwrap_or_default(),
            ];
            row.extend(meta.iter().map(|k| r.config_meta.get(*k).cloned().unwrap_or_default()));
            row.extend(metrics.iter().map(|k| opt(r.metrics.get(*k).copied())));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}
