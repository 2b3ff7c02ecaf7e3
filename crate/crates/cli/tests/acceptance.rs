//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Criteria run one at a time so each timing is its own.

#[path = "../../core/tests/support/fpo_oracle.rs"]
mod fpo_oracle;
#[path = "../../core/tests/support/pareto_oracle.rs"]
mod pareto_oracle;
#[path = "../../core/tests/support/trace_oracle.rs"]
mod trace_oracle;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use greeneval::energy::{estimate_vs_measured, worst_case_kwh};
use greeneval::flops::{layer_fpo_with, MacFactor};
use greeneval::ingest::integrate_trace;
use greeneval::quality::{denormalize, normalize_mos};
use greeneval::report::format_decimal;
use greeneval::{EnergyEstimate, EnergyMethod, HardwareSpec, PowerTrace};
use tempfile::TempDir;

type Check = Result<String, String>;

/// Name, optional time budget, check.
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn cli(args: &[&Path]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_greeneval"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(String::from_utf8_lossy(&o.stderr).trim().to_string());
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn column(csv_text: &str, name: &str) -> Result<Vec<String>, String> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let idx = headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| format!("no column {name}"))?;
    rdr.records()
        .map(|r| r.map(|r| r[idx].to_string()).map_err(|e| e.to_string()))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table1() -> Check {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    cli(&[Path::new("estimate"), &fixture("table1.csv"), Path::new("--out"), dir.path()])?;
    let records = fs::read_to_string(dir.path().join("records.csv")).map_err(|e| e.to_string())?;
    let labels = column(&records, "label")?;
    let kwh = column(&records, "e_train_kwh")?;
    let want = [
        ("FloWaveNet", "81.600"),
        ("GANSynth", "32.400"),
        ("SampleRNN", "42.000"),
        ("SING", "52.000"),
        ("WaveGAN", "24.000"),
    ];
    let got: Vec<(String, String)> = labels
        .into_iter()
        .zip(kwh)
        .map(|(l, v)| (l, format_decimal(v.parse().unwrap_or(f64::NAN), Some(3))))
        .collect();
    let want: Vec<(String, String)> = want.iter().map(|(l, v)| (l.to_string(), v.to_string())).collect();
    ensure(got == want, || format!("got {got:?}"))?;
    Ok(got.iter().map(|(l, v)| format!("{l} {v}")).collect::<Vec<_>>().join(", "))
}

fn front_of(objectives: &str) -> Result<serde_json::Value, String> {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    cli(&[
        Path::new("pareto"),
        &fixture("table2.csv"),
        Path::new("--objectives"),
        Path::new(objectives),
        Path::new("--out"),
        dir.path(),
    ])?;
    let text = fs::read_to_string(dir.path().join("front.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn table2_training() -> Check {
    let front = front_of("quality_loss,e_train")?;
    let want_opt = serde_json::json!(["WF1", "WF2", "WF4", "WF5"]);
    let want_dom = serde_json::json!([{"label": "WF3", "dominators": ["WF4"]}]);
    ensure(front["optimal"] == want_opt && front["dominated"] == want_dom, || {
        format!("optimal {}, dominated {}", front["optimal"], front["dominated"])
    })?;
    Ok("optimal WF1 WF2 WF4 WF5; WF3 dominated by [WF4]".into())
}

fn table2_generation() -> Check {
    let front = front_of("quality_loss,e_gen")?;
    let want_opt = serde_json::json!(["WF1", "WF2", "WF3", "WF4", "WF5"]);
    ensure(front["optimal"] == want_opt && front["dominated"] == serde_json::json!([]), || {
        format!("optimal {}, dominated {}", front["optimal"], front["dominated"])
    })?;
    Ok("all five optimal, dominated set empty".into())
}

fn mos_normalization() -> Check {
    for loss in [0.148, 0.136, 0.132, 0.124, 0.114] {
        let mos = denormalize(loss).map_err(|e| e.to_string())?;
        let back = normalize_mos(mos).map_err(|e| e.to_string())?.normalized_loss;
        ensure((back - loss).abs() <= 1e-12, || format!("{loss} -> {mos} -> {back}"))?;
    }
    let top = normalize_mos(5.0).map_err(|e| e.to_string())?.normalized_loss;
    let bottom = normalize_mos(1.0).map_err(|e| e.to_string())?.normalized_loss;
    ensure(top == 0.0 && bottom == 0.8, || format!("mos 5 -> {top}, mos 1 -> {bottom}"))?;
    Ok("5 losses round-trip within 1e-12; mos 5 -> 0, mos 1 -> 0.8 exactly".into())
}

fn sing_comparison() -> Check {
    let hw = HardwareSpec::new("P100", 250.0, 4).map_err(|e| e.to_string())?;
    let est = worst_case_kwh(&hw, 52.0).map_err(|e| e.to_string())?;
    let measured = EnergyEstimate::new(64.8, EnergyMethod::MeasuredExtrapolated).map_err(|e| e.to_string())?;
    let c = estimate_vs_measured(&est, &measured);
    let pct = c.relative.ok_or("no relative difference")? * 100.0;
    ensure((c.delta_kwh - 12.8).abs() < 1e-9 && (pct - 24.62).abs() <= 0.01, || {
        format!("delta {} kWh, relative {pct}%", c.delta_kwh)
    })?;

    let dir = TempDir::new().map_err(|e| e.to_string())?;
    cli(&[Path::new("estimate"), &fixture("sing_measured.csv"), Path::new("--out"), dir.path()])?;
    let cmp = fs::read_to_string(dir.path().join("comparison.csv")).map_err(|e| e.to_string())?;
    let delta = column(&cmp, "delta_kwh")?;
    let rel = column(&cmp, "relative_pct")?;
    ensure(delta == ["+12.800"] && rel == ["+24.62"], || format!("cli reported {delta:?}, {rel:?}"))?;
    Ok(format!("delta +{:.3} kWh, relative +{pct:.4}%", c.delta_kwh))
}

fn pareto_oracle_suite() -> Check {
    let mut sizes = 0;
    for idx in 0..200 {
        let raw = pareto_oracle::random_instance(2024, idx);
        sizes += raw.len();
        pareto_oracle::check_instance(&raw).map_err(|e| format!("instance {idx}: {e}"))?;
    }
    let chained = pareto_oracle::check_order_laws(2024, 10_000, 10_000)?;
    Ok(format!(
        "200 instances ({sizes} points) equal brute force; 10000 pairs, 10000 triples ({chained} chained)"
    ))
}

fn integration_oracle() -> Check {
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let samples = trace_oracle::random_trace(seed);
        let trace = PowerTrace::new(samples.clone()).map_err(|e| e.to_string())?;
        let got = integrate_trace(&trace).map_err(|e| e.to_string())?.wh();
        let want = trace_oracle::riemann_wh(&samples, 100);
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-9, || format!("trace {seed}: {got} vs {want}"))?;
    }
    let constant = PowerTrace::new(vec![(0.0, 250.0), (7200.0, 250.0)]).map_err(|e| e.to_string())?;
    let wh = integrate_trace(&constant).map_err(|e| e.to_string())?.wh();
    ensure(wh == 500.0, || format!("constant trace gave {wh} Wh"))?;
    let printed = cli(&[Path::new("ingest"), &fixture("constant_250w.csv")])?;
    ensure(printed.contains("integrated_wh: 500.000000\n"), || printed.clone())?;
    Ok(format!("100 traces, worst relative error {worst:.1e}; 250 W x 2 h = 500 Wh"))
}

fn fpo_oracle_sweep() -> Check {
    let mut cases = 0u64;
    let mut failure = None;
    fpo_oracle::exhaustive_cases(|layer, input| {
        cases += 1;
        if failure.is_some() {
            return;
        }
        let oracle = fpo_oracle::count(layer, input);
        for mac in [MacFactor::Two, MacFactor::One] {
            let got = layer_fpo_with(layer, input, mac).ok();
            if got != oracle.map(|c| c.fpo(mac)) {
                failure = Some(format!("{layer:?} on {input} ({mac:?}): {got:?}"));
            }
        }
    });
    match failure {
        Some(f) => Err(f),
        None => Ok(format!("{cases} layer/input cases, MAC factors 1 and 2")),
    }
}

fn determinism() -> Check {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = TempDir::new().map_err(|e| e.to_string())?;
        cli(&[Path::new("pareto"), &fixture("table2.csv"), Path::new("--out"), dir.path()])?;
        let files: Result<Vec<Vec<u8>>, String> = ["report.csv", "front.json", "scatter.svg"]
            .iter()
            .map(|f| fs::read(dir.path().join(f)).map_err(|e| format!("{f}: {e}")))
            .collect();
        runs.push(files?);
    }
    ensure(runs[0] == runs[1], || "outputs differ between runs".into())?;
    Ok("report.csv, front.json, scatter.svg byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Worst-case training energy", Some(Duration::from_secs(1)), table1),
        ("Front over quality and training energy", Some(Duration::from_secs(1)), table2_training),
        ("Front over quality and generation energy", Some(Duration::from_secs(1)), table2_generation),
        ("MOS normalization", None, mos_normalization),
        ("SING measured vs estimated", None, sing_comparison),
        ("Pareto oracle property suite", Some(Duration::from_secs(60)), pareto_oracle_suite),
        ("Integration oracle", None, integration_oracle),
        ("FPO oracle", Some(Duration::from_secs(30)), fpo_oracle_sweep),
        ("Determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, budget) {
            if elapsed >= *limit {
                result = Err(format!("took {elapsed:.2?}, budget {limit:?}"));
            }
        }
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {}. {name} ({elapsed:.2?}): {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
