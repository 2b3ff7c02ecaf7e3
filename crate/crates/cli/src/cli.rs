use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "greeneval", version, about = "Energy-aware evaluation of generative models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Hardware catalog (TOML) replacing the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    pub catalog: Option<PathBuf>,
    /// Output directory for written artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Floating-point operations per multiply-accumulate.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub mac_factor: u8,
    /// Comma-separated objectives for `pareto`.
    #[arg(long, global = true, value_name = "LIST")]
    pub objectives: Option<String>,
    /// Skip records lacking a selected objective instead of failing.
    #[arg(long, global = true)]
    pub exclude_incomplete: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fill worst-case training energy from hardware and hours.
    Estimate {
        records: PathBuf,
    },
    /// Classify records into Pareto-optimal and dominated.
    Pareto {
        records: PathBuf,
    },
    /// Integrate a power trace and optionally extrapolate to full training.
    Ingest {
        trace: PathBuf,
        /// Epoch boundary marks (epoch_index,t_seconds).
        #[arg(long, requires = "total_epochs")]
        marks: Option<PathBuf>,
        #[arg(long, requires = "marks")]
        total_epochs: Option<u64>,
        /// Sample spacing above which a gap is reported, in seconds.
        #[arg(long, default_value_t = greeneval::ingest::DEFAULT_GAP_THRESHOLD_S)]
        gap_threshold: f64,
    },
    /// Count parameters and floating-point operations of a layer stack.
    Flops {
        stack: PathBuf,
        /// Input tensor shape, e.g. `1,22050` or `3x32x32`.
        #[arg(long)]
        input_shape: String,
    },
    /// Print a records table.
    Report {
        records: PathBuf,
        #[arg(long, value_enum, default_value_t = TableKind::Auto)]
        table: TableKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// `quality-energy` when any record reports quality, else `training-cost`.
    Auto,
    TrainingCost,
    QualityEnergy,
}
