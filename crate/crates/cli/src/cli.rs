use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hwrbench::metrics::{CapMode, MetricKind};
use hwrbench::protocol::DEFAULT_BUDGET;
use hwrbench::report::{Figure, TableFormat};

/// Score Atari 57 results against human world records.
#[derive(Debug, Parser)]
#[command(name = "hwrbench", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Baseline table (CSV). Defaults to the bundled table.
    #[arg(long, global = true, env = "HWRBENCH_BASELINES")]
    pub baselines: Option<PathBuf>,

    /// Run dataset: a CSV path or a bundled name. Repeatable; defaults to
    /// every bundled dataset.
    #[arg(
        long = "dataset",
        global = true,
        env = "HWRBENCH_DATASET",
        value_delimiter = ','
    )]
    pub datasets: Vec<String>,

    /// How SABER treats negative HWRNS.
    #[arg(long, global = true, env = "HWRBENCH_CAP_MODE", default_value_t = CapMode::SpecFloor)]
    pub cap_mode: CapMode,

    #[arg(long, global = true, env = "HWRBENCH_FORMAT", value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,

    /// Write results here instead of stdout. For `reproduce`, a directory.
    #[arg(long, global = true, env = "HWRBENCH_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn table_format(self) -> TableFormat {
        match self {
            OutputFormat::Csv => TableFormat::Csv,
            _ => TableFormat::Text,
        }
    }
}

fn frames_arg(s: &str) -> Result<u64, String> {
    hwrbench::parse_frames(s).ok_or_else(|| format!("`{s}` is not a whole frame count"))
}

fn score_arg(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{s}` is not a finite number"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check baseline and dataset integrity.
    Validate,
    /// Normalize one raw score.
    Score {
        #[arg(long)]
        game: String,
        #[arg(long, allow_hyphen_values = true, value_parser = score_arg)]
        score: f64,
        /// Training frames; scientific notation such as 2e8 is accepted.
        #[arg(long, value_parser = frames_arg, default_value_t = DEFAULT_BUDGET)]
        frames: u64,
    },
    /// Mean, median, HWRB and learning efficiency per algorithm.
    Aggregate {
        /// Restrict to one metric.
        #[arg(long)]
        metric: Option<MetricKind>,
    },
    /// Render a score table, the full machine report, or figure series.
    Report {
        #[arg(long, default_value_t = MetricKind::Hns)]
        metric: MetricKind,
        /// Columns to show, in order. Defaults to all.
        #[arg(long, value_delimiter = ',')]
        algorithms: Vec<String>,
        /// metric-vs-scale[:kind], hwrb-vs-gametime or efficiency[:kind].
        #[arg(long)]
        figure: Option<Figure>,
    },
    /// Check an episode log against the evaluation protocol.
    ProtocolCheck {
        #[arg(long)]
        log: PathBuf,
        /// Episodes averaged for the training score.
        #[arg(long, env = "HWRBENCH_K", default_value_t = 1)]
        k: usize,
        #[arg(long, env = "HWRBENCH_BUDGET", value_parser = frames_arg, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Overrides the log's `action_set` declaration.
        #[arg(long)]
        action_set: Option<u32>,
        /// With --algorithm, also emit the run record.
        #[arg(long, requires = "algorithm")]
        game: Option<String>,
        #[arg(long, requires = "game")]
        algorithm: Option<String>,
    },
    /// Per-game head-to-head of two algorithms.
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = MetricKind::Hns)]
        metric: MetricKind,
    },
    /// Recompute the bundled score tables and log every disagreement.
    Reproduce,
}
