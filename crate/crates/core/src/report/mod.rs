//! Full evaluation of one or more datasets: per-game metrics, aggregate rows,
//! leaders and coverage, plus table and plot-series rendering.

mod plot;
mod table;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{aggregate, per_game_leader, AggregateRow, AggregationError, MetricColumn};
use crate::dataset::{Dataset, RunRecord};
use crate::game::GameId;
use crate::metrics::{self, game_time_days, CapMode, MetricError, MetricKind, MetricValue};
use crate::registry::Baselines;

pub use plot::{emit_plot_series, Figure, PlotPoint, PlotSeries};
pub use table::{render_table, tabulate, TableFormat, TableLayout};

/// Metrics computed for every cell, in output order.
pub const REPORT_METRICS: [MetricKind; 4] = [
    MetricKind::Hns,
    MetricKind::Chns,
    MetricKind::Hwrns,
    MetricKind::Saber,
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no datasets to evaluate")]
    NoDatasets,
    #[error("dataset `{0}` has no scored rows")]
    EmptyDataset(String),
    #[error("({algorithm}, {game}) appears in more than one dataset")]
    DuplicateRecord { algorithm: String, game: GameId },
    #[error("{algorithm} records disagree on training frames ({first} vs {other})")]
    InconsistentFrames {
        algorithm: String,
        first: u64,
        other: u64,
    },
    #[error("{algorithm} {game}: {source}")]
    Metric {
        algorithm: String,
        game: GameId,
        source: MetricError,
    },
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
    #[error("table layout selects no algorithms")]
    EmptyLayout,
    #[error("algorithm `{0}` is not in the report")]
    UnknownAlgorithm(String),
    #[error("{0} is not a per-game metric of the report")]
    UnsupportedMetric(MetricKind),
    #[error("machine report is malformed: {0}")]
    Parse(String),
}

/// All metrics of one (algorithm, game) cell. Ratios, 1.0 = 100%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameCell {
    pub algorithm: String,
    pub game: GameId,
    pub raw: f64,
    pub frames: u64,
    pub hns: f64,
    pub chns: f64,
    pub hwrns: f64,
    pub saber: f64,
    pub hwrb: bool,
}

impl GameCell {
    pub fn compute(
        record: &RunRecord,
        baselines: &Baselines,
        cap_mode: CapMode,
    ) -> Result<GameCell, MetricError> {
        let baseline = baselines.lookup(record.game);
        let hns = metrics::hns(record.score, baseline)?;
        let hwrns = metrics::hwrns(record.score, baseline)?;
        Ok(GameCell {
            algorithm: record.algorithm.clone(),
            game: record.game,
            raw: record.score,
            frames: record.frames,
            hns: hns.value(),
            chns: metrics::chns(hns)?.value(),
            hwrns: hwrns.value(),
            saber: metrics::saber(hwrns, cap_mode)?.value(),
            hwrb: metrics::hwrb_indicator(hwrns)?,
        })
    }

    pub fn metric(&self, kind: MetricKind) -> Option<f64> {
        match kind {
            MetricKind::Raw => Some(self.raw),
            MetricKind::Hns => Some(self.hns),
            MetricKind::Chns => Some(self.chns),
            MetricKind::Hwrns => Some(self.hwrns),
            MetricKind::Saber => Some(self.saber),
            MetricKind::MinMax => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub frames: u64,
    pub scale_label: String,
    pub game_time_days: f64,
    pub rows: Vec<AggregateRow>,
}

impl AlgorithmSummary {
    pub fn row(&self, kind: MetricKind) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameLeaders {
    pub game: GameId,
    pub leaders: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub algorithm: String,
    pub present: usize,
    pub missing: Vec<GameId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub cap_mode: CapMode,
    pub baseline_provenance: String,
    pub datasets: Vec<String>,
    pub per_game: Vec<GameCell>,
    pub aggregates: Vec<AlgorithmSummary>,
    pub leaders: Vec<GameLeaders>,
    pub coverage: Vec<Coverage>,
}

/// Computes the report. Pure: the same inputs give the same report.
pub fn evaluate(
    datasets: &[Dataset],
    baselines: &Baselines,
    cap_mode: CapMode,
) -> Result<EvaluationReport, ReportError> {
    if datasets.is_empty() {
        return Err(ReportError::NoDatasets);
    }
    let mut algorithms: Vec<String> = Vec::new();
    let mut frames: BTreeMap<&str, (u64, &str)> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    let mut per_game = Vec::new();

    for ds in datasets {
        if ds.records.is_empty() {
            return Err(ReportError::EmptyDataset(ds.label.clone()));
        }
        for name in ds.algorithms() {
            if !algorithms.iter().any(|a| a == name) {
                algorithms.push(name.to_string());
            }
        }
        for rec in &ds.records {
            if !seen.insert((rec.algorithm.as_str(), rec.game)) {
                return Err(ReportError::DuplicateRecord {
                    algorithm: rec.algorithm.clone(),
                    game: rec.game,
                });
            }
            let (first, _) = *frames
                .entry(rec.algorithm.as_str())
                .or_insert((rec.frames, rec.scale_label.as_str()));
            if first != rec.frames {
                return Err(ReportError::InconsistentFrames {
                    algorithm: rec.algorithm.clone(),
                    first,
                    other: rec.frames,
                });
            }
            let cell = GameCell::compute(rec, baselines, cap_mode).map_err(|source| {
                ReportError::Metric {
                    algorithm: rec.algorithm.clone(),
                    game: rec.game,
                    source,
                }
            })?;
            per_game.push(cell);
        }
    }
    per_game.sort_by(|a, b| {
        let pos = |name: &str| algorithms.iter().position(|x| x == name);
        a.game
            .cmp(&b.game)
            .then(pos(&a.algorithm).cmp(&pos(&b.algorithm)))
    });
    // Algorithms present only as N/A rows have nothing to aggregate.
    algorithms.retain(|a| frames.contains_key(a.as_str()));

    let mut aggregates = Vec::new();
    let mut coverage = Vec::new();
    for alg in &algorithms {
        let (alg_frames, label) = frames[alg.as_str()];
        let mut rows = Vec::new();
        for kind in REPORT_METRICS {
            rows.push(aggregate(&column(&per_game, alg, kind, cap_mode)?, alg_frames)?);
        }
        aggregates.push(AlgorithmSummary {
            algorithm: alg.clone(),
            frames: alg_frames,
            scale_label: label.to_string(),
            game_time_days: game_time_days(alg_frames),
            rows,
        });
        let present: BTreeSet<GameId> = per_game
            .iter()
            .filter(|c| &c.algorithm == alg)
            .map(|c| c.game)
            .collect();
        coverage.push(Coverage {
            algorithm: alg.clone(),
            present: present.len(),
            missing: GameId::all().filter(|g| !present.contains(g)).collect(),
        });
    }

    let names: Vec<&str> = algorithms.iter().map(String::as_str).collect();
    let leaders = leaders_among(&per_game, &names)?;

    Ok(EvaluationReport {
        cap_mode,
        baseline_provenance: baselines.provenance().to_string(),
        datasets: datasets.iter().map(|d| d.label.clone()).collect(),
        per_game,
        aggregates,
        leaders,
        coverage,
    })
}

/// One algorithm's values of `kind` as an aggregation column.
fn column(
    cells: &[GameCell],
    algorithm: &str,
    kind: MetricKind,
    cap_mode: CapMode,
) -> Result<MetricColumn, ReportError> {
    let mut col = MetricColumn::new(algorithm, kind);
    for cell in cells.iter().filter(|c| c.algorithm == algorithm) {
        let value = cell.metric(kind).ok_or(ReportError::UnsupportedMetric(kind))?;
        let wrap = |source| ReportError::Metric {
            algorithm: algorithm.to_string(),
            game: cell.game,
            source,
        };
        let mv = match kind {
            MetricKind::Chns => {
                metrics::chns(MetricValue::hns(cell.hns).map_err(wrap)?).map_err(wrap)?
            }
            MetricKind::Saber => metrics::saber(MetricValue::hwrns(cell.hwrns).map_err(wrap)?, cap_mode)
                .map_err(wrap)?,
            _ => MetricValue::uncapped(value, kind).map_err(wrap)?,
        };
        col.insert(cell.game, mv)?;
    }
    Ok(col)
}

/// Per-game leaders by raw score among `algorithms`. Normalization is
/// strictly increasing per game, so the same set leads on every metric.
fn leaders_among(cells: &[GameCell], algorithms: &[&str]) -> Result<Vec<GameLeaders>, ReportError> {
    let mut columns = Vec::new();
    for alg in algorithms {
        let mut col = MetricColumn::new(*alg, MetricKind::Raw);
        for cell in cells.iter().filter(|c| c.algorithm == *alg) {
            let wrap = |source| ReportError::Metric {
                algorithm: alg.to_string(),
                game: cell.game,
                source,
            };
            col.insert(cell.game, MetricValue::uncapped(cell.raw, MetricKind::Raw).map_err(wrap)?)?;
        }
        columns.push(col);
    }
    let games: BTreeSet<GameId> = cells
        .iter()
        .filter(|c| algorithms.contains(&c.algorithm.as_str()))
        .map(|c| c.game)
        .collect();
    games
        .into_iter()
        .map(|game| {
            Ok(GameLeaders {
                game,
                leaders: per_game_leader(&columns, game)?,
            })
        })
        .collect()
}

pub const PER_GAME_HEADER: [&str; 9] = [
    "algorithm", "game", "raw", "frames", "hns", "chns", "hwrns", "saber", "hwrb",
];

impl EvaluationReport {
    pub fn algorithms(&self) -> Vec<&str> {
        self.aggregates.iter().map(|a| a.algorithm.as_str()).collect()
    }

    pub fn summary(&self, algorithm: &str) -> Option<&AlgorithmSummary> {
        self.aggregates.iter().find(|a| a.algorithm == algorithm)
    }

    pub fn cell(&self, algorithm: &str, game: GameId) -> Option<&GameCell> {
        self.per_game
            .iter()
            .find(|c| c.algorithm == algorithm && c.game == game)
    }

    pub fn leaders(&self, game: GameId) -> &[String] {
        self.leaders
            .iter()
            .find(|l| l.game == game)
            .map_or(&[], |l| l.leaders.as_slice())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<EvaluationReport, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))
    }

    /// Per-game cells at full precision, one row per cell.
    pub fn per_game_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(PER_GAME_HEADER).expect("write to memory");
        for c in &self.per_game {
            w.write_record([
                c.algorithm.clone(),
                c.game.to_string(),
                c.raw.to_string(),
                c.frames.to_string(),
                c.hns.to_string(),
                c.chns.to_string(),
                c.hwrns.to_string(),
                c.saber.to_string(),
                c.hwrb.to_string(),
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
    }
}

/// Reads cells written by [`EvaluationReport::per_game_csv`].
pub fn parse_per_game_csv(text: &str) -> Result<Vec<GameCell>, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| ReportError::Parse(e.to_string()))?;
    if header.iter().ne(PER_GAME_HEADER.iter().copied()) {
        return Err(ReportError::Parse(format!("unexpected header {header:?}")));
    }
    let mut cells = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| ReportError::Parse(e.to_string()))?;
        let num = |i: usize| -> Result<f64, ReportError> {
            row[i]
                .parse()
                .map_err(|_| ReportError::Parse(format!("`{}` is not a number", &row[i])))
        };
        cells.push(GameCell {
            algorithm: row[0].to_string(),
            game: GameId::parse(&row[1]).map_err(|e| ReportError::Parse(e.to_string()))?,
            raw: num(2)?,
            frames: row[3]
                .parse()
                .map_err(|_| ReportError::Parse(format!("`{}` is not a frame count", &row[3])))?,
            hns: num(4)?,
            chns: num(5)?,
            hwrns: num(6)?,
            saber: num(7)?,
            hwrb: row[8]
                .parse()
                .map_err(|_| ReportError::Parse(format!("`{}` is not a boolean", &row[8])))?,
        });
    }
    Ok(cells)
}
