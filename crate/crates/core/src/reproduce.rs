//! Recomputes the bundled score tables from the run datasets and diffs every
//! printed cell and aggregate row against the recomputation.
//!
//! Metrics are always recomputed from the canonical raw score in the run
//! datasets, in [`CapMode::TableCompat`]. Printed values are never patched;
//! disagreements land in the inconsistency log.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundled::{PrintedTableSource, PRINTED_AGGREGATES_CSV, PRINTED_TABLES};
use crate::dataset::{Dataset, MISSING};
use crate::game::GameId;
use crate::metrics::{format_efficiency, CapMode, MetricKind};
use crate::registry::Baselines;
use crate::report::{evaluate, EvaluationReport, GameCell, ReportError};

/// Printed percents carry two decimals.
pub const CELL_TOLERANCE_PP: f64 = 0.02;
pub const AGGREGATE_TOLERANCE_PP: f64 = 0.5;
// Absorbs binary representation error at the tolerance boundary.
const EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ReproduceError {
    #[error("printed table `{table}` is unreadable: {message}")]
    Fixture { table: String, message: String },
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InconsistencyKind {
    /// Recomputed percent differs from the printed one beyond tolerance.
    ValueMismatch,
    /// The printed percent is not a number.
    MalformedPrinted,
    /// The raw score printed in this table differs from the dataset's.
    RawConflict,
    /// Printed and dataset disagree on whether the game has a score.
    CoverageMismatch,
    /// A printed aggregate row differs from the recomputation.
    AggregateMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inconsistency {
    pub kind: InconsistencyKind,
    pub table: String,
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<AggregateRowKind>,
    pub printed: String,
    pub recomputed: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateRowKind {
    Mean,
    MeanEfficiency,
    Median,
    MedianEfficiency,
    Hwrb,
}

impl AggregateRowKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "mean" => Self::Mean,
            "mean_efficiency" => Self::MeanEfficiency,
            "median" => Self::Median,
            "median_efficiency" => Self::MedianEfficiency,
            "hwrb" => Self::Hwrb,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::MeanEfficiency => "mean_efficiency",
            Self::Median => "median",
            Self::MedianEfficiency => "median_efficiency",
            Self::Hwrb => "hwrb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCheck {
    pub table: String,
    pub metric: MetricKind,
    pub cells: usize,
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCheck {
    pub table: String,
    pub algorithm: String,
    pub row: AggregateRowKind,
    pub printed: String,
    /// Percent for mean/median, ratio per frame for efficiency, count for HWRB.
    pub recomputed: f64,
    pub pass: bool,
    /// No per-cell inconsistency was logged for this column of this table.
    pub column_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub cap_mode: CapMode,
    pub tables: Vec<TableCheck>,
    pub aggregates: Vec<AggregateCheck>,
    pub inconsistencies: Vec<Inconsistency>,
}

impl Reproduction {
    pub fn cells(&self) -> usize {
        self.tables.iter().map(|t| t.cells).sum()
    }

    pub fn matched(&self) -> usize {
        self.tables.iter().map(|t| t.matched).sum()
    }

    pub fn match_rate(&self) -> f64 {
        self.matched() as f64 / self.cells().max(1) as f64
    }

    pub fn aggregate(&self, table: &str, algorithm: &str, row: AggregateRowKind) -> Option<&AggregateCheck> {
        self.aggregates
            .iter()
            .find(|a| a.table == table && a.algorithm == algorithm && a.row == row)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reproduction serializes")
    }

    pub fn inconsistencies_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "table", "algorithm", "game", "row", "printed", "recomputed"])
            .expect("write to memory");
        for i in &self.inconsistencies {
            let kind = serde_json::to_value(i.kind).expect("kind serializes");
            w.write_record([
                kind.as_str().unwrap_or_default(),
                &i.table,
                &i.algorithm,
                i.game.map_or("", GameId::name),
                i.row.map_or("", AggregateRowKind::name),
                &i.printed,
                &i.recomputed,
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
    }
}

struct PrintedCell {
    algorithm: String,
    game: GameId,
    score: String,
    printed: String,
}

fn read_cells(source: &PrintedTableSource) -> Result<Vec<PrintedCell>, ReproduceError> {
    let fixture = |message: String| ReproduceError::Fixture {
        table: source.id.to_string(),
        message,
    };
    let mut reader = csv::Reader::from_reader(source.csv.as_bytes());
    let mut cells = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| fixture(e.to_string()))?;
        if row.len() != 4 {
            return Err(fixture(format!("expected 4 columns, found {}", row.len())));
        }
        cells.push(PrintedCell {
            algorithm: row[0].to_string(),
            game: GameId::parse(&row[1]).map_err(|e| fixture(e.to_string()))?,
            score: row[2].to_string(),
            printed: row[3].to_string(),
        });
    }
    Ok(cells)
}

fn percent(x: f64) -> String {
    format!("{:.4}", x * 100.0)
}

/// Diffs one printed table. Returns the table tally and appends to `log`.
fn check_table(
    source: &PrintedTableSource,
    report: &EvaluationReport,
    log: &mut Vec<Inconsistency>,
) -> Result<TableCheck, ReproduceError> {
    let mut check = TableCheck {
        table: source.id.to_string(),
        metric: source.metric,
        cells: 0,
        matched: 0,
    };
    for pc in read_cells(source)? {
        let canonical: Option<&GameCell> = report.cell(&pc.algorithm, pc.game);
        let mut entry = |kind, printed: &str, recomputed: String| {
            log.push(Inconsistency {
                kind,
                table: source.id.to_string(),
                algorithm: pc.algorithm.clone(),
                game: Some(pc.game),
                row: None,
                printed: printed.to_string(),
                recomputed,
            })
        };
        let printed_missing = pc.score == MISSING && pc.printed == MISSING;
        let Some(cell) = canonical else {
            if !printed_missing {
                check.cells += 1;
                entry(InconsistencyKind::CoverageMismatch, &pc.score, MISSING.to_string());
            }
            continue;
        };
        check.cells += 1;
        if printed_missing {
            entry(InconsistencyKind::CoverageMismatch, MISSING, cell.raw.to_string());
            continue;
        }
        if pc.score.parse::<f64>().ok() != Some(cell.raw) {
            entry(InconsistencyKind::RawConflict, &pc.score, cell.raw.to_string());
        }
        let value = cell.metric(source.metric).expect("table metric is per-game");
        match pc.printed.parse::<f64>() {
            Ok(p) if p.is_finite() => {
                if (value * 100.0 - p).abs() <= CELL_TOLERANCE_PP + EPS {
                    check.matched += 1;
                } else {
                    entry(InconsistencyKind::ValueMismatch, &pc.printed, percent(value));
                }
            }
            _ => entry(InconsistencyKind::MalformedPrinted, &pc.printed, percent(value)),
        }
    }
    Ok(check)
}

fn check_aggregates(
    report: &EvaluationReport,
    log: &mut Vec<Inconsistency>,
) -> Result<Vec<AggregateCheck>, ReproduceError> {
    let fixture = |message: String| ReproduceError::Fixture {
        table: "aggregates".to_string(),
        message,
    };
    let dirty: BTreeSet<(String, String)> = log
        .iter()
        .map(|i| (i.table.clone(), i.algorithm.clone()))
        .collect();
    let mut checks = Vec::new();
    let mut reader = csv::Reader::from_reader(PRINTED_AGGREGATES_CSV.as_bytes());
    for row in reader.records() {
        let row = row.map_err(|e| fixture(e.to_string()))?;
        let (table, algorithm, printed) = (&row[0], &row[1], &row[3]);
        let kind = AggregateRowKind::parse(&row[2])
            .ok_or_else(|| fixture(format!("unknown aggregate row `{}`", &row[2])))?;
        let metric = PRINTED_TABLES
            .iter()
            .find(|t| t.id == table)
            .ok_or_else(|| fixture(format!("unknown table `{table}`")))?
            .metric;
        let summary = report
            .summary(algorithm)
            .ok_or_else(|| fixture(format!("no run data for `{algorithm}`")))?;
        let agg = summary.row(metric).expect("report metric row");
        let hwrb = summary.row(MetricKind::Hwrns).and_then(|r| r.hwrb_count);

        let printed_value: Option<f64> = printed.parse().ok();
        let (recomputed, pass) = match kind {
            AggregateRowKind::Mean | AggregateRowKind::Median => {
                let v = if kind == AggregateRowKind::Mean { agg.mean } else { agg.median } * 100.0;
                let pass = printed_value.is_some_and(|p| (v - p).abs() <= AGGREGATE_TOLERANCE_PP + EPS);
                (v, pass)
            }
            AggregateRowKind::MeanEfficiency | AggregateRowKind::MedianEfficiency => {
                let v = if kind == AggregateRowKind::MeanEfficiency {
                    agg.efficiency_mean.value
                } else {
                    agg.efficiency_median.value
                };
                let pass = printed_value.is_some_and(|p| format_efficiency(p) == format_efficiency(v));
                (v, pass)
            }
            AggregateRowKind::Hwrb => {
                let n = hwrb.expect("HWRNS row carries a count") as f64;
                (n, printed_value == Some(n))
            }
        };
        if !pass {
            log.push(Inconsistency {
                kind: InconsistencyKind::AggregateMismatch,
                table: table.to_string(),
                algorithm: algorithm.to_string(),
                game: None,
                row: Some(kind),
                printed: printed.to_string(),
                recomputed: match kind {
                    AggregateRowKind::Mean | AggregateRowKind::Median => format!("{recomputed:.4}"),
                    AggregateRowKind::Hwrb => format!("{recomputed}"),
                    _ => format_efficiency(recomputed),
                },
            });
        }
        checks.push(AggregateCheck {
            table: table.to_string(),
            algorithm: algorithm.to_string(),
            row: kind,
            printed: printed.to_string(),
            recomputed,
            pass,
            column_consistent: !dirty.contains(&(table.to_string(), algorithm.to_string())),
        });
    }
    Ok(checks)
}

/// Recomputes every bundled printed table from `datasets`.
pub fn reproduce(datasets: &[Dataset], baselines: &Baselines) -> Result<Reproduction, ReproduceError> {
    let report = evaluate(datasets, baselines, CapMode::TableCompat)?;
    let mut log = Vec::new();
    let tables = PRINTED_TABLES
        .iter()
        .map(|t| check_table(t, &report, &mut log))
        .collect::<Result<Vec<_>, _>>()?;
    let aggregates = check_aggregates(&report, &mut log)?;
    Ok(Reproduction {
        cap_mode: CapMode::TableCompat,
        tables,
        aggregates,
        inconsistencies: log,
    })
}

pub fn reproduce_bundled() -> Result<Reproduction, ReproduceError> {
    reproduce(&Dataset::bundled_all(), &Baselines::bundled())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(name: &str) -> GameId {
        GameId::parse(name).unwrap()
    }

    #[test]
    fn bundled_tables_reproduce() {
        let r = reproduce_bundled().unwrap();
        assert_eq!(r.tables.len(), 12);
        assert_eq!(r.cells(), 3174);
        assert!(r.match_rate() >= 0.95, "{}", r.match_rate());
    }

    #[test]
    fn known_offenders_are_logged() {
        let r = reproduce_bundled().unwrap();
        assert!(r.inconsistencies.iter().any(|i| i.kind == InconsistencyKind::MalformedPrinted
            && i.algorithm == "NGU"
            && i.game == Some(g("gravitar"))
            && i.printed == "441/32"));
        assert!(r.inconsistencies.iter().any(|i| i.kind == InconsistencyKind::RawConflict
            && i.algorithm == "DreamerV2"
            && i.game == Some(g("fishing derby"))));
    }

    #[test]
    fn aggregate_rows() {
        let r = reproduce_bundled().unwrap();
        let mean = r.aggregate("hns_model_free_200m", "Rainbow", AggregateRowKind::Mean).unwrap();
        assert!(mean.pass);
        // The jamesbond cell is printed as 72.24 instead of 7224.25.
        assert!(!mean.column_consistent);
        let hwrb = r.aggregate("hwrns_model_free_200m", "GDI-H3", AggregateRowKind::Hwrb).unwrap();
        assert_eq!(hwrb.recomputed, 22.0);
        let eff = r
            .aggregate("hns_model_free_200m", "Rainbow", AggregateRowKind::MeanEfficiency)
            .unwrap();
        assert_eq!(format_efficiency(eff.recomputed), "4.37E-08");
    }

    #[test]
    fn csv_log_has_one_row_per_entry() {
        let r = reproduce_bundled().unwrap();
        assert_eq!(r.inconsistencies_csv().lines().count(), r.inconsistencies.len() + 1);
    }

    #[test]
    fn idempotent() {
        assert_eq!(reproduce_bundled().unwrap(), reproduce_bundled().unwrap());
    }
}
