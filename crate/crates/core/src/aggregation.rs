//! Aggregate rows over one algorithm's per-game metrics, and per-game leaders.
//!
//! Absent games (N/A in the source data) are skipped. Coverage is always
//! reported next to the mean so that partial columns are visible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameId, GAME_COUNT};
use crate::metrics::{learning_efficiency, CapMode, EfficiencyValue, MetricError, MetricKind, MetricValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregationError {
    #[error("column `{0}` has no present entries")]
    EmptyColumn(String),
    #[error("column `{algorithm}` holds {expected} values, cannot add {found}")]
    MixedKinds {
        algorithm: String,
        expected: MetricKind,
        found: MetricKind,
    },
    #[error("column `{algorithm}` mixes cap modes")]
    MixedCapModes { algorithm: String },
    #[error("HWRB needs an HWRNS column, `{algorithm}` holds {found}")]
    NotHwrns { algorithm: String, found: MetricKind },
    #[error("{0} is absent from every column")]
    GameAbsent(GameId),
    #[error("leader comparison across different metrics ({0} vs {1})")]
    IncomparableColumns(MetricKind, MetricKind),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// One algorithm's values for one metric, keyed by game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricColumn {
    algorithm: String,
    kind: MetricKind,
    cap_mode: Option<CapMode>,
    entries: BTreeMap<GameId, MetricValue>,
}

impl MetricColumn {
    pub fn new(algorithm: impl Into<String>, kind: MetricKind) -> Self {
        MetricColumn {
            algorithm: algorithm.into(),
            kind,
            cap_mode: None,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, game: GameId, value: MetricValue) -> Result<(), AggregationError> {
        if value.kind() != self.kind {
            return Err(AggregationError::MixedKinds {
                algorithm: self.algorithm.clone(),
                expected: self.kind,
                found: value.kind(),
            });
        }
        if self.entries.is_empty() {
            self.cap_mode = value.cap_mode();
        } else if self.cap_mode != value.cap_mode() {
            return Err(AggregationError::MixedCapModes {
                algorithm: self.algorithm.clone(),
            });
        }
        self.entries.insert(game, value);
        Ok(())
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn cap_mode(&self) -> Option<CapMode> {
        self.cap_mode
    }

    pub fn get(&self, game: GameId) -> Option<&MetricValue> {
        self.entries.get(&game)
    }

    pub fn entries(&self) -> impl Iterator<Item = (GameId, &MetricValue)> {
        self.entries.iter().map(|(g, v)| (*g, v))
    }

    pub fn coverage(&self) -> usize {
        self.entries.len()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.values().map(MetricValue::value).collect()
    }

    fn non_empty_values(&self) -> Result<Vec<f64>, AggregationError> {
        if self.entries.is_empty() {
            Err(AggregationError::EmptyColumn(self.algorithm.clone()))
        } else {
            Ok(self.values())
        }
    }
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Middle order statistic; midpoint of the two central values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSummary {
    pub mean: f64,
    pub coverage: usize,
}

pub fn mean_metric(col: &MetricColumn) -> Result<MeanSummary, AggregationError> {
    let values = col.non_empty_values()?;
    Ok(MeanSummary {
        mean: mean(&values).expect("non-empty"),
        coverage: values.len(),
    })
}

pub fn median_metric(col: &MetricColumn) -> Result<f64, AggregationError> {
    let values = col.non_empty_values()?;
    Ok(median(&values).expect("non-empty"))
}

/// Number of present games with HWRNS >= 1.
pub fn hwrb_count(col: &MetricColumn) -> Result<usize, AggregationError> {
    if col.kind != MetricKind::Hwrns {
        return Err(AggregationError::NotHwrns {
            algorithm: col.algorithm.clone(),
            found: col.kind,
        });
    }
    Ok(col.entries.values().filter(|v| v.value() >= 1.0).count())
}

/// Algorithms attaining the maximum value for `game`, sorted by name. Ties
/// return every maximizer.
pub fn per_game_leader(
    columns: &[MetricColumn],
    game: GameId,
) -> Result<Vec<String>, AggregationError> {
    if let Some(first) = columns.first() {
        if let Some(other) = columns.iter().find(|c| c.kind != first.kind) {
            return Err(AggregationError::IncomparableColumns(first.kind, other.kind));
        }
    }
    let present: Vec<(&str, f64)> = columns
        .iter()
        .filter_map(|c| c.get(game).map(|v| (c.algorithm(), v.value())))
        .collect();
    let best = present
        .iter()
        .map(|(_, v)| *v)
        .max_by(f64::total_cmp)
        .ok_or(AggregationError::GameAbsent(game))?;
    let mut leaders: Vec<String> = present
        .iter()
        .filter(|(_, v)| *v == best)
        .map(|(a, _)| a.to_string())
        .collect();
    leaders.sort();
    leaders.dedup();
    Ok(leaders)
}

/// The footer rows of a score table for one algorithm and metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub kind: MetricKind,
    pub mean: f64,
    pub median: f64,
    pub coverage: usize,
    pub total_games: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hwrb_count: Option<usize>,
    pub efficiency_mean: EfficiencyValue,
    pub efficiency_median: EfficiencyValue,
}

pub fn aggregate(col: &MetricColumn, frames: u64) -> Result<AggregateRow, AggregationError> {
    let MeanSummary { mean, coverage } = mean_metric(col)?;
    let median = median_metric(col)?;
    let hwrb_count = match col.kind {
        MetricKind::Hwrns => Some(hwrb_count(col)?),
        _ => None,
    };
    Ok(AggregateRow {
        kind: col.kind,
        mean,
        median,
        coverage,
        total_games: GAME_COUNT,
        hwrb_count,
        efficiency_mean: learning_efficiency(mean, frames)?,
        efficiency_median: learning_efficiency(median, frames)?,
    })
}
