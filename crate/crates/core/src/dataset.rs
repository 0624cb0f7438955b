//! Run-record datasets: one raw score per (algorithm, game) with its training scale.

use std::collections::BTreeSet;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundled;
use crate::game::GameId;

pub const DATASET_HEADER: [&str; 5] = ["algorithm", "game", "score", "frames", "scale_label"];

/// Literal marking a score the source does not report.
pub const MISSING: &str = "N/A";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub game: GameId,
    pub score: f64,
    pub frames: u64,
    pub scale_label: String,
}

/// A row skipped because its score was `N/A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageNote {
    pub algorithm: String,
    pub game: GameId,
    pub line: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub label: String,
    pub records: Vec<RunRecord>,
    pub coverage_notes: Vec<CoverageNote>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset `{label}` is not valid CSV: {source}")]
    Csv { label: String, source: csv::Error },
    #[error("dataset `{label}`: unexpected header {found:?}, expected {expected:?}")]
    Header {
        label: String,
        found: Vec<String>,
        expected: [&'static str; 5],
    },
    #[error("dataset `{label}` line {line}: expected 5 columns, found {found}")]
    ColumnCount { label: String, line: u64, found: usize },
    #[error("dataset `{label}` line {line}: unknown game identifier `{name}`")]
    UnknownGame { label: String, line: u64, name: String },
    #[error("dataset `{label}` line {line}: empty algorithm name")]
    EmptyAlgorithm { label: String, line: u64 },
    #[error("dataset `{label}` line {line}: duplicate row for ({algorithm}, {game})")]
    Duplicate {
        label: String,
        line: u64,
        algorithm: String,
        game: GameId,
    },
    #[error("dataset `{label}` line {line}: score `{value}` is not a finite number")]
    NonNumericScore { label: String, line: u64, value: String },
    #[error("dataset `{label}` line {line}: frames `{value}` is not a positive integer")]
    BadFrames { label: String, line: u64, value: String },
    #[error("unknown bundled dataset `{0}`")]
    UnknownBundled(String),
}

/// Parses a frame count. Accepts plain integers and integral scientific
/// notation such as `2e8`.
pub fn parse_frames(text: &str) -> Option<u64> {
    let text = text.trim();
    if let Ok(n) = text.parse::<u64>() {
        return Some(n);
    }
    let v: f64 = text.parse().ok()?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 {
        Some(v as u64)
    } else {
        None
    }
}

pub fn load_dataset<R: Read>(source: R, label: impl Into<String>) -> Result<Dataset, DatasetError> {
    let label = label.into();
    let csv_err = |source| DatasetError::Csv {
        label: label.clone(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(DATASET_HEADER.iter().copied()) {
        return Err(DatasetError::Header {
            label,
            found: header.iter().map(str::to_string).collect(),
            expected: DATASET_HEADER,
        });
    }

    let mut records = Vec::new();
    let mut coverage_notes = Vec::new();
    let mut seen = BTreeSet::new();
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 5 {
            return Err(DatasetError::ColumnCount {
                label,
                line,
                found: row.len(),
            });
        }
        let algorithm = row[0].to_string();
        if algorithm.is_empty() {
            return Err(DatasetError::EmptyAlgorithm { label, line });
        }
        let game = GameId::parse(&row[1]).map_err(|_| DatasetError::UnknownGame {
            label: label.clone(),
            line,
            name: row[1].to_string(),
        })?;
        if !seen.insert((algorithm.clone(), game)) {
            return Err(DatasetError::Duplicate {
                label,
                line,
                algorithm,
                game,
            });
        }
        let frames = parse_frames(&row[3])
            .filter(|f| *f > 0)
            .ok_or_else(|| DatasetError::BadFrames {
                label: label.clone(),
                line,
                value: row[3].to_string(),
            })?;
        if row[2].eq_ignore_ascii_case(MISSING) {
            coverage_notes.push(CoverageNote {
                algorithm,
                game,
                line,
            });
            continue;
        }
        let score = row[2]
            .parse::<f64>()
            .ok()
            .filter(|s| s.is_finite())
            .ok_or_else(|| DatasetError::NonNumericScore {
                label: label.clone(),
                line,
                value: row[2].to_string(),
            })?;
        records.push(RunRecord {
            algorithm,
            game,
            score,
            frames,
            scale_label: row[4].to_string(),
        });
    }
    Ok(Dataset {
        label,
        records,
        coverage_notes,
    })
}

impl Dataset {
    pub fn bundled(name: &str) -> Result<Dataset, DatasetError> {
        let text = bundled::dataset_csv(name)
            .ok_or_else(|| DatasetError::UnknownBundled(name.to_string()))?;
        load_dataset(text.as_bytes(), name)
    }

    /// All bundled datasets in table order.
    pub fn bundled_all() -> Vec<Dataset> {
        bundled::DATASETS
            .iter()
            .map(|(name, _)| Dataset::bundled(name).expect("bundled dataset is valid"))
            .collect()
    }

    /// Algorithm names in first-appearance order.
    pub fn algorithms(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for name in self
            .records
            .iter()
            .map(|r| r.algorithm.as_str())
            .chain(self.coverage_notes.iter().map(|n| n.algorithm.as_str()))
        {
            if !out.contains(&name) {
                out.push(name);
            }
        }
        out
    }

    pub fn get(&self, algorithm: &str, game: GameId) -> Option<&RunRecord> {
        self.records
            .iter()
            .find(|r| r.algorithm == algorithm && r.game == game)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(DATASET_HEADER).expect("write to memory");
        for r in &self.records {
            w.write_record([
                r.algorithm.as_str(),
                r.game.name(),
                &r.score.to_string(),
                &r.frames.to_string(),
                r.scale_label.as_str(),
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
    }
}
