//! Per-game baseline scores: random policy, human average and human world record.
//!
//! The registry is loaded once from comma-separated text and is immutable
//! afterwards. Every normalization in [`crate::metrics`] divides by
//! `reference - random`, so load-time validation rejects any row where a
//! reference does not lie strictly above the random score.

use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundled;
use crate::game::{GameId, GAMES, GAME_COUNT};

pub const BASELINE_HEADER: [&str; 5] = [
    "game",
    "random",
    "human_average",
    "human_world_record",
    "source_tag",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub game: GameId,
    pub random: f64,
    pub human_average: f64,
    pub human_world_record: f64,
    pub source_tag: String,
}

/// Soft validation failures. Loading still succeeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BaselineWarning {
    RecordBelowHumanAverage {
        game: GameId,
        human_average: f64,
        human_world_record: f64,
    },
}

impl std::fmt::Display for BaselineWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaselineWarning::RecordBelowHumanAverage {
                game,
                human_average,
                human_world_record,
            } => write!(
                f,
                "{game}: human world record {human_world_record} is below the human average {human_average}"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("baseline file is not valid CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unexpected baseline header {found:?}, expected {expected:?}")]
    Header {
        found: Vec<String>,
        expected: Vec<&'static str>,
    },
    #[error("line {line}: expected 5 columns, found {found}")]
    ColumnCount { line: u64, found: usize },
    #[error("line {line}: unknown game identifier `{name}`")]
    UnknownGame { line: u64, name: String },
    #[error("line {line}: duplicate row for {game}")]
    DuplicateGame { line: u64, game: GameId },
    #[error("line {line}: column `{column}` is not a finite number: `{value}`")]
    NonNumeric {
        line: u64,
        column: &'static str,
        value: String,
    },
    #[error("missing baseline rows for {0:?}")]
    MissingGames(Vec<&'static str>),
    #[error("{game}: human average {human_average} must exceed random {random}")]
    HumanNotAboveRandom {
        game: GameId,
        random: f64,
        human_average: f64,
    },
    #[error("{game}: human world record {human_world_record} must exceed random {random}")]
    RecordNotAboveRandom {
        game: GameId,
        random: f64,
        human_world_record: f64,
    },
}

#[derive(Debug, Error)]
#[error("no baseline loaded for {0}")]
pub struct MissingBaseline(pub GameId);

/// Validated baselines for all 57 games.
#[derive(Debug, Clone)]
pub struct Baselines {
    records: Vec<BaselineRecord>,
    warnings: Vec<BaselineWarning>,
    provenance: String,
}

pub(crate) fn parse_number(
    raw: &str,
    line: u64,
    column: &'static str,
) -> Result<f64, BaselineError> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| BaselineError::NonNumeric {
            line,
            column,
            value: raw.to_string(),
        })
}

/// Parses and validates a baseline table. `provenance` is carried into reports.
pub fn load_baselines<R: Read>(
    source: R,
    provenance: impl Into<String>,
) -> Result<Baselines, BaselineError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);

    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != BASELINE_HEADER {
        return Err(BaselineError::Header {
            found: header,
            expected: BASELINE_HEADER.to_vec(),
        });
    }

    let mut slots: Vec<Option<BaselineRecord>> = vec![None; GAME_COUNT];
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != BASELINE_HEADER.len() {
            return Err(BaselineError::ColumnCount {
                line,
                found: row.len(),
            });
        }
        let game = GameId::parse(&row[0]).map_err(|_| BaselineError::UnknownGame {
            line,
            name: row[0].to_string(),
        })?;
        if slots[game.index()].is_some() {
            return Err(BaselineError::DuplicateGame { line, game });
        }
        slots[game.index()] = Some(BaselineRecord {
            game,
            random: parse_number(&row[1], line, "random")?,
            human_average: parse_number(&row[2], line, "human_average")?,
            human_world_record: parse_number(&row[3], line, "human_world_record")?,
            source_tag: row[4].to_string(),
        });
    }

    let missing: Vec<&'static str> = slots
        .iter()
        .zip(GAMES)
        .filter(|(slot, _)| slot.is_none())
        .map(|(_, name)| name)
        .collect();
    if !missing.is_empty() {
        return Err(BaselineError::MissingGames(missing));
    }
    let records: Vec<BaselineRecord> = slots.into_iter().flatten().collect();

    let mut warnings = Vec::new();
    for r in &records {
        if r.human_average <= r.random {
            return Err(BaselineError::HumanNotAboveRandom {
                game: r.game,
                random: r.random,
                human_average: r.human_average,
            });
        }
        if r.human_world_record <= r.random {
            return Err(BaselineError::RecordNotAboveRandom {
                game: r.game,
                random: r.random,
                human_world_record: r.human_world_record,
            });
        }
        if r.human_world_record < r.human_average {
            warnings.push(BaselineWarning::RecordBelowHumanAverage {
                game: r.game,
                human_average: r.human_average,
                human_world_record: r.human_world_record,
            });
        }
    }

    Ok(Baselines {
        records,
        warnings,
        provenance: provenance.into(),
    })
}

impl Baselines {
    /// The baseline table compiled into the crate.
    pub fn bundled() -> Self {
        load_baselines(bundled::BASELINES_CSV.as_bytes(), "bundled")
            .expect("bundled baseline table is valid")
    }

    pub fn lookup(&self, game: GameId) -> &BaselineRecord {
        &self.records[game.index()]
    }

    /// Lookup by free-text name (case-insensitive, trimmed).
    pub fn lookup_name(&self, name: &str) -> Result<&BaselineRecord, crate::game::UnknownGame> {
        GameId::parse(name).map(|g| self.lookup(g))
    }

    pub fn records(&self) -> &[BaselineRecord] {
        &self.records
    }

    pub fn warnings(&self) -> &[BaselineWarning] {
        &self.warnings
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Writes the table back in load format. `f64` display is the shortest
    /// representation that parses back to the same bits.
    pub fn to_csv(&self) -> String {
        let mut out = BASELINE_HEADER.join(",");
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.game, r.random, r.human_average, r.human_world_record, r.source_tag
            ));
        }
        out
    }
}

/// Declared raw-score range of one game, used for min-max scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreScale {
    pub game: GameId,
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("degenerate score scale for {game}: [{r_min}, {r_max}]")]
pub struct DegenerateScale {
    pub game: GameId,
    pub r_min: f64,
    pub r_max: f64,
}

impl ScoreScale {
    pub fn new(game: GameId, r_min: f64, r_max: f64) -> Result<Self, DegenerateScale> {
        if r_min.is_finite() && r_max.is_finite() && r_max > r_min {
            Ok(ScoreScale { game, r_min, r_max })
        } else {
            Err(DegenerateScale { game, r_min, r_max })
        }
    }

    /// Pong's scale is the only one fixed by the game itself: [-21, 21].
    pub fn pong() -> Self {
        ScoreScale {
            game: GameId::parse("pong").expect("pong is canonical"),
            r_min: -21.0,
            r_max: 21.0,
        }
    }
}
