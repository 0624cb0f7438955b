use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::episode::{EpisodeAccumulator, EpisodeError, EpisodeSummary, StepOutcome};
use super::log::{EpisodeLog, LogEntry};
use crate::dataset::RunRecord;
use crate::game::GameId;

pub const DEFAULT_BUDGET: u64 = 200_000_000;
pub const FULL_ACTION_SET: u32 = 18;

/// Something unusual in a log that does not by itself break conformance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Annotation {
    /// A segment ended right after a life was lost, without game over.
    LifeLossTerminationSuspected { line: usize, steps: u64 },
    /// A segment ended without game over or the frame cap.
    TruncatedEpisode { line: usize, steps: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BudgetExceeded { used: u64, budget: u64 },
    ReducedActionSet { declared: u32 },
    UnknownActionSet { declared: u32 },
    ActionSetUndeclared,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BudgetExceeded { used, budget } => {
                write!(f, "budget exceeded: {used} frames used, budget {budget}")
            }
            Violation::ReducedActionSet { declared } => {
                write!(f, "reduced action set: {declared} actions declared, full set is {FULL_ACTION_SET}")
            }
            Violation::UnknownActionSet { declared } => {
                write!(f, "unknown action set: {declared} actions declared, full set is {FULL_ACTION_SET}")
            }
            Violation::ActionSetUndeclared => write!(f, "action set not declared"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LedgerError {
    #[error("averaging window k must be at least 1")]
    ZeroK,
    #[error("line {line}: {source}")]
    Episode { line: usize, source: EpisodeError },
    #[error("line {line}: a single step of {frames} frames exceeds the episode cap")]
    StepExceedsCap { line: usize, frames: u32 },
    #[error("{available} complete episodes, the training score needs k = {k}")]
    TooFewEpisodes { available: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub total_env_frames: u64,
    pub budget: u64,
    pub episodes: Vec<EpisodeSummary>,
    pub action_set: Option<u32>,
    averaging_k: usize,
    pub annotations: Vec<Annotation>,
}

impl RunLedger {
    pub fn new(budget: u64, action_set: Option<u32>, averaging_k: usize) -> Result<Self, LedgerError> {
        if averaging_k == 0 {
            return Err(LedgerError::ZeroK);
        }
        Ok(RunLedger {
            total_env_frames: 0,
            budget,
            episodes: Vec::new(),
            action_set,
            averaging_k,
            annotations: Vec::new(),
        })
    }

    pub fn averaging_k(&self) -> usize {
        self.averaging_k
    }

    pub fn push_episode(&mut self, episode: EpisodeSummary) {
        self.total_env_frames += episode.env_frames_used;
        self.episodes.push(episode);
    }

    pub fn returns(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.episode_return).collect()
    }

    /// Replays a parsed log. An episode ends at game over or the frame cap
    /// and the next step starts a new one, so `reset` lines are only needed
    /// to mark segments that stopped early. Frames of every step count
    /// toward the total, including those of unterminated segments.
    pub fn from_log(log: &EpisodeLog, budget: u64, averaging_k: usize) -> Result<Self, LedgerError> {
        let mut ledger = RunLedger::new(budget, log.action_set, averaging_k)?;
        let mut acc = EpisodeAccumulator::new();
        let mut last_line = 0;

        for entry in &log.entries {
            match *entry {
                LogEntry::Reset { line } => {
                    ledger.close_segment(&acc, line);
                    acc = EpisodeAccumulator::new();
                }
                LogEntry::Step { line, event, count } => {
                    last_line = line;
                    for _ in 0..count {
                        let wrap = |source| LedgerError::Episode { line, source };
                        match acc.step(event).map_err(wrap)? {
                            StepOutcome::Continue => {}
                            StepOutcome::Done { summary, consumed } => {
                                ledger.push_episode(summary);
                                acc = EpisodeAccumulator::new();
                                if !consumed {
                                    // The rejected step opens the next episode.
                                    match acc.step(event).map_err(wrap)? {
                                        StepOutcome::Continue => {}
                                        StepOutcome::Done { consumed: false, .. } => {
                                            return Err(LedgerError::StepExceedsCap {
                                                line,
                                                frames: event.env_frames,
                                            })
                                        }
                                        StepOutcome::Done { summary, .. } => {
                                            ledger.push_episode(summary);
                                            acc = EpisodeAccumulator::new();
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        ledger.close_segment(&acc, last_line);
        Ok(ledger)
    }

    fn close_segment(&mut self, acc: &EpisodeAccumulator, line: usize) {
        self.total_env_frames += acc.frames();
        match acc.unterminated() {
            EpisodeError::Unterminated {
                steps,
                life_lost_on_last_step: true,
                ..
            } => self
                .annotations
                .push(Annotation::LifeLossTerminationSuspected { line, steps }),
            EpisodeError::Unterminated { steps, .. } => {
                self.annotations.push(Annotation::TruncatedEpisode { line, steps })
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceVerdict {
    pub conforming: bool,
    pub violations: Vec<Violation>,
    pub annotations: Vec<Annotation>,
}

/// Conforming iff the frame total is within budget (inclusive) and the full
/// 18-action set was declared.
pub fn check_budget(ledger: &RunLedger) -> ConformanceVerdict {
    let mut violations = Vec::new();
    if ledger.total_env_frames > ledger.budget {
        violations.push(Violation::BudgetExceeded {
            used: ledger.total_env_frames,
            budget: ledger.budget,
        });
    }
    match ledger.action_set {
        None => violations.push(Violation::ActionSetUndeclared),
        Some(FULL_ACTION_SET) => {}
        Some(n) if n < FULL_ACTION_SET => violations.push(Violation::ReducedActionSet { declared: n }),
        Some(n) => violations.push(Violation::UnknownActionSet { declared: n }),
    }
    ConformanceVerdict {
        conforming: violations.is_empty(),
        violations,
        annotations: ledger.annotations.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingScore {
    pub k: usize,
    pub series: Vec<f64>,
    pub final_score: f64,
}

/// Means of every window of `k` consecutive returns, stride 1.
pub fn training_score(returns: &[f64], k: usize) -> Result<TrainingScore, LedgerError> {
    if k == 0 {
        return Err(LedgerError::ZeroK);
    }
    if returns.len() < k {
        return Err(LedgerError::TooFewEpisodes {
            available: returns.len(),
            k,
        });
    }
    let series: Vec<f64> = returns
        .windows(k)
        .map(|w| w.iter().sum::<f64>() / k as f64)
        .collect();
    let final_score = *series.last().expect("at least one window");
    Ok(TrainingScore {
        k,
        series,
        final_score,
    })
}

/// Short training-scale label: 200000000 -> "200M", 10^10 -> "10B".
pub fn format_scale(frames: u64) -> String {
    const UNITS: [(u64, &str); 3] = [(1_000_000_000, "B"), (1_000_000, "M"), (1_000, "K")];
    for (unit, suffix) in UNITS {
        if frames >= unit {
            let value = frames as f64 / unit as f64;
            let text = format!("{value:.2}");
            let text = text.trim_end_matches('0').trim_end_matches('.');
            return format!("{text}{suffix}");
        }
    }
    frames.to_string()
}

pub fn to_run_record(
    ledger: &RunLedger,
    game: GameId,
    algorithm: &str,
) -> Result<RunRecord, LedgerError> {
    let score = training_score(&ledger.returns(), ledger.averaging_k)?;
    Ok(RunRecord {
        algorithm: algorithm.to_string(),
        game,
        score: score.final_score,
        frames: ledger.total_env_frames,
        scale_label: format_scale(ledger.total_env_frames),
    })
}
