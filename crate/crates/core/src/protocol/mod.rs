//! Episode-log evaluation: termination, the 30-minute cap, frame budgets,
//! action-set declaration and the k-episode training score.

mod episode;
mod ledger;
mod log;

pub use episode::{
    accumulate_episode, EpisodeAccumulator, EpisodeError, EpisodeSummary, StepEvent, StepOutcome,
    Termination, MAX_EPISODE_FRAMES,
};
pub use ledger::{
    check_budget, format_scale, to_run_record, training_score, Annotation, ConformanceVerdict,
    LedgerError, RunLedger, TrainingScore, Violation, DEFAULT_BUDGET, FULL_ACTION_SET,
};
pub use log::{parse_log, EpisodeLog, LogEntry, LogError};
