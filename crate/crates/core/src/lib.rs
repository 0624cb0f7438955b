//! Evaluation engine for Atari 57 results normalized against random,
//! human-average and human-world-record baselines.

pub mod aggregation;
pub mod bundled;
pub mod dataset;
pub mod game;
pub mod metrics;
pub mod protocol;
pub mod registry;
pub mod report;
pub mod reproduce;

pub use aggregation::{AggregateRow, MetricColumn};
pub use dataset::{load_dataset, parse_frames, Dataset, RunRecord};
pub use game::{GameId, GAMES, GAME_COUNT};
pub use metrics::{CapMode, MetricKind, MetricValue};
pub use registry::{load_baselines, BaselineRecord, Baselines};
pub use report::{evaluate, EvaluationReport};
