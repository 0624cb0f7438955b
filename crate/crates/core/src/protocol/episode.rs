use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::FRAMES_PER_HALF_HOUR;

/// Longest allowed episode in environment frames (30 minutes at 60 fps).
pub const MAX_EPISODE_FRAMES: u64 = FRAMES_PER_HALF_HOUR;

/// One agent step as recorded in an episode log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    /// Undiscounted reward in raw game points.
    pub reward: f64,
    pub lives: u32,
    pub game_over: bool,
    /// Frames emulated for this step (agent step times action repeat).
    pub env_frames: u32,
}

impl StepEvent {
    pub fn new(reward: f64, lives: u32, game_over: bool, env_frames: u32) -> Self {
        StepEvent {
            reward,
            lives,
            game_over,
            env_frames,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GameOver,
    FrameCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    #[serde(rename = "return")]
    pub episode_return: f64,
    pub env_frames_used: u64,
    pub terminated_by: Termination,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EpisodeError {
    #[error("episode stream is empty")]
    Empty,
    #[error("step {step}: reward is not a finite number ({reward})")]
    NonFiniteReward { step: u64, reward: f64 },
    #[error("step {step}: env_frames must be at least 1")]
    ZeroFrames { step: u64 },
    #[error("step {step}: lives increased from {from} to {to} without an episode reset")]
    LivesIncreased { step: u64, from: u32, to: u32 },
    #[error(
        "episode ended after {steps} steps and {env_frames} frames without game over or frame cap"
    )]
    Unterminated {
        steps: u64,
        env_frames: u64,
        partial_return: f64,
        /// The final consumed step lost a life, which suggests the log
        /// terminated episodes on life loss.
        life_lost_on_last_step: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Continue,
    /// The episode is over. `consumed` is false when the offered step was
    /// rejected because it would have crossed the frame cap.
    Done {
        summary: EpisodeSummary,
        consumed: bool,
    },
}

/// Incremental episode accounting. Feed steps until [`StepOutcome::Done`].
#[derive(Debug, Clone, Default)]
pub struct EpisodeAccumulator {
    steps: u64,
    frames: u64,
    total: f64,
    last_lives: Option<u32>,
    life_lost_on_last_step: bool,
}

impl EpisodeAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    fn done(&self, terminated_by: Termination, consumed: bool) -> StepOutcome {
        StepOutcome::Done {
            summary: EpisodeSummary {
                episode_return: self.total,
                env_frames_used: self.frames,
                terminated_by,
            },
            consumed,
        }
    }

    pub fn step(&mut self, event: StepEvent) -> Result<StepOutcome, EpisodeError> {
        let step = self.steps + 1;
        if !event.reward.is_finite() {
            return Err(EpisodeError::NonFiniteReward {
                step,
                reward: event.reward,
            });
        }
        if event.env_frames == 0 {
            return Err(EpisodeError::ZeroFrames { step });
        }
        if let Some(prev) = self.last_lives {
            if event.lives > prev {
                return Err(EpisodeError::LivesIncreased {
                    step,
                    from: prev,
                    to: event.lives,
                });
            }
        }
        // The cap fires before a step that would cross it.
        if self.frames + u64::from(event.env_frames) > MAX_EPISODE_FRAMES {
            return Ok(self.done(Termination::FrameCap, false));
        }

        self.steps = step;
        self.frames += u64::from(event.env_frames);
        self.total += event.reward;
        self.life_lost_on_last_step = self.last_lives.is_some_and(|prev| event.lives < prev);
        self.last_lives = Some(event.lives);

        if event.game_over {
            Ok(self.done(Termination::GameOver, true))
        } else if self.frames == MAX_EPISODE_FRAMES {
            Ok(self.done(Termination::FrameCap, true))
        } else {
            Ok(StepOutcome::Continue)
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn frames(&self) -> u64 {
        self.frames
    }

    /// Error describing an episode whose stream ran out early.
    pub fn unterminated(&self) -> EpisodeError {
        if self.steps == 0 {
            return EpisodeError::Empty;
        }
        EpisodeError::Unterminated {
            steps: self.steps,
            env_frames: self.frames,
            partial_return: self.total,
            life_lost_on_last_step: self.life_lost_on_last_step,
        }
    }
}

/// Sums rewards until game over or the 108,000-frame cap. Life loss alone
/// never ends an episode. Steps after termination are not read.
pub fn accumulate_episode<I>(stream: I) -> Result<EpisodeSummary, EpisodeError>
where
    I: IntoIterator<Item = StepEvent>,
{
    let mut acc = EpisodeAccumulator::new();
    for event in stream {
        if let StepOutcome::Done { summary, .. } = acc.step(event)? {
            return Ok(summary);
        }
    }
    Err(acc.unterminated())
}
