//! Text format for episode logs.
//!
//! ```text
//! # comment
//! action_set 18
//! 0 3 0 4            reward lives game_over env_frames
//! repeat 1000 1 3 0 4
//! 0 0 1 4
//! reset
//! ```
//!
//! `game_over` is `0`/`1` or `true`/`false`. `reset` separates episodes.

use std::io::BufRead;

use thiserror::Error;

use super::episode::StepEvent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogEntry {
    Step {
        line: usize,
        event: StepEvent,
        count: u64,
    },
    Reset {
        line: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    pub action_set: Option<u32>,
    pub entries: Vec<LogEntry>,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("cannot read log: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> LogError {
    LogError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_step(line: usize, fields: &[&str]) -> Result<StepEvent, LogError> {
    let [reward, lives, game_over, frames] = fields else {
        return Err(syntax(
            line,
            format!(
                "expected `reward lives game_over env_frames`, found {} fields",
                fields.len()
            ),
        ));
    };
    let reward: f64 = reward
        .parse()
        .map_err(|_| syntax(line, format!("reward `{reward}` is not a number")))?;
    let lives: u32 = lives
        .parse()
        .map_err(|_| syntax(line, format!("lives `{lives}` is not a nonnegative integer")))?;
    let game_over = match *game_over {
        "1" | "true" => true,
        "0" | "false" => false,
        other => return Err(syntax(line, format!("game_over `{other}` is not 0/1/true/false"))),
    };
    let env_frames: u32 = frames
        .parse()
        .map_err(|_| syntax(line, format!("env_frames `{frames}` is not a nonnegative integer")))?;
    Ok(StepEvent::new(reward, lives, game_over, env_frames))
}

pub fn parse_log<R: BufRead>(reader: R) -> Result<EpisodeLog, LogError> {
    let mut log = EpisodeLog::default();
    for (idx, text) in reader.lines().enumerate() {
        let text = text?;
        let line = idx + 1;
        let body = text.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields[0] {
            "reset" if fields.len() == 1 => log.entries.push(LogEntry::Reset { line }),
            "reset" => return Err(syntax(line, "`reset` takes no arguments")),
            "action_set" => {
                let [_, n] = fields[..] else {
                    return Err(syntax(line, "expected `action_set <n>`"));
                };
                let n: u32 = n
                    .parse()
                    .map_err(|_| syntax(line, format!("action set `{n}` is not an integer")))?;
                if log.action_set.is_some_and(|prev| prev != n) {
                    return Err(syntax(line, "conflicting action_set declarations"));
                }
                log.action_set = Some(n);
            }
            "repeat" => {
                let count = fields
                    .get(1)
                    .and_then(|c| c.parse::<u64>().ok())
                    .ok_or_else(|| syntax(line, "expected `repeat <count> <step>`"))?;
                let event = parse_step(line, &fields[2..])?;
                if count > 0 {
                    log.entries.push(LogEntry::Step { line, event, count });
                }
            }
            _ => {
                let event = parse_step(line, &fields)?;
                log.entries.push(LogEntry::Step {
                    line,
                    event,
                    count: 1,
                });
            }
        }
    }
    Ok(log)
}

impl EpisodeLog {
    /// Serializes back to the text format, one line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(n) = self.action_set {
            out.push_str(&format!("action_set {n}\n"));
        }
        for entry in &self.entries {
            match entry {
                LogEntry::Reset { .. } => out.push_str("reset\n"),
                LogEntry::Step { event, count, .. } => {
                    if *count != 1 {
                        out.push_str(&format!("repeat {count} "));
                    }
                    out.push_str(&format!(
                        "{:?} {} {} {}\n",
                        event.reward,
                        event.lives,
                        u8::from(event.game_over),
                        event.env_frames
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_line_kinds() {
        let text = "# header\naction_set 18\n1.5 3 0 4\nrepeat 10 0 3 false 4  # idle\n0 0 true 4\nreset\n";
        let log = parse_log(text.as_bytes()).unwrap();
        assert_eq!(log.action_set, Some(18));
        assert_eq!(log.entries.len(), 4);
        assert_eq!(
            log.entries[1],
            LogEntry::Step {
                line: 4,
                event: StepEvent::new(0.0, 3, false, 4),
                count: 10
            }
        );
        assert_eq!(log.entries[3], LogEntry::Reset { line: 6 });
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_log("1 3 0 4\n\n1 3 maybe 4\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        assert!(parse_log("1 3 0\n".as_bytes()).is_err());
        assert!(parse_log("1 -3 0 4\n".as_bytes()).is_err());
        assert!(parse_log("action_set 18\naction_set 4\n".as_bytes()).is_err());
        assert!(parse_log("repeat x 1 3 0 4\n".as_bytes()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "action_set 4\nrepeat 3 0.25 2 0 4\n-1.0 0 1 4\nreset\n";
        let log = parse_log(text.as_bytes()).unwrap();
        let again = parse_log(log.to_text().as_bytes()).unwrap();
        assert_eq!(log, again);
    }
}
