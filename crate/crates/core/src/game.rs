//! Canonical Atari 57 game identifiers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// The 57 games, canonical lowercase spelling, in table row order.
pub const GAMES: [&str; 57] = [
    "alien",
    "amidar",
    "assault",
    "asterix",
    "asteroids",
    "atlantis",
    "bank heist",
    "battle zone",
    "beam rider",
    "berzerk",
    "bowling",
    "boxing",
    "breakout",
    "centipede",
    "chopper command",
    "crazy climber",
    "defender",
    "demon attack",
    "double dunk",
    "enduro",
    "fishing derby",
    "freeway",
    "frostbite",
    "gopher",
    "gravitar",
    "hero",
    "ice hockey",
    "jamesbond",
    "kangaroo",
    "krull",
    "kung fu master",
    "montezuma revenge",
    "ms pacman",
    "name this game",
    "phoenix",
    "pitfall",
    "pong",
    "private eye",
    "qbert",
    "riverraid",
    "road runner",
    "robotank",
    "seaquest",
    "skiing",
    "solaris",
    "space invaders",
    "star gunner",
    "surround",
    "tennis",
    "time pilot",
    "tutankham",
    "up n down",
    "venture",
    "video pinball",
    "wizard of wor",
    "yars revenge",
    "zaxxon",
];

pub const GAME_COUNT: usize = GAMES.len();

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown game identifier `{0}`")]
pub struct UnknownGame(pub String);

/// One of the 57 canonical games. Ordered by table row position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GameId(u8);

impl GameId {
    /// Case-insensitive lookup; surrounding whitespace is ignored and runs of
    /// inner whitespace collapse to a single space.
    pub fn parse(name: &str) -> Result<Self, UnknownGame> {
        let canonical = name
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_lowercase();
        GAMES
            .iter()
            .position(|g| *g == canonical)
            .map(|i| GameId(i as u8))
            .ok_or_else(|| UnknownGame(name.to_string()))
    }

    pub fn name(self) -> &'static str {
        GAMES[self.0 as usize]
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = GameId> {
        (0..GAME_COUNT).map(|i| GameId(i as u8))
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameId {
    type Err = UnknownGame;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GameId::parse(s)
    }
}

impl Serialize for GameId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for GameId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        GameId::parse(&s).map_err(serde::de::Error::custom)
    }
}
