use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One tick is 100 ms of simulated time; 30 ticks is about three seconds.
pub const DEFAULT_TTL: u32 = 30;
pub const DEFAULT_REHEARSALS: u32 = 3;
pub const DEFAULT_REPRESSION_LIMIT: u32 = 2;

/// What reaches STM when a search matches several words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MultiMatchPolicy {
    /// Only the first match in storage order.
    #[default]
    First,
    /// Every match, one after another, in storage order.
    Sequential,
    /// The single match with the highest importance score.
    ImportanceMax,
}

impl FromStr for MultiMatchPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Self::First),
            "sequential" => Ok(Self::Sequential),
            "importance_max" => Ok(Self::ImportanceMax),
            other => Err(Error::InvalidConfig(format!(
                "unknown multi-match policy `{other}`"
            ))),
        }
    }
}

impl fmt::Display for MultiMatchPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::First => "first",
            Self::Sequential => "sequential",
            Self::ImportanceMax => "importance_max",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub ttl_default: u32,
    /// Rehearsals required before an engram commits to LTM.
    pub rehearsal_threshold: u32,
    /// Recalls with more irrational attributes than this are repressed.
    pub repression_limit: u32,
    /// Dreams ignore the repression limit.
    pub dream_mode: bool,
    pub multi_match_policy: MultiMatchPolicy,
    pub pair_removal: bool,
    /// Swap Left and Right on every recalled action (walking the trail back).
    pub backtrack: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            ttl_default: DEFAULT_TTL,
            rehearsal_threshold: DEFAULT_REHEARSALS,
            repression_limit: DEFAULT_REPRESSION_LIMIT,
            dream_mode: false,
            multi_match_policy: MultiMatchPolicy::First,
            pair_removal: false,
            backtrack: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.rehearsal_threshold < 1 {
            return Err(Error::InvalidConfig(
                "rehearsal_threshold must be >= 1".into(),
            ));
        }
        if self.ttl_default < 1 {
            return Err(Error::InvalidConfig("ttl_default must be >= 1".into()));
        }
        Ok(())
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num(key: &str, value: &str) -> Result<u32> {
            value.parse().map_err(|_| {
                Error::InvalidConfig(format!("{key}: expected a count, got `{value}`"))
            })
        }
        fn flag(key: &str, value: &str) -> Result<bool> {
            match value {
                "true" | "on" | "1" => Ok(true),
                "false" | "off" | "0" => Ok(false),
                _ => Err(Error::InvalidConfig(format!(
                    "{key}: expected true/false, got `{value}`"
                ))),
            }
        }
        match key {
            "ttl_default" => self.ttl_default = num(key, value)?,
            "rehearsal_threshold" | "R" => self.rehearsal_threshold = num(key, value)?,
            "repression_limit" | "L" => self.repression_limit = num(key, value)?,
            "dream_mode" => self.dream_mode = flag(key, value)?,
            "multi_match_policy" => self.multi_match_policy = value.parse()?,
            "pair_removal" => self.pair_removal = flag(key, value)?,
            "backtrack" => self.backtrack = flag(key, value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}
