//! Importance encoder: quantifies a recall and represses it when it carries
//! too many irrational attributes.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::ltm::{Ltm, LtmWord, SearchCues, WordId};
use crate::memory::{AttributeSchema, FieldId, FieldKind};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ImportanceRecord {
    /// Cues in force when the word was found.
    pub cue_count: usize,
    /// Attributes the word asserts.
    pub attribute_count: usize,
    /// Where those attributes sit.
    pub location_map: BTreeSet<FieldId>,
    pub irrational_count: usize,
}

pub fn encode_importance(
    word: &LtmWord,
    cues: &SearchCues,
    schema: &AttributeSchema,
) -> ImportanceRecord {
    let location_map: BTreeSet<FieldId> = word.values().keys().copied().collect();
    let irrational_count = location_map
        .iter()
        .filter(|&&f| schema.kind(f) == FieldKind::Irrational)
        .count();
    ImportanceRecord {
        cue_count: cues.len(),
        attribute_count: location_map.len(),
        location_map,
        irrational_count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Allowed,
    Repressed,
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gate::Allowed => "allowed",
            Gate::Repressed => "repressed",
        })
    }
}

/// Repressed iff the irrational count exceeds `limit`, except in dreams.
pub fn gate(record: &ImportanceRecord, limit: u32, dream_mode: bool) -> Gate {
    if !dream_mode && record.irrational_count > limit as usize {
        Gate::Repressed
    } else {
        Gate::Allowed
    }
}

/// Default score: how many attributes the recall asserts.
pub fn default_score(record: &ImportanceRecord) -> usize {
    record.attribute_count
}

pub fn select_most_important(ltm: &Ltm, matches: &[WordId], cues: &SearchCues) -> Result<WordId> {
    select_most_important_by(ltm, matches, cues, default_score)
}

/// Argmax of `score` over `matches`; ties go to the earliest stored word.
pub fn select_most_important_by<S, F>(
    ltm: &Ltm,
    matches: &[WordId],
    cues: &SearchCues,
    score: F,
) -> Result<WordId>
where
    S: Ord,
    F: Fn(&ImportanceRecord) -> S,
{
    let mut best: Option<(WordId, S)> = None;
    let mut ordered = matches.to_vec();
    ordered.sort();
    for id in ordered {
        let record = encode_importance(ltm.word(id)?, cues, ltm.schema());
        let s = score(&record);
        match &best {
            Some((_, top)) if s <= *top => {}
            _ => best = Some((id, s)),
        }
    }
    best.map(|(id, _)| id).ok_or(Error::EmptyMatches)
}
