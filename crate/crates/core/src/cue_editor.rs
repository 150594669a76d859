//! Cue editor: breaks a mental block by gating cues off one at a time, in
//! cue-list order, and searching again after each removal. A removed cue is
//! restored before the next one is tried, the way a shift-register counter
//! walks a single gate along the cue lines.

use crate::config::MultiMatchPolicy;
use crate::error::Result;
use crate::ltm::{Ltm, SearchCues, SearchOutcome, WordId};
use crate::memory::{FieldId, Nibble};

/// Which cue positions a pass gated off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Removal {
    None,
    One(usize),
    Pair(usize, usize),
}

impl Removal {
    pub fn positions(self) -> Vec<usize> {
        match self {
            Removal::None => vec![],
            Removal::One(i) => vec![i],
            Removal::Pair(i, j) => vec![i, j],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditPass {
    pub removal: Removal,
    pub removed: Vec<(FieldId, Nibble)>,
    pub outcome: SearchOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    /// Index into `EditTrace::passes`.
    pub pass: usize,
    pub removed: Vec<(FieldId, Nibble)>,
    /// The reduced cue set that produced the recall.
    pub cues: SearchCues,
    pub delivered: Vec<WordId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditTrace {
    pub passes: Vec<EditPass>,
    pub resolved: Option<Resolution>,
}

impl EditTrace {
    pub fn delivered(&self) -> &[WordId] {
        self.resolved
            .as_ref()
            .map(|r| r.delivered.as_slice())
            .unwrap_or(&[])
    }
}

/// Searches with the full cue set, then with each single cue removed, then
/// (when `pair_removal` is set) with each pair removed. The first pass that
/// recalls anything is resolved through `policy`. An unbreakable block is
/// an ordinary result with an empty delivery.
pub fn edit_and_search(
    ltm: &Ltm,
    cues: &SearchCues,
    policy: MultiMatchPolicy,
    pair_removal: bool,
) -> Result<EditTrace> {
    let n = cues.len();
    let singles = (0..n).map(Removal::One);
    let pairs = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| Removal::Pair(i, j)))
        .filter(move |_| pair_removal);
    let schedule = std::iter::once(Removal::None).chain(singles).chain(pairs);

    let mut trace = EditTrace::default();
    for removal in schedule {
        let positions = removal.positions();
        let reduced = cues.without(&positions);
        let outcome = ltm.search(&reduced);
        let removed = positions.iter().map(|&i| cues.get(i)).collect::<Vec<_>>();
        let hit = outcome.is_recall();
        if hit {
            let delivered = ltm.deliver(&outcome, policy, &reduced)?;
            trace.resolved = Some(Resolution {
                pass: trace.passes.len(),
                removed: removed.clone(),
                cues: reduced,
                delivered,
            });
        }
        trace.passes.push(EditPass {
            removal,
            removed,
            outcome,
        });
        if hit {
            break;
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrainstormEntry {
    pub removed: Option<(FieldId, Nibble)>,
    pub matches: Vec<WordId>,
}

/// Match sets for the full cue set and for each single-cue removal. Fewer
/// cues can only widen what comes to mind.
pub fn brainstorm(ltm: &Ltm, cues: &SearchCues) -> Vec<BrainstormEntry> {
    let full = BrainstormEntry {
        removed: None,
        matches: ltm.matches(cues),
    };
    std::iter::once(full)
        .chain((0..cues.len()).map(|i| BrainstormEntry {
            removed: Some(cues.get(i)),
            matches: ltm.matches(&cues.without(&[i])),
        }))
        .collect()
}
