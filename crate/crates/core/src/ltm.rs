//! Write-once associative long-term memory.
//!
//! Words are appended in commit order and never change afterwards. A search
//! compares every stored word against the cue set in parallel; the outcome
//! carries the two subconscious signals of the architecture: whether anything
//! was recalled and whether more than one word answered.

use std::fmt;
use std::sync::Arc;

use crate::config::MultiMatchPolicy;
use crate::error::{Error, Result};
use crate::importance;
use crate::memory::{Action, AttributeSchema, FieldId, FieldValues, Nibble, Operator};
use crate::state_machine::StateMachine;

/// Fields an arithmetic fact is stored over.
pub const FACT_OP1: &str = "arith_op1";
pub const FACT_OP2: &str = "arith_op2";
pub const FACT_OPERATOR: &str = "arith_operator";
pub const FACT_RESULT: &str = "arith_result";

/// Storage address of a word. Displays as the 1-based row number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordId(pub usize);

impl WordId {
    pub fn row(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for WordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.row())
    }
}

/// One engram. Zero nibbles are inactive attributes and are not stored, so
/// `values` holds only the attributes the engram actually asserts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LtmWord {
    values: FieldValues,
    action: Option<Action>,
    machine: Option<usize>,
    committed: bool,
}

impl LtmWord {
    pub fn new(values: FieldValues, action: Option<Action>) -> Self {
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        LtmWord {
            values,
            action,
            machine: None,
            committed: false,
        }
    }

    pub(crate) fn machine_word(values: FieldValues, machine: usize) -> Self {
        LtmWord {
            machine: Some(machine),
            ..LtmWord::new(values, None)
        }
    }

    pub fn values(&self) -> &FieldValues {
        &self.values
    }

    pub fn action(&self) -> Option<Action> {
        self.action
    }

    /// Index of the state machine this word carries, if any.
    pub fn machine(&self) -> Option<usize> {
        self.machine
    }

    pub fn is_committed(&self) -> bool {
        self.committed
    }

    pub fn read(&self, field: FieldId) -> Nibble {
        self.values.get(&field).copied().unwrap_or_default()
    }

    pub fn matches(&self, cues: &SearchCues) -> bool {
        cues.iter()
            .all(|(field, value)| self.values.get(&field) == Some(&value))
    }

    /// Same attributes and same action: indistinguishable on recall.
    pub fn same_content(&self, other: &LtmWord) -> bool {
        self.values == other.values && self.action == other.action
    }
}

/// Ordered cue list. Order is the cue editor's removal order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchCues(Vec<(FieldId, Nibble)>);

impl SearchCues {
    pub fn new(cues: impl IntoIterator<Item = (FieldId, Nibble)>) -> Result<Self> {
        let cues: Vec<_> = cues.into_iter().collect();
        for (i, (f, _)) in cues.iter().enumerate() {
            if cues[..i].iter().any(|(g, _)| g == f) {
                return Err(Error::DuplicateCue(format!("#{}", f.0)));
            }
        }
        Ok(SearchCues(cues))
    }

    /// Cues named by schema field, e.g. `[("B", 1), ("C", 2)]`.
    pub fn named(schema: &AttributeSchema, cues: &[(&str, u8)]) -> Result<Self> {
        let mut out = Vec::with_capacity(cues.len());
        for &(name, v) in cues {
            let id = schema.id(name)?;
            if out.iter().any(|&(g, _)| g == id) {
                return Err(Error::DuplicateCue(name.to_string()));
            }
            out.push((id, Nibble::try_from(v as i64)?));
        }
        Ok(SearchCues(out))
    }

    pub fn from_values(values: &FieldValues) -> Self {
        SearchCues(values.iter().map(|(&f, &v)| (f, v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FieldId, Nibble)> + '_ {
        self.0.iter().copied()
    }

    pub fn get(&self, index: usize) -> (FieldId, Nibble) {
        self.0[index]
    }

    /// The cue set with the cues at `removed` positions gated off.
    pub fn without(&self, removed: &[usize]) -> SearchCues {
        SearchCues(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, c)| *c)
                .collect(),
        )
    }

    /// `name:value` pairs, comma separated; `-` for the empty set.
    pub fn render(&self, schema: &AttributeSchema) -> String {
        if self.0.is_empty() {
            return "-".to_string();
        }
        self.0
            .iter()
            .map(|&(f, v)| format!("{}:{}", schema.name(f), v.value()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeClass {
    NoRecall,
    Single,
    Multiple,
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeClass::NoRecall => "norecall",
            OutcomeClass::Single => "single",
            OutcomeClass::Multiple => "multiple",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    NoRecall,
    Single(WordId),
    /// At least two matches, ascending storage order.
    Multiple {
        count: usize,
        matches: Vec<WordId>,
    },
}

impl SearchOutcome {
    fn from_matches(matches: Vec<WordId>) -> Self {
        match matches.len() {
            0 => SearchOutcome::NoRecall,
            1 => SearchOutcome::Single(matches[0]),
            count => SearchOutcome::Multiple { count, matches },
        }
    }

    pub fn class(&self) -> OutcomeClass {
        match self {
            SearchOutcome::NoRecall => OutcomeClass::NoRecall,
            SearchOutcome::Single(_) => OutcomeClass::Single,
            SearchOutcome::Multiple { .. } => OutcomeClass::Multiple,
        }
    }

    pub fn count(&self) -> usize {
        match self {
            SearchOutcome::NoRecall => 0,
            SearchOutcome::Single(_) => 1,
            SearchOutcome::Multiple { count, .. } => *count,
        }
    }

    pub fn matches(&self) -> Vec<WordId> {
        match self {
            SearchOutcome::NoRecall => Vec::new(),
            SearchOutcome::Single(id) => vec![*id],
            SearchOutcome::Multiple { matches, .. } => matches.clone(),
        }
    }

    pub fn is_recall(&self) -> bool {
        !matches!(self, SearchOutcome::NoRecall)
    }
}

/// Whether the words of a multiple recall differ in content.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultipleKind {
    /// The matches differ: a confusing stream of distinct recalls.
    Differentiating,
    /// Every match is the same content: a resonance, i.e. a strong recall.
    NonDifferentiating,
}

impl fmt::Display for MultipleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MultipleKind::Differentiating => "differentiating",
            MultipleKind::NonDifferentiating => "nondifferentiating",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Memorized {
    Committed(WordId),
    NotCommitted,
}

#[derive(Debug, Clone)]
pub struct Ltm {
    schema: Arc<AttributeSchema>,
    rehearsal_threshold: u32,
    words: Vec<LtmWord>,
    machines: Vec<StateMachine>,
}

impl Ltm {
    pub fn new(schema: Arc<AttributeSchema>, rehearsal_threshold: u32) -> Self {
        Ltm {
            schema,
            rehearsal_threshold: rehearsal_threshold.max(1),
            words: Vec::new(),
            machines: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Arc<AttributeSchema> {
        &self.schema
    }

    pub fn rehearsal_threshold(&self) -> u32 {
        self.rehearsal_threshold
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, id: WordId) -> Result<&LtmWord> {
        self.words.get(id.0).ok_or(Error::UnknownWord(id))
    }

    pub fn words(&self) -> impl Iterator<Item = (WordId, &LtmWord)> {
        self.words.iter().enumerate().map(|(i, w)| (WordId(i), w))
    }

    pub fn machines(&self) -> &[StateMachine] {
        &self.machines
    }

    /// Commits `word` at the next free address once it has been rehearsed
    /// at least R times; below that, memory is left untouched.
    pub fn memorize(&mut self, word: LtmWord, rehearsals: u32) -> Result<Memorized> {
        self.memorize_at(WordId(self.words.len()), word, rehearsals)
    }

    /// Programs the word at a specific address. Committed addresses can never
    /// be written again.
    pub fn memorize_at(
        &mut self,
        addr: WordId,
        word: LtmWord,
        rehearsals: u32,
    ) -> Result<Memorized> {
        if addr.0 < self.words.len() {
            return Err(Error::WriteOnceViolation(addr));
        }
        if addr.0 > self.words.len() {
            return Err(Error::AddressGap {
                addr: addr.0,
                next: self.words.len(),
            });
        }
        let word = self.conform(word)?;
        if rehearsals < self.rehearsal_threshold {
            return Ok(Memorized::NotCommitted);
        }
        Ok(Memorized::Committed(self.commit(word)))
    }

    fn conform(&self, mut word: LtmWord) -> Result<LtmWord> {
        self.schema.check_values(&word.values)?;
        if let (Some(action), Some(field)) = (word.action, self.schema.action_field()) {
            match word.values.get(&field) {
                Some(&code) if code != action.code() => {
                    return Err(Error::InvalidConfig(format!(
                        "action {action} disagrees with action field value {}",
                        code.value()
                    )))
                }
                _ => {
                    word.values.insert(field, action.code());
                }
            }
        }
        Ok(word)
    }

    fn commit(&mut self, mut word: LtmWord) -> WordId {
        word.committed = true;
        self.words.push(word);
        WordId(self.words.len() - 1)
    }

    pub(crate) fn commit_machine(&mut self, machine: StateMachine) -> Result<WordId> {
        let values: FieldValues = machine.trigger().iter().collect();
        let word = self.conform(LtmWord::machine_word(values, self.machines.len()))?;
        self.machines.push(machine);
        Ok(self.commit(word))
    }

    /// Every committed word that defines each cued field with the cued value,
    /// in storage order.
    pub fn matches(&self, cues: &SearchCues) -> Vec<WordId> {
        self.words()
            .filter(|(_, w)| w.matches(cues))
            .map(|(id, _)| id)
            .collect()
    }

    pub fn search(&self, cues: &SearchCues) -> SearchOutcome {
        SearchOutcome::from_matches(self.matches(cues))
    }

    /// Which of the matched words reach STM under `policy`.
    pub fn deliver(
        &self,
        outcome: &SearchOutcome,
        policy: MultiMatchPolicy,
        cues: &SearchCues,
    ) -> Result<Vec<WordId>> {
        let matches = match outcome {
            SearchOutcome::NoRecall => return Err(Error::DeliverOnNoRecall),
            SearchOutcome::Single(id) => return Ok(vec![*id]),
            SearchOutcome::Multiple { matches, .. } => matches,
        };
        Ok(match policy {
            MultiMatchPolicy::First => vec![matches[0]],
            MultiMatchPolicy::Sequential => matches.clone(),
            MultiMatchPolicy::ImportanceMax => {
                vec![importance::select_most_important(self, matches, cues)?]
            }
        })
    }

    pub fn classify_multiple(&self, matches: &[WordId]) -> Result<MultipleKind> {
        if matches.len() < 2 {
            return Err(Error::TooFewMatches(matches.len()));
        }
        let first = self.word(matches[0])?;
        for &id in &matches[1..] {
            if !self.word(id)?.same_content(first) {
                return Ok(MultipleKind::Differentiating);
            }
        }
        Ok(MultipleKind::NonDifferentiating)
    }

    /// Commits `a <op> b = c` over the arithmetic fact fields.
    pub fn memorize_fact(
        &mut self,
        a: Nibble,
        op: Operator,
        b: Nibble,
        c: Nibble,
        rehearsals: u32,
    ) -> Result<Memorized> {
        let fields = self.fact_fields()?;
        let values: FieldValues = [
            (fields[0], a),
            (fields[1], b),
            (fields[2], op.code()),
            (fields[3], c),
        ]
        .into();
        self.memorize(LtmWord::new(values, None), rehearsals)
    }

    fn fact_fields(&self) -> Result<[FieldId; 4]> {
        Ok([
            self.schema.id(FACT_OP1)?,
            self.schema.id(FACT_OP2)?,
            self.schema.id(FACT_OPERATOR)?,
            self.schema.id(FACT_RESULT)?,
        ])
    }

    /// Recalls the result of `op1 <operator> op2` from the memorized facts.
    /// Operands are compared as attribute readings, so a zero operand matches
    /// a fact that leaves that attribute inactive.
    pub fn lookup_arithmetic(
        &self,
        op1: Nibble,
        op2: Nibble,
        operator: Operator,
    ) -> Result<Nibble> {
        let [f1, f2, fo, fr] = self.fact_fields()?;
        let hits: Vec<&LtmWord> = self
            .words
            .iter()
            .filter(|w| w.machine.is_none())
            .filter(|w| w.read(f1) == op1 && w.read(f2) == op2 && w.read(fo) == operator.code())
            .collect();
        match hits.as_slice() {
            [] => Err(Error::NoRecall),
            [fact] => Ok(fact.read(fr)),
            many => Err(Error::MultipleMatch(many.len())),
        }
    }
}
