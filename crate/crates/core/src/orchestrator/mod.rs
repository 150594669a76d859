//! The attention loop: scenario loading, ticks and the trace.

pub mod landmarks;
mod scenario;
pub mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub use scenario::load_scenario;
pub use trace::{EventKind, TraceEvent};

use crate::config::Config;
use crate::cue_editor;
use crate::importance::{self, Gate};
use crate::ltm::{Ltm, SearchCues, SearchOutcome, WordId};
use crate::memory::{AttributeSchema, FieldId, FieldValues, StmWord};
use crate::nanocode::NanoProgram;
use crate::state_machine::{self, ExecOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensoryInput {
    pub tick: u64,
    pub values: FieldValues,
}

#[derive(Debug, Clone)]
pub struct World {
    pub schema: Arc<AttributeSchema>,
    pub stm: StmWord,
    pub ltm: Ltm,
    pub config: Config,
    /// Sorted by tick; entries are consumed as their tick comes due.
    pub sensory: Vec<SensoryInput>,
    /// Named nanocode blocks from the scenario.
    pub programs: BTreeMap<String, NanoProgram>,
    pub tick: u64,
    pub trace: Vec<TraceEvent>,
    /// Loader remarks (skipped commits, singular landmarks).
    pub notes: Vec<String>,
    pub landmark_determinant: Option<i64>,
}

fn rows(ids: &[WordId]) -> String {
    if ids.is_empty() {
        return "-".to_string();
    }
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn outcome_rows(outcome: &SearchOutcome) -> String {
    rows(&outcome.matches())
}

impl World {
    pub fn new(schema: Arc<AttributeSchema>, config: Config) -> World {
        World {
            stm: StmWord::new(schema.clone(), config.ttl_default),
            ltm: Ltm::new(schema.clone(), config.rehearsal_threshold),
            schema,
            config,
            sensory: Vec::new(),
            programs: BTreeMap::new(),
            tick: 0,
            trace: Vec::new(),
            notes: Vec::new(),
            landmark_determinant: None,
        }
    }

    /// One tick of the loop. Returns the events it appended.
    pub fn attention_cycle(&mut self) -> &[TraceEvent] {
        let start = self.trace.len();
        let tick = self.tick;
        let ttl = self.config.ttl_default;

        // sensory input for this tick wins over anything recalled after it
        let mut sensed = BTreeSet::new();
        let due: Vec<SensoryInput> = self
            .sensory
            .iter()
            .filter(|s| s.tick == tick)
            .cloned()
            .collect();
        for input in due {
            self.stm
                .dominate(&input.values, ttl)
                .expect("sensory values are checked at load");
            sensed.extend(input.values.keys().copied());
            self.emit(TraceEvent::new(tick, EventKind::Sensory).with(
                "values",
                self.schema.render_values(&input.values).replace(' ', ","),
            ));
        }

        let cues = SearchCues::from_values(&self.stm.live_values());
        if !cues.is_empty() {
            self.recall(&cues, &sensed);
        }

        self.run_machine();

        self.stm.tick_decay();
        self.tick += 1;
        &self.trace[start..]
    }

    fn recall(&mut self, cues: &SearchCues, sensed: &BTreeSet<FieldId>) {
        let tick = self.tick;
        let outcome = self.ltm.search(cues);
        self.emit(
            TraceEvent::new(tick, EventKind::Search)
                .with("cues", cues.render(&self.schema))
                .with("outcome", outcome.class())
                .with("rows", outcome_rows(&outcome)),
        );

        let (delivered, in_force, via) = match &outcome {
            SearchOutcome::NoRecall => {
                self.emit(
                    TraceEvent::new(tick, EventKind::NoRecall)
                        .with("cues", cues.render(&self.schema)),
                );
                let edit = cue_editor::edit_and_search(
                    &self.ltm,
                    cues,
                    self.config.multi_match_policy,
                    self.config.pair_removal,
                )
                .expect("delivery from a recall outcome");
                for (i, pass) in edit.passes.iter().enumerate().skip(1) {
                    let removed: Vec<String> = pass
                        .removed
                        .iter()
                        .map(|&(f, v)| format!("{}:{}", self.schema.name(f), v.value()))
                        .collect();
                    self.emit(
                        TraceEvent::new(tick, EventKind::EditPass)
                            .with("pass", i)
                            .with("removed", removed.join(","))
                            .with("outcome", pass.outcome.class())
                            .with("rows", outcome_rows(&pass.outcome)),
                    );
                }
                match edit.resolved {
                    Some(r) => (r.delivered, r.cues, "edit"),
                    None => return,
                }
            }
            SearchOutcome::Single(id) => (vec![*id], cues.clone(), "search"),
            SearchOutcome::Multiple { count, matches } => {
                let class = self
                    .ltm
                    .classify_multiple(matches)
                    .expect("multiple outcome has at least two matches");
                self.emit(
                    TraceEvent::new(tick, EventKind::MultMatch)
                        .with("count", count)
                        .with("rows", rows(matches))
                        .with("class", class),
                );
                let delivered = self
                    .ltm
                    .deliver(&outcome, self.config.multi_match_policy, cues)
                    .expect("delivery from a recall outcome");
                (delivered, cues.clone(), "search")
            }
        };

        for id in delivered {
            self.deliver_word(id, &in_force, via, sensed);
        }
    }

    fn deliver_word(
        &mut self,
        id: WordId,
        cues: &SearchCues,
        via: &str,
        sensed: &BTreeSet<FieldId>,
    ) {
        let tick = self.tick;
        let word = self.ltm.word(id).expect("delivered ids exist").clone();
        let record = importance::encode_importance(&word, cues, &self.schema);
        if importance::gate(
            &record,
            self.config.repression_limit,
            self.config.dream_mode,
        ) == Gate::Repressed
        {
            self.emit(
                TraceEvent::new(tick, EventKind::Repressed)
                    .with("row", id)
                    .with("irrational", record.irrational_count)
                    .with("limit", self.config.repression_limit),
            );
            return;
        }
        self.stm
            .dominate_except(word.values(), self.config.ttl_default, sensed)
            .expect("committed words conform to the schema");
        let action = word.action().map_or("-".to_string(), |a| a.to_string());
        self.emit(
            TraceEvent::new(tick, EventKind::Recall)
                .with("row", id)
                .with("via", via)
                .with("cues", cues.render(&self.schema))
                .with("action", &action),
        );
        if self.config.backtrack && word.action().is_some() {
            let before = state_machine::current_action(&self.stm);
            let swapped = state_machine::interchange_left_right(&self.stm)
                .expect("schema has an action field");
            self.stm = swapped;
            let after = state_machine::current_action(&self.stm);
            let show =
                |a: Option<crate::memory::Action>| a.map_or("-".to_string(), |a| a.to_string());
            self.emit(
                TraceEvent::new(tick, EventKind::Interchange)
                    .with("from", show(before))
                    .with("to", show(after)),
            );
        }
    }

    fn run_machine(&mut self) {
        let tick = self.tick;
        let Some(machine) = state_machine::trigger(&self.ltm, &self.stm) else {
            return;
        };
        let machine = machine.clone();
        let exec = state_machine::execute(&machine, &self.stm, &self.ltm);
        for rec in &exec.steps {
            let mut ev = TraceEvent::new(tick, EventKind::MachineStep)
                .with("machine", machine.id())
                .with("step", rec.index + 1);
            for (k, v) in rec
                .action
                .to_string()
                .split(' ')
                .filter_map(|kv| kv.split_once('='))
            {
                ev = ev.with(k, v);
            }
            let mut snapshot = self.stm.clone();
            snapshot.replace_bits(rec.snapshot.clone(), &BTreeSet::new());
            if let Some(problem) = state_machine::render_problem(&snapshot) {
                ev = ev.with("problem", problem);
            }
            ev = ev.with("stm", &rec.snapshot);
            if let Some(diag) = &rec.diagnostic {
                ev = ev.with("warn", format!("{}:nonzero_dst", diag.program));
            }
            self.emit(ev);
        }
        if let ExecOutcome::Aborted { step, error } = &exec.outcome {
            self.emit(
                TraceEvent::new(tick, EventKind::NoRecall)
                    .with("machine", machine.id())
                    .with("step", step + 1)
                    .with("error", error),
            );
        }
        self.stm = exec.stm;
    }

    /// Runs `n` ticks, returning the events they produced.
    pub fn run_simulation(&mut self, n: u64) -> &[TraceEvent] {
        self.run_streaming(n, |_| {})
    }

    /// As [`run_simulation`](Self::run_simulation), handing each event to
    /// `sink` as soon as its tick completes.
    pub fn run_streaming(&mut self, n: u64, mut sink: impl FnMut(&TraceEvent)) -> &[TraceEvent] {
        let start = self.trace.len();
        for _ in 0..n {
            for ev in self.attention_cycle() {
                sink(ev);
            }
        }
        &self.trace[start..]
    }

    /// Human-readable dump of the loaded world.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let s = &self.schema;
        out.push_str(&format!(
            "schema: {} fields, bus width {}\n",
            s.len(),
            s.bus_width()
        ));
        for id in s.ids() {
            let kind = format!("{:?}", s.kind(id)).to_lowercase();
            out.push_str(&format!("  field {} {} kind={kind}\n", id.0, s.name(id)));
        }
        let c = &self.config;
        out.push_str(&format!(
            "config: ttl_default={} rehearsal_threshold={} repression_limit={} dream_mode={} multi_match_policy={} pair_removal={} backtrack={}\n",
            c.ttl_default, c.rehearsal_threshold, c.repression_limit, c.dream_mode, c.multi_match_policy, c.pair_removal, c.backtrack
        ));
        out.push_str(&format!("ltm: {} words\n", self.ltm.len()));
        for (id, w) in self.ltm.words() {
            let tag = match (w.action(), w.machine()) {
                (_, Some(m)) => format!(" machine={}", self.ltm.machines()[m].id()),
                (Some(a), None) => format!(" ({a})"),
                (None, None) => String::new(),
            };
            out.push_str(&format!(
                "  row {id}: {}{tag}\n",
                s.render_values(w.values())
            ));
        }
        for m in self.ltm.machines() {
            out.push_str(&format!(
                "machine {}: trigger {} steps={} nano_ops={}\n",
                m.id(),
                m.trigger().render(s),
                m.steps().len(),
                m.nano_ops()
            ));
        }
        for (name, p) in &self.programs {
            out.push_str(&format!("nanocode {name}: {} ops\n", p.len()));
        }
        out.push_str(&format!("sensory: {} inputs\n", self.sensory.len()));
        match self.landmark_determinant {
            Some(d) => out.push_str(&format!("landmark determinant: {d}\n")),
            None => out.push_str("landmark determinant: n/a\n"),
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(&format!(
            "tick: {}\nstm: {}\n",
            self.tick,
            self.stm.render()
        ));
        out
    }

    fn emit(&mut self, event: TraceEvent) {
        self.trace.push(event);
    }
}
