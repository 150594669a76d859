//! Scenario files.
//!
//! ```text
//! [schema]
//! field B kind=rational
//! [config]
//! rehearsal_threshold=3
//! [ltm]
//! B=1 C=2 D=1 S=1 action=Right rehearsals=3
//! [arith]
//! 11 - 5 = 6
//! [nanocode move_y]
//! FM 20
//! TO 24
//! [machine method_alpha]
//! trigger: problem_x=1 problem_eq=1
//! nano move_y
//! arith arith_op1 minus arith_op2 -> arith_result
//! halt
//! [sensory]
//! tick=0 B=1 C=2
//! ```
//!
//! LTM words, facts and machines commit in file order. `[ltm]` lines may pin
//! an address with `row=<n>` (1-based); pinning an occupied row is a
//! write-once violation.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{landmarks, SensoryInput, World};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ltm::SearchCues;
use crate::ltm::{LtmWord, Memorized, WordId};
use crate::memory::{
    Action, AttributeSchema, FieldDescriptor, FieldKind, FieldValues, Nibble, Operator,
};
use crate::nanocode::{self, NanoProgram};
use crate::state_machine::{self, StateMachine, Step};

type Line<'a> = (usize, &'a str);

enum Item<'a> {
    Word(Line<'a>),
    Fact(Line<'a>),
    Machine {
        header: usize,
        id: &'a str,
        body: Vec<Line<'a>>,
    },
}

#[derive(Default)]
struct Raw<'a> {
    schema: Vec<Line<'a>>,
    schema_seen: bool,
    config: Vec<Line<'a>>,
    items: Vec<Item<'a>>,
    nanocode: Vec<(usize, &'a str, Vec<Line<'a>>)>,
    sensory: Vec<Line<'a>>,
}

enum Section {
    Preamble,
    Schema,
    Config,
    Ltm,
    Arith,
    Nanocode,
    Machine,
    Sensory,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn split_sections(text: &str) -> Result<Raw<'_>> {
    let mut raw = Raw::default();
    let mut section = Section::Preamble;
    for (i, full) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(full);
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line_no, "unterminated section header"))?
                .trim();
            let (kind, arg) = match header.split_once(char::is_whitespace) {
                Some((k, a)) => (k, Some(a.trim())),
                None => (header, None),
            };
            section = match (kind, arg) {
                ("schema", None) => {
                    raw.schema_seen = true;
                    Section::Schema
                }
                ("config", None) => Section::Config,
                ("ltm", None) => Section::Ltm,
                ("arith", None) => Section::Arith,
                ("sensory", None) => Section::Sensory,
                ("nanocode", Some(name)) => {
                    raw.nanocode.push((line_no, name, Vec::new()));
                    Section::Nanocode
                }
                ("machine", Some(id)) => {
                    raw.items.push(Item::Machine {
                        header: line_no,
                        id,
                        body: Vec::new(),
                    });
                    Section::Machine
                }
                _ => {
                    return Err(Error::parse(
                        line_no,
                        format!("unknown section `[{header}]`"),
                    ))
                }
            };
            continue;
        }
        let entry = (line_no, line);
        match section {
            Section::Preamble => {
                return Err(Error::parse(line_no, "content before the first section"))
            }
            Section::Schema => raw.schema.push(entry),
            Section::Config => raw.config.push(entry),
            Section::Ltm => raw.items.push(Item::Word(entry)),
            Section::Arith => raw.items.push(Item::Fact(entry)),
            Section::Sensory => raw.sensory.push(entry),
            // nanocode keeps the raw line: the assembler strips its own comments
            Section::Nanocode => raw.nanocode.last_mut().unwrap().2.push((line_no, full)),
            Section::Machine => match raw.items.last_mut() {
                Some(Item::Machine { body, .. }) => body.push(entry),
                _ => unreachable!("machine section always opens an item"),
            },
        }
    }
    Ok(raw)
}

fn parse_schema(lines: &[Line<'_>]) -> Result<AttributeSchema> {
    let mut fields = Vec::with_capacity(lines.len());
    for &(line_no, line) in lines {
        let mut toks = line.split_whitespace();
        if toks.next() != Some("field") {
            return Err(Error::parse(
                line_no,
                "expected `field <name> kind=<rational|irrational>`",
            ));
        }
        let name = toks
            .next()
            .ok_or_else(|| Error::parse(line_no, "field name missing"))?;
        let mut kind = FieldKind::Rational;
        for tok in toks {
            kind = match tok {
                "kind=rational" => FieldKind::Rational,
                "kind=irrational" => FieldKind::Irrational,
                other => return Err(Error::parse(line_no, format!("unexpected `{other}`"))),
            };
        }
        fields.push(FieldDescriptor {
            name: name.to_string(),
            kind,
        });
    }
    let schema = AttributeSchema::new(fields).map_err(|e| e.at(lines[0].0))?;
    Ok(schema)
}

fn key_value(line_no: usize, tok: &str) -> Result<(&str, &str)> {
    tok.split_once('=')
        .ok_or_else(|| Error::parse(line_no, format!("expected key=value, found `{tok}`")))
}

fn parse_int(line_no: usize, s: &str) -> Result<i64> {
    s.parse()
        .map_err(|_| Error::parse(line_no, format!("expected a decimal integer, found `{s}`")))
}

fn parse_values<'a>(
    schema: &AttributeSchema,
    line_no: usize,
    toks: impl Iterator<Item = &'a str>,
) -> Result<FieldValues> {
    let mut values = FieldValues::new();
    for tok in toks {
        let (k, v) = key_value(line_no, tok)?;
        let id = schema.id(k).map_err(|e| e.at(line_no))?;
        let nib = Nibble::try_from(parse_int(line_no, v)?).map_err(|e| e.at(line_no))?;
        if values.insert(id, nib).is_some() {
            return Err(Error::parse(line_no, format!("field `{k}` given twice")));
        }
    }
    Ok(values)
}

fn parse_cues(schema: &AttributeSchema, line_no: usize, text: &str) -> Result<SearchCues> {
    let mut cues = Vec::new();
    for tok in text.split_whitespace() {
        let (k, v) = key_value(line_no, tok)?;
        let id = schema.id(k).map_err(|e| e.at(line_no))?;
        cues.push((
            id,
            Nibble::try_from(parse_int(line_no, v)?).map_err(|e| e.at(line_no))?,
        ));
    }
    SearchCues::new(cues).map_err(|e| e.at(line_no))
}

fn commit_word(world: &mut World, (line_no, line): Line<'_>) -> Result<()> {
    let schema = world.schema.clone();
    let mut rehearsals = world.config.rehearsal_threshold;
    let mut row = None;
    let mut action = None;
    let mut value_toks = Vec::new();
    for tok in line.split_whitespace() {
        let (k, v) = key_value(line_no, tok)?;
        match k {
            "rehearsals" => rehearsals = parse_int(line_no, v)?.max(0) as u32,
            "row" => {
                let r = parse_int(line_no, v)?;
                if r < 1 {
                    return Err(Error::parse(line_no, "rows are numbered from 1"));
                }
                row = Some(WordId(r as usize - 1));
            }
            crate::memory::ACTION_FIELD if v.parse::<i64>().is_err() => {
                action = Some(v.parse::<Action>().map_err(|e| e.at(line_no))?)
            }
            _ => value_toks.push(tok),
        }
    }
    let values = parse_values(&schema, line_no, value_toks.into_iter())?;
    let word = LtmWord::new(values, action);
    let addr = row.unwrap_or(WordId(world.ltm.len()));
    match world
        .ltm
        .memorize_at(addr, word, rehearsals)
        .map_err(|e| e.at(line_no))?
    {
        Memorized::Committed(_) => {}
        Memorized::NotCommitted => world.notes.push(format!(
            "line {line_no}: rehearsed {rehearsals} < {} times, not memorized",
            world.ltm.rehearsal_threshold()
        )),
    }
    Ok(())
}

fn commit_fact(world: &mut World, (line_no, line): Line<'_>) -> Result<()> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let [a, op, b, "=", c] = toks.as_slice() else {
        return Err(Error::parse(line_no, "expected `<a> <op> <b> = <c>`"));
    };
    let nib = |s: &str| -> Result<Nibble> {
        Nibble::try_from(parse_int(line_no, s)?).map_err(|e| e.at(line_no))
    };
    let op: Operator = op.parse().map_err(|e: Error| e.at(line_no))?;
    let r = world.config.rehearsal_threshold;
    world
        .ltm
        .memorize_fact(nib(a)?, op, nib(b)?, nib(c)?, r)
        .map_err(|e| e.at(line_no))?;
    Ok(())
}

fn build_machine(
    world: &World,
    header: usize,
    id: &str,
    body: &[Line<'_>],
) -> Result<StateMachine> {
    let schema = &world.schema;
    let mut lines = body.iter();
    let &(trig_line, trig) = lines
        .next()
        .ok_or_else(|| Error::parse(header, format!("machine `{id}` has no trigger")))?;
    let cues = trig.strip_prefix("trigger:").ok_or_else(|| {
        Error::parse(
            trig_line,
            "first machine line must be `trigger: <field>=<int> ...`",
        )
    })?;
    let trigger = parse_cues(schema, trig_line, cues)?;
    let mut steps = Vec::new();
    for &(line_no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let step = match toks.as_slice() {
            ["nano", name] => {
                let program = world
                    .programs
                    .get(*name)
                    .ok_or_else(|| {
                        Error::parse(line_no, format!("no nanocode block named `{name}`"))
                    })?
                    .clone();
                let guard = nanocode::infer_guard(schema, &program);
                Step::RunNano { program, guard }
            }
            ["arith", op1, operator, op2, "->", result] => {
                let f = |n: &str| schema.id(n).map_err(|e| e.at(line_no));
                Step::ArithLookup {
                    op1: f(op1)?,
                    op2: f(op2)?,
                    operator: operator.parse().map_err(|e: Error| e.at(line_no))?,
                    result: f(result)?,
                }
            }
            ["halt"] => Step::Halt,
            _ => return Err(Error::parse(
                line_no,
                "expected `nano <program>`, `arith <op1> <operator> <op2> -> <result>` or `halt`",
            )),
        };
        steps.push(step);
    }
    Ok(StateMachine::new(id, trigger, steps))
}

/// Parses a scenario into a fresh world at tick 0.
pub fn load_scenario(text: &str) -> Result<World> {
    let raw = split_sections(text)?;
    if !raw.schema_seen || raw.schema.is_empty() {
        return Err(Error::parse(1, "scenario declares no [schema] fields"));
    }
    let schema = Arc::new(parse_schema(&raw.schema)?);

    let mut config = Config::default();
    for &(line_no, line) in &raw.config {
        for tok in line.split_whitespace() {
            let (k, v) = key_value(line_no, tok)?;
            config.set(k, v).map_err(|e| e.at(line_no))?;
        }
    }
    let cfg_line = raw.config.first().map_or(1, |l| l.0);
    config.validate().map_err(|e| e.at(cfg_line))?;

    let mut world = World::new(schema.clone(), config);

    let mut programs: BTreeMap<String, NanoProgram> = BTreeMap::new();
    for (header, name, lines) in &raw.nanocode {
        if programs.contains_key(*name) {
            return Err(Error::parse(
                *header,
                format!("nanocode `{name}` defined twice"),
            ));
        }
        let program = nanocode::assemble_lines(name, lines.iter().copied())?;
        nanocode::ensure_verified(&program, schema.bus_width()).map_err(|e| e.at(*header))?;
        programs.insert(name.to_string(), program);
    }
    world.programs = programs;

    for item in &raw.items {
        match item {
            Item::Word(line) => commit_word(&mut world, *line)?,
            Item::Fact(line) => commit_fact(&mut world, *line)?,
            Item::Machine { header, id, body } => {
                let machine = build_machine(&world, *header, id, body)?;
                state_machine::install_machine(&mut world.ltm, machine)
                    .map_err(|e| e.at(*header))?;
            }
        }
    }

    for &(line_no, line) in &raw.sensory {
        let mut toks = line.split_whitespace();
        let first = toks.next().unwrap_or("");
        let tick = match first.strip_prefix("tick=") {
            Some(t) => parse_int(line_no, t)?,
            None => return Err(Error::parse(line_no, "sensory lines start with `tick=<n>`")),
        };
        if tick < 0 {
            return Err(Error::parse(line_no, "negative tick"));
        }
        let values = parse_values(&schema, line_no, toks)?;
        world.sensory.push(SensoryInput {
            tick: tick as u64,
            values,
        });
    }
    world.sensory.sort_by_key(|s| s.tick);

    let (matrix, columns) = landmarks::landmark_matrix(&world.ltm);
    if !matrix.is_empty() && matrix.len() == columns.len() {
        world.landmark_determinant = landmarks::determinant(&matrix);
        if world.landmark_determinant == Some(0) {
            world.notes.push(
                "warning: landmark matrix is singular; some intersections are not uniquely marked"
                    .to_string(),
            );
        }
    }
    Ok(world)
}
