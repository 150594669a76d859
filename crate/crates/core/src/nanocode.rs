//! Reversible FM/TO nanocode over the STM bus.
//!
//! An operation names a set of condition bits (FM) and a set of target bits
//! (TO). When every FM bit is 1, every TO bit is complemented. With FM and
//! TO disjoint the flip cannot disturb its own condition, so each operation
//! is its own inverse and a program is undone by running it backwards.
//!
//! Assembly text is two lines per operation:
//!
//! ```text
//! # move field 5 into field 6
//! FM 20
//! TO 24
//! ```
//!
//! `FM` may be left empty (unconditional flip); `TO` may not.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::memory::{AttributeSchema, Bus, FieldId, FIELD_WIDTH};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NanoOp {
    pub fm: BTreeSet<usize>,
    pub to: BTreeSet<usize>,
}

impl NanoOp {
    pub fn new(fm: impl IntoIterator<Item = usize>, to: impl IntoIterator<Item = usize>) -> Self {
        NanoOp {
            fm: fm.into_iter().collect(),
            to: to.into_iter().collect(),
        }
    }

    pub fn fires(&self, bits: &Bus) -> bool {
        self.fm.iter().all(|&b| bits.get(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NanoProgram {
    pub name: String,
    pub ops: Vec<NanoOp>,
}

impl NanoProgram {
    pub fn new(name: impl Into<String>, ops: Vec<NanoOp>) -> Self {
        NanoProgram {
            name: name.into(),
            ops,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Assembly lines: two per operation.
    pub fn line_count(&self) -> usize {
        2 * self.ops.len()
    }

    /// Fields containing at least one TO bit.
    pub fn touched_fields(&self) -> BTreeSet<FieldId> {
        self.ops
            .iter()
            .flat_map(|op| op.to.iter())
            .map(|&b| FieldId(b / FIELD_WIDTH))
            .collect()
    }
}

fn join(bits: &BTreeSet<usize>) -> String {
    bits.iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical assembly text, the inverse of [`assemble`].
impl fmt::Display for NanoProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            if op.fm.is_empty() {
                writeln!(f, "FM")?;
            } else {
                writeln!(f, "FM {}", join(&op.fm))?;
            }
            writeln!(f, "TO {}", join(&op.to))?;
        }
        Ok(())
    }
}

pub fn assemble(name: &str, text: &str) -> Result<NanoProgram> {
    assemble_lines(name, text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

/// Assembles numbered lines; diagnostics carry the given line numbers.
pub fn assemble_lines<'a>(
    name: &str,
    lines: impl IntoIterator<Item = (usize, &'a str)>,
) -> Result<NanoProgram> {
    let mut ops = Vec::new();
    let mut pending_fm: Option<(usize, BTreeSet<usize>)> = None;
    for (line_no, raw) in lines {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        let bits = parse_bits(line_no, rest)?;
        match (keyword, pending_fm.take()) {
            ("FM", None) => pending_fm = Some((line_no, bits)),
            ("TO", Some((_, fm))) => {
                if bits.is_empty() {
                    return Err(Error::parse(line_no, "TO line names no bits"));
                }
                ops.push(NanoOp { fm, to: bits });
            }
            ("FM", Some(_)) => {
                return Err(Error::parse(line_no, "FM/TO out of order: expected TO"))
            }
            ("TO", None) => return Err(Error::parse(line_no, "FM/TO out of order: expected FM")),
            (other, _) => {
                return Err(Error::parse(
                    line_no,
                    format!("expected FM or TO, found `{other}`"),
                ))
            }
        }
    }
    if let Some((line_no, _)) = pending_fm {
        return Err(Error::parse(
            line_no,
            "odd line count: FM line without a TO line",
        ));
    }
    Ok(NanoProgram::new(name, ops))
}

fn parse_bits(line_no: usize, rest: &str) -> Result<BTreeSet<usize>> {
    let mut bits = BTreeSet::new();
    if rest.is_empty() {
        return Ok(bits);
    }
    for tok in rest.split(',') {
        let tok = tok.trim();
        let bit: usize = tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("malformed bit index `{tok}`")))?;
        if !bits.insert(bit) {
            return Err(Error::parse(line_no, format!("bit {bit} listed twice")));
        }
    }
    Ok(bits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// FM and TO share these bits.
    Overlap(Vec<usize>),
    OutOfRange(usize),
    EmptyTo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub op: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.op + 1;
        match &self.kind {
            ViolationKind::Overlap(bits) => write!(
                f,
                "op {n}: FM and TO overlap at bit(s) {}",
                bits.iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            ViolationKind::OutOfRange(bit) => {
                write!(f, "op {n}: bit {bit} is off the bus")
            }
            ViolationKind::EmptyTo => write!(f, "op {n}: TO is empty"),
        }
    }
}

/// Checks every operation for FM/TO disjointness and bus bounds.
pub fn verify(program: &NanoProgram, bus_width: usize) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for (i, op) in program.ops.iter().enumerate() {
        if op.to.is_empty() {
            violations.push(Violation {
                op: i,
                kind: ViolationKind::EmptyTo,
            });
        }
        let overlap: Vec<usize> = op.fm.intersection(&op.to).copied().collect();
        if !overlap.is_empty() {
            violations.push(Violation {
                op: i,
                kind: ViolationKind::Overlap(overlap),
            });
        }
        for &bit in op.fm.iter().chain(op.to.iter()) {
            if bit >= bus_width {
                violations.push(Violation {
                    op: i,
                    kind: ViolationKind::OutOfRange(bit),
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Like [`verify`] but folds the violations into a single error.
pub fn ensure_verified(program: &NanoProgram, bus_width: usize) -> Result<()> {
    verify(program, bus_width).map_err(|v| Error::Unverified {
        name: program.name.clone(),
        detail: v
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    })
}

/// Conditional flip.
pub fn step(bits: &mut Bus, op: &NanoOp) {
    if op.fires(bits) {
        for &b in &op.to {
            bits.flip(b);
        }
    }
}

pub fn run(bits: &Bus, program: &NanoProgram) -> Bus {
    let mut out = bits.clone();
    for op in &program.ops {
        step(&mut out, op);
    }
    out
}

/// Bits that must read zero before a generated move or copy runs; nonzero
/// destinations turn the move into an XOR.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Guard {
    pub zero_bits: Vec<usize>,
}

impl Guard {
    pub fn field(dst: FieldId) -> Self {
        Guard {
            zero_bits: dst.bits().collect(),
        }
    }
}

/// Recognizes a program with exactly the shape [`emit_move`] or
/// [`emit_copy`] generates and returns the matching destination guard.
pub fn infer_guard(schema: &AttributeSchema, program: &NanoProgram) -> Guard {
    let Some(first) = program.ops.first() else {
        return Guard::default();
    };
    let (Some(&src_bit), Some(&dst_bit)) = (first.fm.iter().next(), first.to.iter().next()) else {
        return Guard::default();
    };
    let (src, dst) = (
        FieldId(src_bit / FIELD_WIDTH),
        FieldId(dst_bit / FIELD_WIDTH),
    );
    if src.0 >= schema.len() || dst.0 >= schema.len() || src == dst {
        return Guard::default();
    }
    let same_ops = |p: Result<NanoProgram>| p.map(|p| p.ops == program.ops).unwrap_or(false);
    if same_ops(emit_move(schema, src, dst)) || same_ops(emit_copy(schema, src, dst)) {
        Guard::field(dst)
    } else {
        Guard::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub program: String,
    pub nonzero_bits: Vec<usize>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: destination not clear at bit(s) {}",
            self.program,
            self.nonzero_bits
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// Runs the program after checking its guard. A failed guard is reported,
/// not refused: the flips are still well defined.
pub fn run_checked(bits: &Bus, program: &NanoProgram, guard: &Guard) -> (Bus, Option<Diagnostic>) {
    let nonzero: Vec<usize> = guard
        .zero_bits
        .iter()
        .copied()
        .filter(|&b| bits.get(b))
        .collect();
    let diag = (!nonzero.is_empty()).then(|| Diagnostic {
        program: program.name.clone(),
        nonzero_bits: nonzero,
    });
    (run(bits, program), diag)
}

const REVERSE_SUFFIX: &str = ".rev";

/// The inverse program: same operations, opposite order.
pub fn reverse(program: &NanoProgram) -> NanoProgram {
    let name = match program.name.strip_suffix(REVERSE_SUFFIX) {
        Some(base) => base.to_string(),
        None => format!("{}{REVERSE_SUFFIX}", program.name),
    };
    NanoProgram::new(name, program.ops.iter().rev().cloned().collect())
}

/// Copies `src` into `dst` bit by bit (LSB first), then clears `src` using
/// the copy as condition. `dst` must start clear.
pub fn emit_move(schema: &AttributeSchema, src: FieldId, dst: FieldId) -> Result<NanoProgram> {
    let mut program = emit_copy(schema, src, dst)?;
    program.name = format!("move_{}_{}", schema.name(src), schema.name(dst));
    program
        .ops
        .extend((0..FIELD_WIDTH).map(|i| NanoOp::new([dst.bit(i)], [src.bit(i)])));
    Ok(program)
}

/// Copies `src` into `dst` (LSB first); `src` is kept.
pub fn emit_copy(schema: &AttributeSchema, src: FieldId, dst: FieldId) -> Result<NanoProgram> {
    schema.check(src)?;
    schema.check(dst)?;
    if src == dst {
        return Err(Error::SameField(schema.name(src).to_string()));
    }
    let ops = (0..FIELD_WIDTH)
        .map(|i| NanoOp::new([src.bit(i)], [dst.bit(i)]))
        .collect();
    Ok(NanoProgram::new(
        format!("copy_{}_{}", schema.name(src), schema.name(dst)),
        ops,
    ))
}

/// Exchanges two bus bits with three conditional flips.
pub fn emit_swap_bits(a: usize, b: usize) -> Result<NanoProgram> {
    if a == b {
        return Err(Error::SameBit(a));
    }
    Ok(NanoProgram::new(
        format!("swap_{a}_{b}"),
        vec![
            NanoOp::new([a], [b]),
            NanoOp::new([b], [a]),
            NanoOp::new([a], [b]),
        ],
    ))
}

/// A random program that passes [`verify`] for `bus_width` (at least 2):
/// up to `max_ops` operations, each with 1..=3 TO bits and 0..=3 FM bits.
pub fn random_program<R: Rng + ?Sized>(
    rng: &mut R,
    bus_width: usize,
    max_ops: usize,
) -> NanoProgram {
    assert!(bus_width >= 2, "need two bits for a disjoint FM/TO pair");
    let n_ops = rng.gen_range(0..=max_ops);
    let ops = (0..n_ops)
        .map(|_| {
            let n_to = rng.gen_range(1..=3.min(bus_width - 1));
            let n_fm = rng.gen_range(0..=3.min(bus_width - n_to));
            let picked = sample(rng, bus_width, n_to + n_fm).into_vec();
            NanoOp::new(
                picked[n_to..].iter().copied(),
                picked[..n_to].iter().copied(),
            )
        })
        .collect();
    NanoProgram::new("random", ops)
}
