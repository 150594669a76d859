//! State machines embedded in long-term memory.
//!
//! A machine is a linear list of steps that, once triggered by the contents
//! of STM, runs to completion without further direction: nanocode moves bits
//! around the bus, arithmetic results are recalled from memorized facts.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::ltm::{Ltm, SearchCues, FACT_OP1, FACT_OP2, FACT_RESULT};
use crate::memory::{Action, AttributeSchema, Bus, FieldId, Nibble, Operator, StmWord};
use crate::nanocode::{self, Diagnostic, Guard, NanoProgram};

pub const PROBLEM_A: &str = "problem_A";
pub const PROBLEM_X: &str = "problem_x";
pub const PROBLEM_OP: &str = "problem_op";
pub const PROBLEM_B: &str = "problem_B";
pub const PROBLEM_EQ: &str = "problem_eq";
pub const PROBLEM_Y: &str = "problem_Y";
pub const DIV_OP1: &str = "div_op1";
pub const DIV_OP2: &str = "div_op2";
pub const DIV_RESULT: &str = "div_result";

pub const METHOD_ALPHA: &str = "method_alpha";
pub const SOLVE_2X: &str = "solve_2x";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    RunNano {
        program: NanoProgram,
        guard: Guard,
    },
    ArithLookup {
        op1: FieldId,
        op2: FieldId,
        operator: Operator,
        result: FieldId,
    },
    Halt,
}

impl Step {
    pub fn nano(program: NanoProgram) -> Step {
        Step::RunNano {
            program,
            guard: Guard::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMachine {
    id: String,
    trigger: SearchCues,
    steps: Vec<Step>,
}

impl StateMachine {
    pub fn new(id: impl Into<String>, trigger: SearchCues, steps: Vec<Step>) -> Self {
        StateMachine {
            id: id.into(),
            trigger,
            steps,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn trigger(&self) -> &SearchCues {
        &self.trigger
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Nanocode operations across all steps.
    pub fn nano_ops(&self) -> usize {
        self.programs().map(NanoProgram::len).sum()
    }

    pub fn programs(&self) -> impl Iterator<Item = &NanoProgram> {
        self.steps.iter().filter_map(|s| match s {
            Step::RunNano { program, .. } => Some(program),
            _ => None,
        })
    }

    pub fn validate(&self, schema: &AttributeSchema) -> Result<()> {
        let invalid = |reason: String| Error::InvalidMachine {
            id: self.id.clone(),
            reason,
        };
        if self.steps.is_empty() {
            return Err(invalid("no steps".into()));
        }
        if self.trigger.is_empty() {
            return Err(invalid("empty trigger".into()));
        }
        for (f, _) in self.trigger.iter() {
            schema.check(f)?;
        }
        for step in &self.steps {
            match step {
                Step::RunNano { program, .. } => {
                    nanocode::ensure_verified(program, schema.bus_width())?
                }
                Step::ArithLookup {
                    op1, op2, result, ..
                } => {
                    for f in [op1, op2, result] {
                        schema.check(*f)?;
                    }
                }
                Step::Halt => {}
            }
        }
        Ok(())
    }

    /// Every trigger cue equals the current STM reading of its field.
    pub fn triggered_by(&self, stm: &StmWord) -> bool {
        self.trigger.iter().all(|(f, v)| stm.read(f) == v)
    }
}

/// Stores a learned machine in LTM. Machines are write-once like any other
/// engram: installing the same machine twice is a write-once violation.
pub fn install_machine(ltm: &mut Ltm, machine: StateMachine) -> Result<String> {
    machine.validate(ltm.schema())?;
    if let Some(existing) = ltm.machines().iter().position(|m| m.id == machine.id) {
        if ltm.machines()[existing] == machine {
            let (word, _) = ltm
                .words()
                .find(|(_, w)| w.machine() == Some(existing))
                .expect("every machine has a carrier word");
            return Err(Error::WriteOnceViolation(word));
        }
        return Err(Error::DuplicateMachine(machine.id));
    }
    let id = machine.id.clone();
    ltm.commit_machine(machine)?;
    Ok(id)
}

/// The first installed machine whose trigger matches STM.
pub fn trigger<'a>(ltm: &'a Ltm, stm: &StmWord) -> Option<&'a StateMachine> {
    ltm.machines().iter().find(|m| m.triggered_by(stm))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepAction {
    Nano {
        program: String,
        ops: usize,
    },
    Lookup {
        op1: Nibble,
        operator: Operator,
        op2: Nibble,
        result: Nibble,
    },
    Halt,
}

impl fmt::Display for StepAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepAction::Nano { program, ops } => write!(f, "kind=nano program={program} ops={ops}"),
            StepAction::Lookup {
                op1,
                operator,
                op2,
                result,
            } => write!(
                f,
                "kind=arith fact={}{}{}={}",
                op1.value(),
                operator.symbol(),
                op2.value(),
                result.value()
            ),
            StepAction::Halt => f.write_str("kind=halt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub index: usize,
    pub action: StepAction,
    /// Bus contents after the step.
    pub snapshot: Bus,
    pub diagnostic: Option<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecOutcome {
    Completed,
    /// A step failed to recall; the machine stops there.
    Aborted {
        step: usize,
        error: Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub stm: StmWord,
    pub steps: Vec<StepRecord>,
    pub outcome: ExecOutcome,
}

/// Runs every step in order on a copy of `stm`.
pub fn execute(machine: &StateMachine, stm: &StmWord, ltm: &Ltm) -> Execution {
    let mut stm = stm.clone();
    let mut steps = Vec::with_capacity(machine.steps.len());
    for (index, step) in machine.steps.iter().enumerate() {
        let (action, diagnostic) = match step {
            Step::RunNano { program, guard } => {
                if let Err(error) = nanocode::ensure_verified(program, stm.bits().width()) {
                    return Execution {
                        stm,
                        steps,
                        outcome: ExecOutcome::Aborted { step: index, error },
                    };
                }
                let (bits, diag) = nanocode::run_checked(stm.bits(), program, guard);
                stm.replace_bits(bits, &program.touched_fields());
                let action = StepAction::Nano {
                    program: program.name.clone(),
                    ops: program.len(),
                };
                (action, diag)
            }
            Step::ArithLookup {
                op1,
                op2,
                operator,
                result,
            } => {
                let (a, b) = (stm.read(*op1), stm.read(*op2));
                let looked_up = ltm
                    .lookup_arithmetic(a, b, *operator)
                    .and_then(|r| stm.write_field(*result, r, stm.ttl_max()).map(|_| r));
                match looked_up {
                    Ok(r) => (
                        StepAction::Lookup {
                            op1: a,
                            operator: *operator,
                            op2: b,
                            result: r,
                        },
                        None,
                    ),
                    Err(error) => {
                        return Execution {
                            stm,
                            steps,
                            outcome: ExecOutcome::Aborted { step: index, error },
                        }
                    }
                }
            }
            Step::Halt => (StepAction::Halt, None),
        };
        steps.push(StepRecord {
            index,
            action,
            snapshot: stm.bits().clone(),
            diagnostic,
        });
        if matches!(step, Step::Halt) {
            break;
        }
    }
    Execution {
        stm,
        steps,
        outcome: ExecOutcome::Completed,
    }
}

fn guarded_move(schema: &AttributeSchema, src: FieldId, dst: FieldId) -> Result<Step> {
    Ok(Step::RunNano {
        program: nanocode::emit_move(schema, src, dst)?,
        guard: Guard::field(dst),
    })
}

fn guarded_copy(schema: &AttributeSchema, src: FieldId, dst: FieldId) -> Result<Step> {
    Ok(Step::RunNano {
        program: nanocode::emit_copy(schema, src, dst)?,
        guard: Guard::field(dst),
    })
}

fn cue(schema: &AttributeSchema, name: &str, v: u8) -> Result<(FieldId, Nibble)> {
    Ok((schema.id(name)?, Nibble::new(v).expect("4-bit literal")))
}

/// Reduces `Ax + B = Y` to `Ax = Y - B`: move Y and B into the arithmetic
/// area, recall the difference, copy it back where Y was. 8 + 8 + 4
/// nanocode operations.
///
/// Triggers on the `x + ... =` form with a clear arithmetic area, so it
/// cannot fire again over its own leftovers.
pub fn builtin_method_alpha(schema: &AttributeSchema) -> Result<StateMachine> {
    let f = |n: &str| schema.id(n);
    let (y, b) = (f(PROBLEM_Y)?, f(PROBLEM_B)?);
    let (op1, op2, result) = (f(FACT_OP1)?, f(FACT_OP2)?, f(FACT_RESULT)?);
    f(PROBLEM_A)?;
    let trigger = SearchCues::new([
        cue(schema, PROBLEM_X, 1)?,
        cue(schema, PROBLEM_OP, Operator::Plus.code().value())?,
        cue(schema, PROBLEM_EQ, 1)?,
        cue(schema, FACT_OP1, 0)?,
        cue(schema, FACT_OP2, 0)?,
        cue(schema, FACT_RESULT, 0)?,
    ])?;
    let steps = vec![
        guarded_move(schema, y, op1)?,
        guarded_move(schema, b, op2)?,
        Step::ArithLookup {
            op1,
            op2,
            operator: Operator::Minus,
            result,
        },
        guarded_copy(schema, result, y)?,
        Step::Halt,
    ];
    Ok(StateMachine::new(METHOD_ALPHA, trigger, steps))
}

/// Solves `Ax = Y` through the division area: move Y and A in, recall the
/// quotient, copy it back to Y. Leaves `x = Y` on the board.
pub fn builtin_solve_2x(schema: &AttributeSchema) -> Result<StateMachine> {
    let f = |n: &str| schema.id(n);
    let (y, a) = (f(PROBLEM_Y)?, f(PROBLEM_A)?);
    let (op1, op2, result) = (f(DIV_OP1)?, f(DIV_OP2)?, f(DIV_RESULT)?);
    let trigger = SearchCues::new([
        cue(schema, PROBLEM_X, 1)?,
        cue(schema, PROBLEM_B, 0)?,
        cue(schema, PROBLEM_EQ, 1)?,
        cue(schema, DIV_OP1, 0)?,
        cue(schema, DIV_OP2, 0)?,
        cue(schema, DIV_RESULT, 0)?,
    ])?;
    let steps = vec![
        guarded_move(schema, y, op1)?,
        guarded_move(schema, a, op2)?,
        Step::ArithLookup {
            op1,
            op2,
            operator: Operator::Divide,
            result,
        },
        guarded_copy(schema, result, y)?,
        Step::Halt,
    ];
    Ok(StateMachine::new(SOLVE_2X, trigger, steps))
}

/// Swaps the two low bits of the action field, which exchanges Left and
/// Right and leaves Straight alone. Field ttls are not refreshed.
pub fn interchange_left_right(stm: &StmWord) -> Result<StmWord> {
    let field = stm
        .schema()
        .action_field()
        .ok_or_else(|| Error::UnknownField(crate::memory::ACTION_FIELD.into()))?;
    let program = nanocode::emit_swap_bits(field.bit(0), field.bit(1))?;
    let mut out = stm.clone();
    out.replace_bits(nanocode::run(stm.bits(), &program), &BTreeSet::new());
    Ok(out)
}

/// Action currently held in STM, if the field decodes to one.
pub fn current_action(stm: &StmWord) -> Option<Action> {
    stm.schema()
        .action_field()
        .and_then(|f| Action::from_code(stm.read(f)))
}

/// The problem area as an equation, e.g. `2x + 5 = 11`, `2x = 6`, `x = 3`.
/// A zero operand hides its `+ B` term and a zero coefficient is omitted.
pub fn render_problem(stm: &StmWord) -> Option<String> {
    let s = stm.schema();
    let read = |n: &str| s.lookup(n).map(|f| stm.read(f).value());
    let (a, b, y) = (read(PROBLEM_A)?, read(PROBLEM_B)?, read(PROBLEM_Y)?);
    if read(PROBLEM_EQ)? == 0 {
        return None;
    }
    let op = read(PROBLEM_OP)
        .and_then(|c| Operator::from_code(Nibble::new(c)?))
        .unwrap_or(Operator::Plus);
    let coef = if a == 0 { String::new() } else { a.to_string() };
    Some(if b == 0 {
        format!("{coef}x = {y}")
    } else {
        format!("{coef}x {} {b} = {y}", op.symbol())
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ltm::FACT_OPERATOR;

    fn equation_schema() -> Arc<AttributeSchema> {
        Arc::new(
            AttributeSchema::rational([
                PROBLEM_A,
                PROBLEM_X,
                PROBLEM_OP,
                PROBLEM_B,
                PROBLEM_EQ,
                PROBLEM_Y,
                FACT_OP1,
                FACT_OP2,
                FACT_OPERATOR,
                FACT_RESULT,
                DIV_OP1,
                DIV_OP2,
                DIV_RESULT,
            ])
            .unwrap(),
        )
    }

    fn n(v: u8) -> Nibble {
        Nibble::new(v).unwrap()
    }

    fn board(schema: &Arc<AttributeSchema>, a: u8, b: u8, y: u8) -> StmWord {
        let mut stm = StmWord::new(schema.clone(), 30);
        for (name, v) in [
            (PROBLEM_A, a),
            (PROBLEM_X, 1),
            (PROBLEM_OP, Operator::Plus.code().value()),
            (PROBLEM_B, b),
            (PROBLEM_EQ, 1),
            (PROBLEM_Y, y),
        ] {
            stm.write_named(name, n(v), 30).unwrap();
        }
        stm
    }

    fn learned(schema: &Arc<AttributeSchema>) -> Ltm {
        let mut ltm = Ltm::new(schema.clone(), 1);
        ltm.memorize_fact(n(11), Operator::Minus, n(5), n(6), 1)
            .unwrap();
        ltm.memorize_fact(n(6), Operator::Divide, n(2), n(3), 1)
            .unwrap();
        install_machine(&mut ltm, builtin_method_alpha(schema).unwrap()).unwrap();
        install_machine(&mut ltm, builtin_solve_2x(schema).unwrap()).unwrap();
        ltm
    }

    #[test]
    fn method_alpha_structure() {
        let s = equation_schema();
        let m = builtin_method_alpha(&s).unwrap();
        let sizes: Vec<usize> = m.programs().map(|p| p.len()).collect();
        assert_eq!(sizes, [8, 8, 4]);
        assert_eq!(m.nano_ops(), 20);
        assert_eq!(m.programs().map(|p| p.line_count()).sum::<usize>(), 40);
        assert_eq!(m.steps().len(), 5);
        assert_eq!(m.steps()[4], Step::Halt);
    }

    #[test]
    fn install_and_reinstall() {
        let s = equation_schema();
        let mut ltm = Ltm::new(s.clone(), 1);
        assert_eq!(
            install_machine(&mut ltm, builtin_method_alpha(&s).unwrap()).unwrap(),
            METHOD_ALPHA
        );
        assert_eq!(
            install_machine(&mut ltm, builtin_solve_2x(&s).unwrap()).unwrap(),
            SOLVE_2X
        );
        assert!(matches!(
            install_machine(&mut ltm, builtin_method_alpha(&s).unwrap()),
            Err(Error::WriteOnceViolation(_))
        ));
        let imposter = StateMachine::new(
            METHOD_ALPHA,
            SearchCues::named(&s, &[(PROBLEM_X, 1)]).unwrap(),
            vec![Step::Halt],
        );
        assert_eq!(
            install_machine(&mut ltm, imposter),
            Err(Error::DuplicateMachine(METHOD_ALPHA.into()))
        );
    }

    #[test]
    fn install_rejects_invalid() {
        let s = equation_schema();
        let mut ltm = Ltm::new(s.clone(), 1);
        let trig = SearchCues::named(&s, &[(PROBLEM_X, 1)]).unwrap();
        let no_steps = StateMachine::new("m", trig.clone(), vec![]);
        assert!(matches!(
            install_machine(&mut ltm, no_steps),
            Err(Error::InvalidMachine { .. })
        ));
        let no_trigger = StateMachine::new("m", SearchCues::default(), vec![Step::Halt]);
        assert!(install_machine(&mut ltm, no_trigger).is_err());
        let overlap = NanoProgram::new("bad", vec![nanocode::NanoOp::new([1], [1])]);
        let bad = StateMachine::new("m", trig, vec![Step::nano(overlap)]);
        assert!(matches!(
            install_machine(&mut ltm, bad),
            Err(Error::Unverified { .. })
        ));
        assert!(ltm.machines().is_empty());
    }

    #[test]
    fn triggers() {
        let s = equation_schema();
        let ltm = learned(&s);
        assert_eq!(
            trigger(&ltm, &board(&s, 2, 5, 11)).unwrap().id(),
            METHOD_ALPHA
        );
        let mut reduced = StmWord::new(s.clone(), 30);
        for (name, v) in [
            (PROBLEM_A, 2),
            (PROBLEM_X, 1),
            (PROBLEM_EQ, 1),
            (PROBLEM_Y, 6),
        ] {
            reduced.write_named(name, n(v), 30).unwrap();
        }
        assert_eq!(trigger(&ltm, &reduced).unwrap().id(), SOLVE_2X);
        assert!(trigger(&ltm, &StmWord::new(s.clone(), 30)).is_none());
    }

    #[test]
    fn method_alpha_reduces_the_equation() {
        let s = equation_schema();
        let ltm = learned(&s);
        let stm = board(&s, 2, 5, 11);
        assert_eq!(render_problem(&stm).unwrap(), "2x + 5 = 11");
        let m = trigger(&ltm, &stm).unwrap();
        let run = execute(m, &stm, &ltm);
        assert_eq!(run.outcome, ExecOutcome::Completed);
        assert_eq!(run.steps.len(), 5);
        assert!(run.steps.iter().all(|r| r.diagnostic.is_none()));
        let out = &run.stm;
        let bits = |name: &str| out.read_named(name).unwrap().to_string();
        assert_eq!(bits(FACT_OP1), "1011");
        assert_eq!(bits(FACT_OP2), "0101");
        assert_eq!(bits(FACT_RESULT), "0110");
        assert_eq!(bits(PROBLEM_Y), "0110");
        assert_eq!(bits(PROBLEM_B), "0000");
        assert_eq!(render_problem(out).unwrap(), "2x = 6");

        // the form changed, so method alpha does not fire again
        let next = trigger(&ltm, out).unwrap();
        assert_eq!(next.id(), SOLVE_2X);
        let solved = execute(next, out, &ltm);
        assert_eq!(solved.outcome, ExecOutcome::Completed);
        assert_eq!(render_problem(&solved.stm).unwrap(), "x = 3");
        assert!(trigger(&ltm, &solved.stm).is_none());
    }

    #[test]
    fn missing_fact_aborts_at_lookup() {
        let s = equation_schema();
        let mut ltm = Ltm::new(s.clone(), 1);
        install_machine(&mut ltm, builtin_method_alpha(&s).unwrap()).unwrap();
        let stm = board(&s, 2, 5, 11);
        let run = execute(&ltm.machines()[0], &stm, &ltm);
        assert_eq!(
            run.outcome,
            ExecOutcome::Aborted {
                step: 2,
                error: Error::NoRecall
            }
        );
        assert_eq!(run.steps.len(), 2);
    }

    #[test]
    fn rerun_over_leftovers_flags_the_guard() {
        let s = equation_schema();
        let ltm = learned(&s);
        let first = execute(&ltm.machines()[0], &board(&s, 2, 5, 11), &ltm);
        assert!(!ltm.machines()[0].triggered_by(&first.stm));
        let forced = execute(&ltm.machines()[0], &first.stm, &ltm);
        assert!(forced.steps[0].diagnostic.is_some());
    }

    #[test]
    fn execution_is_deterministic() {
        let s = equation_schema();
        let ltm = learned(&s);
        let stm = board(&s, 2, 5, 11);
        assert_eq!(
            execute(&ltm.machines()[0], &stm, &ltm),
            execute(&ltm.machines()[0], &stm, &ltm)
        );
    }

    fn with_action(action: Action) -> StmWord {
        let s = Arc::new(AttributeSchema::rational(["B", "C", "action"]).unwrap());
        let mut stm = StmWord::new(s, 30);
        stm.write_named("B", n(1), 30).unwrap();
        stm.write_named("action", action.code(), 17).unwrap();
        stm
    }

    #[test]
    fn interchange() {
        let swapped = interchange_left_right(&with_action(Action::LEFT)).unwrap();
        assert_eq!(current_action(&swapped), Some(Action::RIGHT));
        let swapped = interchange_left_right(&with_action(Action::RIGHT)).unwrap();
        assert_eq!(current_action(&swapped), Some(Action::LEFT));
        let straight = with_action(Action::STRAIGHT);
        assert_eq!(interchange_left_right(&straight).unwrap(), straight);
    }

    #[test]
    fn interchange_is_an_involution() {
        for code in 0..16 {
            let mut stm = with_action(Action::LEFT);
            stm.write_named("action", n(code), 9).unwrap();
            let twice = interchange_left_right(&interchange_left_right(&stm).unwrap()).unwrap();
            assert_eq!(twice, stm);
        }
    }

    #[test]
    fn interchange_needs_action_field() {
        let s = Arc::new(AttributeSchema::rational(["B"]).unwrap());
        assert!(interchange_left_right(&StmWord::new(s, 30)).is_err());
    }
}
