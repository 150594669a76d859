//! Shared fixtures and brute-force oracles.
#![allow(dead_code)]

use std::sync::Arc;

use brainsim::ltm::{Ltm, LtmWord, OutcomeClass};
use brainsim::memory::{AttributeSchema, FieldId, FieldValues, Nibble};
use brainsim::orchestrator::{load_scenario, World};

pub const BLACKFOREST: &str = include_str!("../../scenarios/blackforest.scn");
pub const BACKTRACK: &str = include_str!("../../scenarios/blackforest_backtrack.scn");
pub const EQUATION: &str = include_str!("../../scenarios/equation.scn");

pub fn world(text: &str) -> World {
    load_scenario(text).expect("shipped scenario loads")
}

pub fn trace_of(text: &str, ticks: u64) -> String {
    let mut w = world(text);
    w.run_simulation(ticks);
    brainsim::orchestrator::trace::render(&w.trace)
}

/// A memory given as raw nibble rows; 0 means the attribute is inactive.
#[derive(Debug, Clone)]
pub struct RawMemory {
    pub fields: usize,
    pub rows: Vec<Vec<u8>>,
}

impl RawMemory {
    pub fn build(&self) -> Ltm {
        let names: Vec<String> = (0..self.fields).map(|i| format!("f{i}")).collect();
        let schema = Arc::new(AttributeSchema::rational(&names).unwrap());
        let mut ltm = Ltm::new(schema, 1);
        for row in &self.rows {
            let values: FieldValues = row
                .iter()
                .enumerate()
                .map(|(f, &v)| (FieldId(f), Nibble::new(v).unwrap()))
                .collect();
            ltm.memorize(LtmWord::new(values, None), 1).unwrap();
        }
        ltm
    }

    /// Linear scan: every cue must name an active attribute holding its value.
    pub fn oracle(&self, cues: &[(usize, u8)]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| cues.iter().all(|&(f, v)| v != 0 && self.rows[r][f] == v))
            .collect()
    }
}

pub fn oracle_class(matches: &[usize]) -> OutcomeClass {
    match matches.len() {
        0 => OutcomeClass::NoRecall,
        1 => OutcomeClass::Single,
        _ => OutcomeClass::Multiple,
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// The four intersections as the bushes/cliffs/ditches/streams counts.
pub const LANDMARKS: [[i64; 4]; 4] = [[1, 2, 1, 1], [0, 2, 2, 2], [0, 2, 1, 2], [1, 2, 1, 2]];
