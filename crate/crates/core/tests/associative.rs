mod common;

use brainsim::cue_editor::brainstorm;
use brainsim::ltm::{LtmWord, Memorized, SearchCues, WordId};
use brainsim::memory::{FieldId, FieldValues, Nibble};
use brainsim::Error;
use common::{oracle_class, RawMemory};
use proptest::prelude::*;

fn memory_and_cues() -> impl Strategy<Value = (RawMemory, Vec<(usize, u8)>)> {
    (1usize..=16, 0usize..=64).prop_flat_map(|(fields, words)| {
        // values mostly in 0..4 so that collisions and multiple matches are common
        let nib = prop_oneof![4 => 0u8..4, 1 => 0u8..16];
        let rows = prop::collection::vec(prop::collection::vec(nib, fields), words);
        let picks = prop::sample::subsequence((0..fields).collect::<Vec<_>>(), 0..=fields.min(6));
        (
            rows,
            picks,
            any::<prop::sample::Index>(),
            0u8..16,
            any::<bool>(),
        )
            .prop_map(move |(rows, picks, row_pick, noise, from_row)| {
                let cues = picks
                    .iter()
                    .map(|&f| {
                        let v = if from_row && !rows.is_empty() {
                            rows[row_pick.index(rows.len())][f]
                        } else {
                            noise
                        };
                        (f, v)
                    })
                    .collect();
                (RawMemory { fields, rows }, cues)
            })
    })
}

fn to_cues(cues: &[(usize, u8)]) -> SearchCues {
    SearchCues::new(
        cues.iter()
            .map(|&(f, v)| (FieldId(f), Nibble::new(v).unwrap())),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn search_agrees_with_linear_scan((mem, cues) in memory_and_cues()) {
        let ltm = mem.build();
        let expected = mem.oracle(&cues);
        let outcome = ltm.search(&to_cues(&cues));
        prop_assert_eq!(outcome.class(), oracle_class(&expected));
        prop_assert_eq!(outcome.count(), expected.len());
        let got: Vec<usize> = outcome.matches().iter().map(|w| w.0).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn removing_cues_never_narrows_recall((mem, cues) in memory_and_cues()) {
        let ltm = mem.build();
        let entries = brainstorm(&ltm, &to_cues(&cues));
        let full = &entries[0].matches;
        for e in &entries[1..] {
            prop_assert!(full.iter().all(|m| e.matches.contains(m)));
            prop_assert!(e.matches.len() >= full.len());
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Memorize {
        values: Vec<u8>,
        rehearsals: u32,
    },
    MemorizeAt {
        addr: usize,
        values: Vec<u8>,
        rehearsals: u32,
    },
    Search {
        cues: Vec<(usize, u8)>,
    },
}

fn op(fields: usize) -> impl Strategy<Value = Op> {
    let vals = prop::collection::vec(0u8..16, fields);
    prop_oneof![
        (vals.clone(), 0u32..6)
            .prop_map(|(values, rehearsals)| Op::Memorize { values, rehearsals }),
        (0usize..12, vals, 0u32..6).prop_map(|(addr, values, rehearsals)| Op::MemorizeAt {
            addr,
            values,
            rehearsals
        }),
        prop::collection::vec((0..fields, 0u8..16), 0..4).prop_map(|cues| {
            let mut seen = std::collections::BTreeSet::new();
            Op::Search {
                cues: cues.into_iter().filter(|c| seen.insert(c.0)).collect(),
            }
        }),
    ]
}

fn word(values: &[u8]) -> LtmWord {
    let v: FieldValues = values
        .iter()
        .enumerate()
        .map(|(f, &n)| (FieldId(f), Nibble::new(n).unwrap()))
        .collect();
    LtmWord::new(v, None)
}

const R: u32 = 3;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn committed_words_survive_any_sequence(ops in prop::collection::vec(op(5), 1..40)) {
        let mem = RawMemory { fields: 5, rows: vec![] };
        let schema = mem.build().schema().clone();
        let mut ltm = brainsim::Ltm::new(schema, R);
        let mut committed: Vec<LtmWord> = Vec::new();
        for op in ops {
            match op {
                Op::Memorize { values, rehearsals } => {
                    let r = ltm.memorize(word(&values), rehearsals).unwrap();
                    if rehearsals >= R {
                        prop_assert_eq!(r, Memorized::Committed(WordId(committed.len())));
                        committed.push(ltm.word(WordId(committed.len())).unwrap().clone());
                    } else {
                        prop_assert_eq!(r, Memorized::NotCommitted);
                    }
                }
                Op::MemorizeAt { addr, values, rehearsals } => {
                    let r = ltm.memorize_at(WordId(addr), word(&values), rehearsals);
                    if addr < committed.len() {
                        prop_assert_eq!(r, Err(Error::WriteOnceViolation(WordId(addr))));
                    } else if addr > committed.len() {
                        let is_gap = matches!(r, Err(Error::AddressGap { .. }));
                        prop_assert!(is_gap);
                    } else if rehearsals >= R {
                        prop_assert_eq!(r, Ok(Memorized::Committed(WordId(addr))));
                        committed.push(ltm.word(WordId(addr)).unwrap().clone());
                    } else {
                        prop_assert_eq!(r, Ok(Memorized::NotCommitted));
                    }
                }
                Op::Search { cues } => {
                    ltm.search(&to_cues(&cues));
                }
            }
            prop_assert_eq!(ltm.len(), committed.len());
            for (i, w) in committed.iter().enumerate() {
                let now = ltm.word(WordId(i)).unwrap();
                prop_assert_eq!(now, w);
                prop_assert!(now.is_committed());
            }
        }
    }
}

#[test]
fn rehearsal_threshold_is_sharp() {
    let schema = RawMemory {
        fields: 2,
        rows: vec![],
    }
    .build()
    .schema()
    .clone();
    let mut ltm = brainsim::Ltm::new(schema, R);
    for r in 0..R {
        assert_eq!(
            ltm.memorize(word(&[1, 2]), r).unwrap(),
            Memorized::NotCommitted
        );
    }
    assert!(ltm.is_empty());
    assert_eq!(
        ltm.memorize(word(&[1, 2]), R).unwrap(),
        Memorized::Committed(WordId(0))
    );
    assert_eq!(
        ltm.memorize(word(&[3, 3]), R + 7).unwrap(),
        Memorized::Committed(WordId(1))
    );
    assert_eq!(
        ltm.memorize_at(WordId(0), word(&[9, 9]), R),
        Err(Error::WriteOnceViolation(WordId(0)))
    );
}
