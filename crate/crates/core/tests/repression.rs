mod common;

use brainsim::importance::{gate, Gate, ImportanceRecord};
use brainsim::orchestrator::EventKind;
use common::world;

const NIGHTMARE: &str = "
[schema]
field place kind=rational
field fear kind=irrational
field dark kind=irrational
field cold kind=irrational
field action kind=rational

[config]
repression_limit=2

[ltm]
place=1 fear=3 dark=2 cold=1 action=Left
place=2 fear=1 action=Right

[sensory]
tick=0 place=1
tick=3 place=2
";

const IRRATIONAL: [&str; 3] = ["fear", "dark", "cold"];

#[test]
fn repressed_recall_never_reaches_stm() {
    let mut w = world(NIGHTMARE);
    for _ in 0..5 {
        w.attention_cycle();
        for f in IRRATIONAL[1..].iter() {
            assert_eq!(w.stm.read_named(f).unwrap().value(), 0, "tick {}", w.tick);
        }
        assert_ne!(w.stm.read_named("fear").unwrap().value(), 3);
    }
    let rep: Vec<_> = w
        .trace
        .iter()
        .filter(|e| e.kind == EventKind::Repressed)
        .collect();
    assert!(!rep.is_empty());
    assert_eq!(rep[0].get("row"), Some("1"));
    assert_eq!(rep[0].get("irrational"), Some("3"));
    assert!(!w
        .trace
        .iter()
        .any(|e| e.kind == EventKind::Recall && e.get("row") == Some("1")));
    // one irrational attribute is within the limit
    assert!(w
        .trace
        .iter()
        .any(|e| e.kind == EventKind::Recall && e.get("row") == Some("2")));
}

#[test]
fn dreams_admit_the_same_recall() {
    let text = NIGHTMARE.replace("repression_limit=2", "repression_limit=2\ndream_mode=on");
    let mut w = world(&text);
    w.attention_cycle();
    assert!(!w.trace.iter().any(|e| e.kind == EventKind::Repressed));
    assert!(w
        .trace
        .iter()
        .any(|e| e.kind == EventKind::Recall && e.get("row") == Some("1")));
    assert_eq!(w.stm.read_named("fear").unwrap().value(), 3);
    assert_eq!(w.stm.read_named("dark").unwrap().value(), 2);
}

#[test]
fn raising_the_limit_admits_it() {
    let text = NIGHTMARE.replace("repression_limit=2", "repression_limit=3");
    let mut w = world(&text);
    w.attention_cycle();
    assert_eq!(w.stm.read_named("cold").unwrap().value(), 1);
}

#[test]
fn gate_is_monotone_in_irrational_count() {
    for limit in 0..8u32 {
        let mut repressed = false;
        for k in 0..16usize {
            let rec = ImportanceRecord {
                irrational_count: k,
                ..Default::default()
            };
            let g = gate(&rec, limit, false);
            assert_eq!(g == Gate::Repressed, k > limit as usize);
            assert!(
                !repressed || g == Gate::Repressed,
                "limit {limit}, count {k}"
            );
            repressed = g == Gate::Repressed;
            assert_eq!(gate(&rec, limit, true), Gate::Allowed);
        }
    }
}
