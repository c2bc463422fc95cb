use std::fs;
use std::path::PathBuf;

use lotl_core::automaton::format::{parse_automaton, write_automaton, DEFAULT_EXPAND_CAP};
use lotl_core::automaton::{enumerate_accepting_runs_finite, find_run_term};
use lotl_core::construction::until_automaton;
use lotl_core::reach::{accepts_nonempty_word, is_empty, saturate, RuleSet, DEFAULT_MAX_ITEMS};
use lotl_core::words::parse_term;
use lotl_core::Transducer;

fn load(name: &str) -> Transducer {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    parse_automaton(&fs::read_to_string(path).unwrap()).unwrap()
}

fn output(a: &Transducer, word: &str) -> String {
    let t = parse_term(word, a.input()).unwrap();
    let (_, out) = find_run_term(a, &t).unwrap();
    out.simplify().render(a.output())
}

#[test]
fn every_fixture_parses_and_round_trips() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "aut") {
            let a = parse_automaton(&fs::read_to_string(&path).unwrap()).unwrap();
            let text = write_automaton(&a, DEFAULT_EXPAND_CAP).unwrap();
            let b = parse_automaton(&text).unwrap();
            assert!(a.same_tables(&b), "{} changes on rewrite", path.display());
            count += 1;
        }
    }
    assert!(count >= 7);
}

#[test]
fn until_fixture_is_the_built_table() {
    assert!(load("until.aut").same_tables(&until_automaton()));
}

#[test]
fn successor_detector_on_omega_words() {
    let a = load("fig1a.aut");
    assert_eq!(output(&a, "(0 1)^w"), "(1 0)^w");
    assert_eq!(output(&a, "1^w"), "1^w");
    assert_eq!(output(&a, "1 0 0 (1)^w"), "0 0 1^w");
}

#[test]
fn successor_detector_needs_a_limit_at_the_end() {
    let a = load("fig1a.aut");
    for w in lotl_core::selftest::finite_words(a.input(), 4) {
        assert!(enumerate_accepting_runs_finite(&a, &w).iter().all(|_| w.is_empty()));
    }
}

#[test]
fn gap_detector_truth_words() {
    let a = load("gap_future.aut");
    assert_eq!(output(&a, "{}^w {}^-w"), "1^w 0^-w");
    assert_eq!(output(&a, "{}^-w {}^w"), "0^-w 0^w");
    assert_eq!(output(&a, "{} {} {}"), "0 0 0");
}

#[test]
fn dense_fixture_rejects_finite_and_omega_words() {
    let a = load("fig1b.aut");
    assert!(find_run_term(&a, &parse_term("{} {}", a.input()).unwrap()).is_err());
    assert!(find_run_term(&a, &parse_term("{}^w", a.input()).unwrap()).is_err());
}

#[test]
fn emptiness_of_shipped_acceptors() {
    let all = load("all_words.aut");
    let sat = saturate(&all, RuleSet::ALL, DEFAULT_MAX_ITEMS);
    assert!(!is_empty(&all, &sat));
    assert!(accepts_nonempty_word(&all, &sat));
    let dense = load("fig1b.aut");
    let without = saturate(&dense, "succ,cat,omega,negomega".parse().unwrap(), DEFAULT_MAX_ITEMS);
    assert!(!accepts_nonempty_word(&dense, &without));
}
