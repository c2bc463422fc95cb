use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;

use lotl_core::automaton::find_run_term;
use lotl_core::automaton::format::parse_automaton;
use lotl_core::construction::compile;
use lotl_core::formula::{parse, parse_surface, Sugared};
use lotl_core::oracle::{eval_finite, eval_up, UpWord};
use lotl_core::reach::{satisfiable_within, saturate, RuleSet, Verdict, DEFAULT_MAX_ITEMS};
use lotl_core::words::{reverse_term, unzip_term, zip_terms};
use lotl_core::{Alphabet, Formula, Letter, State, Transducer, WordTerm};

fn ap() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::atom("a")),
        Just(Formula::atom("b")),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::until(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::since(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::stavi_until(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::stavi_since(l, r)),
        ]
    })
}

fn stavi_free(depth: u32) -> impl Strategy<Value = Formula> {
    formula(depth).prop_filter("Stavi-free", |f| f.is_stavi_free())
}

/// Swaps every future connective with its past counterpart.
fn mirror(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(c) => Formula::not(mirror(c)),
        Formula::Or(l, r) => Formula::or(mirror(l), mirror(r)),
        Formula::Until(l, r) => Formula::since(mirror(l), mirror(r)),
        Formula::Since(l, r) => Formula::until(mirror(l), mirror(r)),
        Formula::StaviUntil(l, r) => Formula::stavi_since(mirror(l), mirror(r)),
        Formula::StaviSince(l, r) => Formula::stavi_until(mirror(l), mirror(r)),
    }
}

fn letters(size: u32, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..size).prop_map(Letter), 0..=max_len)
}

fn nonempty_letters(size: u32, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..size).prop_map(Letter), 1..=max_len)
}

fn term(size: u32) -> impl Strategy<Value = WordTerm> {
    let leaf = nonempty_letters(size, 3).prop_map(|w| WordTerm::from_finite(&w));
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(WordTerm::concat),
            inner.clone().prop_map(WordTerm::omega),
            inner.clone().prop_map(WordTerm::neg_omega),
            prop::collection::vec(inner, 1..3).prop_map(WordTerm::Shuffle),
        ]
    })
}

/// Random transducer over one input bit, written in the text format.
fn automaton() -> impl Strategy<Value = Transducer> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let edges = prop::collection::vec((0..n, 0u32..2, 0..n), 0..=2 * n);
            (Just(n), edges)
        })
        .prop_map(|(n, edges)| {
            let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
            let mut text = format!(
                "alphabet_in: bits 1\nalphabet_out: bits 1\nstates: {}\ninitial: s0\nfinal: s{}\n",
                names.join(" "),
                n - 1
            );
            for (p, x, q) in edges {
                text.push_str(&format!("succ: s{p} ; {x} ; 0 ; s{q}\n"));
            }
            parse_automaton(&text).expect("generated automaton parses")
        })
}

type Item = (State, BTreeSet<State>, State, bool);

/// Finite paths by breadth-first search: every (source, visited states,
/// target, nonempty) reachable by following successor edges.
fn finite_path_items(a: &Transducer) -> HashSet<Item> {
    let mut seen: HashSet<Item> = HashSet::new();
    let mut queue = VecDeque::new();
    for p in 0..a.num_states() {
        let item = (p, BTreeSet::from([p]), p, false);
        seen.insert(item.clone());
        queue.push_back(item);
    }
    while let Some((p, c, q, _)) = queue.pop_front() {
        for x in a.input().letters() {
            for (_, r) in a.successors(q, x) {
                let mut c2 = c.clone();
                c2.insert(r);
                let next = (p, c2, r, true);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(f in formula(4)) {
        let back = parse(&f.render(), &ap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn sugar_round_trip_preserves_core(f in formula(3)) {
        let sugared = Sugared::from_core(&f);
        prop_assert_eq!(sugared.desugar(), f.clone());
        let reparsed = parse_surface(&f.render()).unwrap().desugar();
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn reverse_term_is_an_involution(t in term(3)) {
        prop_assert_eq!(reverse_term(&reverse_term(&t)), t);
    }

    #[test]
    fn reverse_term_reverses_finite_words(w in letters(4, 8)) {
        let rev: Vec<Letter> = w.iter().rev().copied().collect();
        prop_assert_eq!(reverse_term(&WordTerm::from_finite(&w)).to_finite().unwrap(), rev);
    }

    #[test]
    fn unzip_inverts_zip(t in term(3), shift in 0u32..5) {
        let other = t.map_letters(&|l| Letter((l.0 + shift) % 5));
        let zipped = zip_terms(&t, &other, 3).unwrap();
        prop_assert_eq!(unzip_term(&zipped, 3), (t, other));
    }

    #[test]
    fn simplify_keeps_finite_words(w in letters(3, 10)) {
        let t = WordTerm::from_finite(&w);
        prop_assert_eq!(t.simplify().to_finite().unwrap(), w);
    }

    #[test]
    fn compiled_transducer_matches_oracle_on_finite_words(f in formula(3), w in letters(4, 6)) {
        let a = compile(&f, &ap()).unwrap();
        let (_, out) = find_run_term(&a, &WordTerm::from_finite(&w)).unwrap();
        let got: Vec<bool> = out.to_finite().unwrap().iter().map(|l| l.0 == 1).collect();
        prop_assert_eq!(got, eval_finite(&f, &ap(), &w).unwrap());
    }

    #[test]
    fn compiled_transducer_matches_oracle_on_periodic_words(
        f in formula(2),
        u in letters(4, 3),
        v in nonempty_letters(4, 3),
    ) {
        let a = compile(&f, &ap()).unwrap();
        let w = UpWord::new(u, v);
        let (_, out) = find_run_term(&a, &w.to_term()).unwrap();
        let got = UpWord::from_term(&out.simplify()).unwrap().normalize();
        let want = eval_up(&f, &ap(), &w).unwrap().to_letters().normalize();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn mirrored_formula_reads_reversed_word(f in formula(3), w in letters(4, 6)) {
        let g = mirror(&f);
        let forward = eval_finite(&f, &ap(), &w).unwrap();
        let rev: Vec<Letter> = w.iter().rev().copied().collect();
        let mut backward = eval_finite(&g, &ap(), &rev).unwrap();
        backward.reverse();
        prop_assert_eq!(&forward, &backward);
        let a = compile(&g, &ap()).unwrap();
        let (_, out) = find_run_term(&a, &WordTerm::from_finite(&rev)).unwrap();
        let mut got: Vec<bool> = out.to_finite().unwrap().iter().map(|l| l.0 == 1).collect();
        got.reverse();
        prop_assert_eq!(got, forward);
    }

    #[test]
    fn successor_items_are_exactly_the_finite_paths(a in automaton()) {
        let sat = saturate(&a, "succ,cat".parse().unwrap(), DEFAULT_MAX_ITEMS);
        let got: HashSet<Item> = sat
            .items
            .iter()
            .map(|i| (i.source, i.content.ones().collect(), i.target, i.nonempty))
            .collect();
        prop_assert_eq!(got.len(), sat.items.len());
        prop_assert_eq!(got, finite_path_items(&a));
    }

    #[test]
    fn more_rules_give_more_items(a in automaton(), mask in 0u8..32) {
        let bit = |i: u8| mask & (1 << i) != 0;
        let small = RuleSet { succ: bit(0), cat: bit(1), omega: bit(2), neg_omega: bit(3), shuffle: bit(4) };
        let big = saturate(&a, RuleSet::ALL, DEFAULT_MAX_ITEMS);
        let few = saturate(&a, small, DEFAULT_MAX_ITEMS);
        prop_assert!(small.is_subset(&RuleSet::ALL));
        for item in &few.items {
            prop_assert!(big.contains(item));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// On finite words the successor and concatenation rules decide
    /// satisfiability; a witness of length <= 4 must agree with the verdict.
    #[test]
    fn finite_satisfiability_agrees_with_search(f in stavi_free(2)) {
        let b = parse_automaton(include_str!("../../../fixtures/finite_words.aut")).unwrap();
        let v = satisfiable_within(&f, &ap(), &b, "succ,cat".parse().unwrap(), DEFAULT_MAX_ITEMS).unwrap();
        let alphabet = Alphabet::Props(ap());
        let witness = lotl_core::selftest::finite_words(&alphabet, 4)
            .into_iter()
            .any(|w| eval_finite(&f, &ap(), &w).unwrap().into_iter().any(|x| x));
        if witness {
            prop_assert!(matches!(v, Verdict::Sat(_)), "{} has a finite model but got {}", f, v.label());
        }
        if let Verdict::Unsat = v {
            prop_assert!(!witness);
        }
    }
}
