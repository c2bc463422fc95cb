//! Elementary transducers for each connective and the inductive compiler.
//!
//! `compile(f)` outputs the truth word of `f`: atoms and constants read the
//! input directly, `¬ψ` is the negation transducer run over `A_ψ`, and every
//! binary connective is its elementary transducer run over the product of
//! the two operand transducers.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::OnceLock;

use crate::automaton::{SetPred, State, StateSet, Table, Transducer};
use crate::error::{Error, Result};
use crate::formula::{Formula, Temporal};
use crate::words::{Alphabet, Letter};

/// Letter of the pair alphabet `{0,1}²` for `(phi, psi)`.
pub fn bits2(phi: bool, psi: bool) -> Letter {
    Letter(phi as u32 | (psi as u32) << 1)
}

fn single_state(input: Alphabet, output_of: impl Fn(Letter) -> bool) -> Transducer {
    let mut t = Table::new(&["q"], input.size());
    t.set_initial(0);
    t.set_final(0);
    for a in input.letters() {
        t.add_succ(0, a, Letter(output_of(a) as u32), 0);
    }
    t.add_left(SetPred::Exactly(StateSet::singleton(0)), StateSet::singleton(0));
    t.add_right(StateSet::singleton(0), SetPred::Exactly(StateSet::singleton(0)));
    Transducer::from_table(input, Alphabet::bit(), t).expect("well-formed elementary table")
}

thread_local! {
    // One-state transducers are shared between compilations so that run
    // searches memoized per table are reused.
    static LEAVES: RefCell<HashMap<(Option<String>, bool, Alphabet), Transducer>> = RefCell::new(HashMap::new());
}

fn leaf(key: (Option<String>, bool, Alphabet), build: impl FnOnce() -> Transducer) -> Transducer {
    if let Some(a) = LEAVES.with(|m| m.borrow().get(&key).cloned()) {
        return a;
    }
    let a = build();
    LEAVES.with(|m| m.borrow_mut().insert(key, a.clone()));
    a
}

/// Outputs 1 exactly where `p` holds.
pub fn atom_automaton(p: &str, ap: &[String]) -> Result<Transducer> {
    let i = ap
        .iter()
        .position(|x| x == p)
        .ok_or_else(|| Error::UnknownProposition(p.to_string()))?;
    let input = Alphabet::Props(ap.to_vec());
    Ok(leaf((Some(p.to_string()), false, input.clone()), || {
        single_state(input, |a| a.0 >> i & 1 == 1)
    }))
}

/// Outputs `bit` everywhere.
pub fn const_automaton(bit: bool, input: &Alphabet) -> Transducer {
    leaf((None, bit, input.clone()), || single_state(input.clone(), |_| bit))
}

pub fn not_automaton() -> Transducer {
    static CELL: OnceLock<Transducer> = OnceLock::new();
    CELL.get_or_init(|| single_state(Alphabet::bit(), |a| a.0 == 0)).clone()
}

pub fn or_automaton() -> Transducer {
    static CELL: OnceLock<Transducer> = OnceLock::new();
    CELL.get_or_init(|| single_state(Alphabet::Bits(2), |a| a.0 != 0)).clone()
}

fn set<const N: usize>(states: [State; N]) -> StateSet {
    StateSet::from(states)
}

/// Five states `q0..q4` reading `(φ, ψ)` pairs and writing the truth word
/// of `φ U ψ`.
pub fn until_automaton() -> Transducer {
    static CELL: OnceLock<Transducer> = OnceLock::new();
    CELL.get_or_init(build_until).clone()
}

fn build_until() -> Transducer {
    let names = ["q0", "q1", "q2", "q3", "q4"];
    let mut t = Table::new(&names, 4);
    let label = [bits2(true, true), bits2(false, true), bits2(true, false), bits2(false, false), bits2(true, false)];
    for p in 0..5 {
        t.set_initial(p);
        for q in 0..5 {
            let forbidden = (p == 2 && (q == 3 || q == 4)) || (p == 4 && q <= 2);
            if !forbidden {
                t.add_succ(p, label[p], Letter((q <= 2) as u32), q);
            }
        }
    }
    t.set_final(4);
    let all = set([0, 1, 2, 3, 4]);
    t.add_left(SetPred::Meets(set([0, 1, 3])), all);
    t.add_left(SetPred::Exactly(set([2])), set([0, 1, 2]));
    t.add_left(SetPred::Exactly(set([4])), set([3, 4]));
    t.add_right(set([2]), SetPred::Subset(set([0, 2])));
    t.add_right(set([4]), SetPred::Meets(set([1, 3])));
    t.add_right(set([4]), SetPred::Exactly(set([4])));
    Transducer::from_table(Alphabet::Bits(2), Alphabet::bit(), t).expect("well-formed until table")
}

/// Ten states `q0..q9` writing the truth word of the future Stavi
/// connective. `q3` labels the gap where the formula stops holding.
pub fn stavi_until_automaton() -> Transducer {
    static CELL: OnceLock<Transducer> = OnceLock::new();
    CELL.get_or_init(build_stavi_until).clone()
}

fn build_stavi_until() -> Transducer {
    let names = ["q0", "q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9"];
    let mut t = Table::new(&names, 4);
    let low = [0, 1, 2];
    let high = [4, 5, 6, 7, 8];
    let edges: [(State, Letter, &[State]); 6] = [
        (1, bits2(true, false), &low),
        (2, bits2(true, true), &low),
        (4, bits2(false, false), &[0, 1, 2, 4, 5, 6, 7, 8]),
        (5, bits2(false, true), &[0, 1, 2, 4, 5, 6, 7, 8]),
        (6, bits2(true, false), &high),
        (7, bits2(true, true), &high),
    ];
    for (p, a, targets) in edges {
        for &q in targets {
            t.add_succ(p, a, Letter((q <= 2) as u32), q);
        }
    }
    for s in 0..10 {
        if s != 3 && s != 9 {
            t.set_initial(s);
        }
    }
    t.set_final(8);
    t.set_final(9);
    let in_low = || SetPred::Subset(set([0, 1, 2]));
    let meets_45 = || SetPred::Meets(set([4, 5]));
    let meets_4567 = || SetPred::Meets(set([4, 5, 6, 7]));
    let meets_146 = || SetPred::Meets(set([1, 4, 6]));
    t.add_left(SetPred::Or(vec![meets_45(), in_low()]), set([0, 1, 2]));
    t.add_left(in_low(), set([3]));
    t.add_left(SetPred::not(in_low()), set([4, 5, 6, 7]));
    t.add_left(meets_45(), set([8]));
    t.add_left(SetPred::And(vec![SetPred::not(meets_45()), SetPred::not(in_low())]), set([9]));
    t.add_right(set([0]), in_low());
    t.add_right(set([3]), SetPred::And(vec![SetPred::not(meets_146()), SetPred::Contains(5)]));
    t.add_right(set([8]), meets_4567());
    t.add_right(
        set([9]),
        SetPred::And(vec![meets_4567(), SetPred::Or(vec![SetPred::not(meets_45()), meets_146()])]),
    );
    Transducer::from_table(Alphabet::Bits(2), Alphabet::bit(), t).expect("well-formed stavi table")
}

pub fn since_automaton() -> Transducer {
    static CELL: OnceLock<Transducer> = OnceLock::new();
    CELL.get_or_init(|| until_automaton().reverse()).clone()
}

pub fn stavi_since_automaton() -> Transducer {
    static CELL: OnceLock<Transducer> = OnceLock::new();
    CELL.get_or_init(|| stavi_until_automaton().reverse()).clone()
}

pub fn temporal_automaton(op: Temporal) -> Transducer {
    match op {
        Temporal::Until => until_automaton(),
        Temporal::Since => since_automaton(),
        Temporal::StaviUntil => stavi_until_automaton(),
        Temporal::StaviSince => stavi_since_automaton(),
    }
}

pub fn product(a1: &Transducer, a2: &Transducer) -> Result<Transducer> {
    Transducer::product(a1, a2)
}

/// Runs `outer` over the output of `inner`.
pub fn compose(outer: &Transducer, inner: &Transducer) -> Result<Transducer> {
    Transducer::compose(outer, inner)
}

/// Builds `A_f` over input alphabet `2^ap`.
pub fn compile(f: &Formula, ap: &[String]) -> Result<Transducer> {
    let input = Alphabet::Props(ap.to_vec());
    match f {
        Formula::True => Ok(const_automaton(true, &input)),
        Formula::False => Ok(const_automaton(false, &input)),
        Formula::Atom(p) => atom_automaton(p, ap),
        Formula::Not(g) => compose(&not_automaton(), &compile(g, ap)?),
        Formula::Or(l, r) => {
            let both = product(&compile(l, ap)?, &compile(r, ap)?)?;
            compose(&or_automaton(), &both)
        }
        _ => {
            let (op, l, r) = f.as_temporal().expect("temporal node");
            let both = product(&compile(l, ap)?, &compile(r, ap)?)?;
            compose(&temporal_automaton(op), &both)
        }
    }
}

/// States of the elementary transducer used for the root connective.
pub fn elementary_size(f: &Formula) -> u128 {
    match f {
        Formula::Until(..) | Formula::Since(..) => 5,
        Formula::StaviUntil(..) | Formula::StaviSince(..) => 10,
        _ => 1,
    }
}

/// Product of the elementary sizes over the formula tree.
pub fn predicted_states(f: &Formula) -> u128 {
    elementary_size(f) * f.children().into_iter().map(predicted_states).product::<u128>()
}
