//! Path saturation with content tracking.
//!
//! An item `(p, C, q, m)` records that some run fragment leads from a cut
//! labelled `p` to a cut labelled `q`, visiting exactly the states in `C`;
//! `m` tells whether the fragment reads a nonempty word. Items are closed
//! under single successor steps, concatenation, ω- and −ω-iteration of
//! nonempty loops, and shuffles. A transition is live when an item leads to
//! its source from an initial state and another leads from its target to a
//! final state.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::automaton::{State, StateSet, Transducer};
use crate::construction::{compile, product};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::words::{Alphabet, Letter};

/// Default cap on the number of items.
pub const DEFAULT_MAX_ITEMS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathItem {
    pub source: State,
    pub content: FixedBitSet,
    pub target: State,
    pub nonempty: bool,
}

impl PathItem {
    pub fn content_set(&self) -> StateSet {
        self.content.ones().collect()
    }

    pub fn render(&self, a: &Transducer) -> String {
        let names: Vec<String> = self.content.ones().map(|s| a.state_name(s)).collect();
        format!(
            "({}, {{{}}}, {}, {})",
            a.state_name(self.source),
            names.join(","),
            a.state_name(self.target),
            if self.nonempty { "nonempty" } else { "empty" }
        )
    }
}

/// Which closure rules are enabled. The base items are always present.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub succ: bool,
    pub cat: bool,
    pub omega: bool,
    pub neg_omega: bool,
    pub shuffle: bool,
}

impl RuleSet {
    pub const ALL: RuleSet = RuleSet {
        succ: true,
        cat: true,
        omega: true,
        neg_omega: true,
        shuffle: true,
    };

    pub const NONE: RuleSet = RuleSet {
        succ: false,
        cat: false,
        omega: false,
        neg_omega: false,
        shuffle: false,
    };

    /// Whether every rule enabled in `self` is enabled in `other`.
    pub fn is_subset(&self, other: &RuleSet) -> bool {
        (!self.succ || other.succ)
            && (!self.cat || other.cat)
            && (!self.omega || other.omega)
            && (!self.neg_omega || other.neg_omega)
            && (!self.shuffle || other.shuffle)
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::ALL
    }
}

impl FromStr for RuleSet {
    type Err = Error;

    /// Comma-separated rule names: `succ`, `cat`, `omega`, `negomega`,
    /// `shuffle`, or `all`.
    fn from_str(s: &str) -> Result<RuleSet> {
        let mut rules = RuleSet::NONE;
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "succ" => rules.succ = true,
                "cat" => rules.cat = true,
                "omega" => rules.omega = true,
                "negomega" => rules.neg_omega = true,
                "shuffle" => rules.shuffle = true,
                "all" => rules = RuleSet::ALL,
                other => {
                    return Err(Error::syntax(
                        s.find(other).unwrap_or(0),
                        format!("unknown rule `{other}`"),
                    ))
                }
            }
        }
        Ok(rules)
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.succ, "succ"),
            (self.cat, "cat"),
            (self.omega, "omega"),
            (self.neg_omega, "negomega"),
            (self.shuffle, "shuffle"),
        ]
        .into_iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| n)
        .collect();
        f.write_str(&names.join(","))
    }
}

/// The saturated item set.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub items: Vec<PathItem>,
    /// The item cap was hit; `items` is a sound under-approximation.
    pub truncated: bool,
    index: HashMap<PathItem, usize>,
}

impl Saturation {
    pub fn contains(&self, item: &PathItem) -> bool {
        self.index.contains_key(item)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Contents are interned; items refer to them by index.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Raw {
    source: u32,
    content: u32,
    target: u32,
    nonempty: bool,
}

#[derive(Default)]
struct Contents {
    sets: Vec<FixedBitSet>,
    ids: FxHashMap<FixedBitSet, u32>,
    unions: FxHashMap<(u32, u32), u32>,
    inserts: FxHashMap<(u32, u32), u32>,
}

impl Contents {
    fn intern(&mut self, set: FixedBitSet) -> u32 {
        if let Some(&id) = self.ids.get(&set) {
            return id;
        }
        let id = self.sets.len() as u32;
        self.ids.insert(set.clone(), id);
        self.sets.push(set);
        id
    }

    fn union(&mut self, x: u32, y: u32) -> u32 {
        if x == y {
            return x;
        }
        let key = (x.min(y), x.max(y));
        if let Some(&id) = self.unions.get(&key) {
            return id;
        }
        let mut set = self.sets[x as usize].clone();
        set.union_with(&self.sets[y as usize]);
        let id = self.intern(set);
        self.unions.insert(key, id);
        id
    }

    fn insert(&mut self, x: u32, s: State) -> u32 {
        if self.sets[x as usize].contains(s) {
            return x;
        }
        if let Some(&id) = self.inserts.get(&(x, s as u32)) {
            return id;
        }
        let mut set = self.sets[x as usize].clone();
        set.insert(s);
        let id = self.intern(set);
        self.inserts.insert((x, s as u32), id);
        id
    }
}

#[derive(Clone, Copy)]
enum Job {
    New(u32),
    /// An existing item was derived again by a non-concatenation rule.
    BecameAtomic(u32),
}

struct Saturator<'a> {
    a: &'a Transducer,
    rules: RuleSet,
    max_items: usize,
    contents: Contents,
    items: Vec<Raw>,
    index: FxHashMap<Raw, u32>,
    /// Items usable as the right operand of a concatenation: those not
    /// themselves produced by a concatenation. Concatenation being
    /// associative, folding to the left loses nothing.
    atomic: Vec<bool>,
    atomic_by_source: Vec<Vec<u32>>,
    by_target: Vec<Vec<u32>>,
    queue: VecDeque<Job>,
    succ_targets: Vec<Vec<State>>,
    left_cache: FxHashMap<u32, Vec<State>>,
    right_cache: FxHashMap<u32, Vec<State>>,
    truncated: bool,
}

impl Saturator<'_> {
    fn add(&mut self, source: State, content: u32, target: State, nonempty: bool, atomic: bool) {
        let item = Raw { source: source as u32, content, target: target as u32, nonempty };
        if self.truncated {
            return;
        }
        if let Some(&id) = self.index.get(&item) {
            if atomic && !self.atomic[id as usize] {
                self.atomic[id as usize] = true;
                self.atomic_by_source[source].push(id);
                self.queue.push_back(Job::BecameAtomic(id));
            }
            return;
        }
        if self.items.len() >= self.max_items {
            self.truncated = true;
            return;
        }
        let id = self.items.len() as u32;
        if atomic {
            self.atomic_by_source[source].push(id);
        }
        self.by_target[target].push(id);
        self.index.insert(item, id);
        self.items.push(item);
        self.atomic.push(atomic);
        self.queue.push_back(Job::New(id));
    }

    /// States `q` with `P -> q`.
    fn left_targets(&mut self, p: u32) -> Vec<State> {
        if let Some(v) = self.left_cache.get(&p) {
            return v.clone();
        }
        let set: StateSet = self.contents.sets[p as usize].ones().collect();
        let v: Vec<State> = (0..self.a.num_states()).filter(|&q| self.a.left_limit(&set, q)).collect();
        self.left_cache.insert(p, v.clone());
        v
    }

    /// States `q` with `q -> P`.
    fn right_sources(&mut self, p: u32) -> Vec<State> {
        if let Some(v) = self.right_cache.get(&p) {
            return v.clone();
        }
        let set: StateSet = self.contents.sets[p as usize].ones().collect();
        let v: Vec<State> = (0..self.a.num_states()).filter(|&q| self.a.right_limit(q, &set)).collect();
        self.right_cache.insert(p, v.clone());
        v
    }

    /// Concatenates every item ending at the source of `id` with `id`.
    fn cat_as_right(&mut self, id: u32) {
        let item = self.items[id as usize];
        let lefts = self.by_target[item.source as usize].len();
        for k in 0..lefts {
            let left = self.items[self.by_target[item.source as usize][k] as usize];
            let c = self.contents.union(left.content, item.content);
            self.add(left.source as State, c, item.target as State, left.nonempty || item.nonempty, false);
        }
    }

    fn process(&mut self, job: Job) {
        let id = match job {
            Job::New(id) => id,
            Job::BecameAtomic(id) => {
                if self.rules.cat {
                    self.cat_as_right(id);
                }
                return;
            }
        };
        let item = self.items[id as usize];
        let (p, q) = (item.source as State, item.target as State);
        let is_base = !item.nonempty && self.contents.sets[item.content as usize].count_ones(..) == 1;
        if self.rules.succ {
            for k in 0..self.succ_targets[q].len() {
                let r = self.succ_targets[q][k];
                let c = self.contents.insert(item.content, r);
                self.add(p, c, r, true, is_base);
            }
        }
        if self.rules.cat {
            // Lists grow while we iterate; later entries meet this item when
            // they are processed themselves.
            if self.atomic[id as usize] {
                self.cat_as_right(id);
            }
            let rights = self.atomic_by_source[q].len();
            for k in 0..rights {
                let right = self.items[self.atomic_by_source[q][k] as usize];
                let c = self.contents.union(item.content, right.content);
                self.add(p, c, right.target as State, item.nonempty || right.nonempty, false);
            }
        }
        if p == q && item.nonempty {
            if self.rules.omega {
                for r in self.left_targets(item.content) {
                    let c = self.contents.insert(item.content, r);
                    self.add(p, c, r, true, true);
                }
            }
            if self.rules.neg_omega {
                for r in self.right_sources(item.content) {
                    let c = self.contents.insert(item.content, r);
                    self.add(r, c, p, true, true);
                }
            }
        }
    }

    /// One round of the shuffle rule over every union of nonempty item
    /// contents. Returns whether new items were added.
    fn shuffle_round(&mut self, closure: &mut Vec<u32>, seen: &mut FxHashSet<u32>, done: &mut usize) -> bool {
        // Extend the union closure with the contents of items added since
        // the last round.
        let fresh: Vec<u32> = self.items[*done..].iter().filter(|i| i.nonempty).map(|i| i.content).collect();
        *done = self.items.len();
        for c in fresh {
            if seen.contains(&c) {
                continue;
            }
            let mut pending = vec![c];
            while let Some(x) = pending.pop() {
                if !seen.insert(x) {
                    continue;
                }
                if seen.len() > self.max_items {
                    self.truncated = true;
                    return false;
                }
                let existing = closure.len();
                closure.push(x);
                for k in 0..existing {
                    let u = self.contents.union(closure[k], x);
                    if !seen.contains(&u) {
                        pending.push(u);
                    }
                }
            }
        }
        let before = self.items.len();
        for &set in closure.iter() {
            let entries = self.left_targets(set);
            let exits = self.right_sources(set);
            if entries.is_empty() || exits.is_empty() {
                continue;
            }
            let target = &self.contents.sets[set as usize];
            let mut union = FixedBitSet::with_capacity(self.a.num_states());
            for item in &self.items {
                let content = &self.contents.sets[item.content as usize];
                if item.nonempty
                    && content.is_subset(target)
                    && entries.contains(&(item.source as State))
                    && exits.contains(&(item.target as State))
                {
                    union.union_with(content);
                }
            }
            if union != *target {
                continue;
            }
            for &p in &exits {
                for &q in &entries {
                    let with_p = self.contents.insert(set, p);
                    let c = self.contents.insert(with_p, q);
                    self.add(p, c, q, true, true);
                }
            }
        }
        self.items.len() > before
    }
}

/// Least set of items closed under the enabled rules, up to `max_items`.
pub fn saturate(a: &Transducer, rules: RuleSet, max_items: usize) -> Saturation {
    let n = a.num_states();
    let succ_targets = (0..n)
        .map(|p| {
            let mut t: Vec<State> = a
                .input()
                .letters()
                .flat_map(|x| a.successors(p, x))
                .map(|(_, q)| q)
                .collect();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect();
    let mut s = Saturator {
        a,
        rules,
        max_items,
        contents: Contents::default(),
        items: Vec::new(),
        index: FxHashMap::default(),
        atomic: Vec::new(),
        atomic_by_source: vec![Vec::new(); n],
        by_target: vec![Vec::new(); n],
        queue: VecDeque::new(),
        succ_targets,
        left_cache: FxHashMap::default(),
        right_cache: FxHashMap::default(),
        truncated: false,
    };
    for p in 0..n {
        let mut c = FixedBitSet::with_capacity(n);
        c.insert(p);
        let c = s.contents.intern(c);
        s.add(p, c, p, false, true);
    }
    let mut closure = Vec::new();
    let mut seen = FxHashSet::default();
    let mut done = 0;
    loop {
        while let Some(job) = s.queue.pop_front() {
            if s.truncated {
                break;
            }
            s.process(job);
        }
        if s.truncated || !rules.shuffle || !s.shuffle_round(&mut closure, &mut seen, &mut done) {
            break;
        }
    }
    let items: Vec<PathItem> = s
        .items
        .iter()
        .map(|r| PathItem {
            source: r.source as State,
            content: s.contents.sets[r.content as usize].clone(),
            target: r.target as State,
            nonempty: r.nonempty,
        })
        .collect();
    let index = items.iter().cloned().enumerate().map(|(i, item)| (item, i)).collect();
    Saturation {
        items,
        truncated: s.truncated,
        index,
    }
}

/// States reachable from an initial state, and states from which a final
/// state is reachable, with the item witnessing each.
pub struct Liveness {
    pub accessible: HashMap<State, usize>,
    pub coaccessible: HashMap<State, usize>,
}

pub fn liveness(a: &Transducer, sat: &Saturation) -> Liveness {
    let mut accessible = HashMap::new();
    let mut coaccessible = HashMap::new();
    for (id, item) in sat.items.iter().enumerate() {
        if a.is_initial(item.source) {
            accessible.entry(item.target).or_insert(id);
        }
        if a.is_final(item.target) {
            coaccessible.entry(item.source).or_insert(id);
        }
    }
    Liveness { accessible, coaccessible }
}

/// Whether the successor transition `p -a|b-> q` occurs in some accepting
/// run, according to the saturated items.
pub fn is_transition_live(a: &Transducer, sat: &Saturation, p: State, q: State) -> bool {
    let live = liveness(a, sat);
    live.accessible.contains_key(&p) && live.coaccessible.contains_key(&q)
}

/// Emptiness as an acceptor: nonempty iff some initial state is final (the
/// empty word) or a nonempty item leads from an initial to a final state.
pub fn is_empty(a: &Transducer, sat: &Saturation) -> bool {
    let empty_word = (0..a.num_states()).any(|s| a.is_initial(s) && a.is_final(s));
    !(empty_word || accepts_nonempty_word(a, sat))
}

pub fn accepts_nonempty_word(a: &Transducer, sat: &Saturation) -> bool {
    sat.items
        .iter()
        .any(|i| i.nonempty && a.is_initial(i.source) && a.is_final(i.target))
}

/// Outcome of a satisfiability check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A live transition writing 1, with a readable derivation.
    Sat(Vec<String>),
    Unsat,
    /// The item cap was hit before a witness was found.
    Unknown,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

/// Looks for a live successor transition whose output satisfies `marks`.
pub fn find_live_transition(
    a: &Transducer,
    rules: RuleSet,
    max_items: usize,
    marks: impl Fn(Letter) -> bool,
) -> Verdict {
    let sat = saturate(a, rules, max_items);
    let live = liveness(a, &sat);
    let mut sources: Vec<State> = live.accessible.keys().copied().collect();
    sources.sort_unstable();
    for p in sources {
        for x in a.input().letters() {
            for (b, q) in a.successors(p, x) {
                if !marks(b) {
                    continue;
                }
                if let Some(&back) = live.coaccessible.get(&q) {
                    let front = live.accessible[&p];
                    return Verdict::Sat(vec![
                        format!("reach  {}", sat.items[front].render(a)),
                        format!(
                            "step   {} -{}|{}-> {}",
                            a.state_name(p),
                            a.input().render_letter(x),
                            a.output().render_letter(b),
                            a.state_name(q)
                        ),
                        format!("finish {}", sat.items[back].render(a)),
                    ]);
                }
            }
        }
    }
    if sat.truncated {
        Verdict::Unknown
    } else {
        Verdict::Unsat
    }
}

/// Whether `f` holds at some position of some word over `2^ap`.
pub fn satisfiable(f: &Formula, ap: &[String], rules: RuleSet, max_items: usize) -> Result<Verdict> {
    let a = compile(f, ap)?;
    Ok(find_live_transition(&a, rules, max_items, |b| b.0 == 1))
}

/// Satisfiability restricted to words accepted by `b`, an automaton
/// reading `2^ap`.
pub fn satisfiable_within(
    f: &Formula,
    ap: &[String],
    b: &Transducer,
    rules: RuleSet,
    max_items: usize,
) -> Result<Verdict> {
    let expected = Alphabet::Props(ap.to_vec());
    if *b.input() != expected {
        return Err(Error::AlphabetMismatch(format!(
            "the restricting automaton reads `{}`, formulas read `{expected}`",
            b.input()
        )));
    }
    let a = compile(f, ap)?;
    let both = product(&a, b)?;
    let width = a.output().size();
    Ok(find_live_transition(&both, rules, max_items, |x| x.0 % width == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{SetPred, Table};
    use crate::construction::atom_automaton;

    fn omega_acceptor() -> Transducer {
        let al = Alphabet::Symbols(vec!["a".into()]);
        let mut t = Table::new(&["p", "f"], 1);
        t.set_initial(0);
        t.set_final(1);
        t.add_succ(0, Letter(0), Letter(0), 0);
        t.add_left(SetPred::Exactly(StateSet::singleton(0)), StateSet::singleton(1));
        Transducer::from_table(al.clone(), al, t).unwrap()
    }

    fn bits(n: usize, states: &[State]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        states.iter().for_each(|&s| b.insert(s));
        b
    }

    #[test]
    fn one_state_items() {
        let a = atom_automaton("a", &["a".to_string()]).unwrap();
        let sat = saturate(&a, RuleSet::ALL, DEFAULT_MAX_ITEMS);
        let contents: Vec<(bool, Vec<usize>)> =
            sat.items.iter().map(|i| (i.nonempty, i.content.ones().collect())).collect();
        assert_eq!(contents, vec![(false, vec![0]), (true, vec![0])]);
    }

    #[test]
    fn omega_rule_reaches_limit_state() {
        let a = omega_acceptor();
        let sat = saturate(&a, RuleSet::ALL, DEFAULT_MAX_ITEMS);
        assert!(sat.contains(&PathItem { source: 0, content: bits(2, &[0, 1]), target: 1, nonempty: true }));
        assert!(!is_empty(&a, &sat));
        let without = saturate(&a, "succ,cat".parse().unwrap(), DEFAULT_MAX_ITEMS);
        assert!(is_empty(&a, &without));
    }

    #[test]
    fn acceptor_without_transitions_is_empty() {
        let al = Alphabet::Symbols(vec!["a".into()]);
        let mut t = Table::new(&["p", "f"], 1);
        t.set_initial(0);
        t.set_final(1);
        let a = Transducer::from_table(al.clone(), al, t).unwrap();
        assert!(is_empty(&a, &saturate(&a, RuleSet::ALL, DEFAULT_MAX_ITEMS)));
    }

    #[test]
    fn rule_names_parse() {
        let r: RuleSet = "succ,cat,omega,negomega,shuffle".parse().unwrap();
        assert_eq!(r, RuleSet::ALL);
        assert_eq!(r.to_string(), "succ,cat,omega,negomega,shuffle");
        assert!("succ,bogus".parse::<RuleSet>().is_err());
    }

    #[test]
    fn cap_marks_truncation() {
        let a = omega_acceptor();
        let sat = saturate(&a, RuleSet::ALL, 2);
        assert!(sat.truncated);
        assert_eq!(sat.len(), 2);
    }
}
