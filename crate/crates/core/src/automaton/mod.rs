//! Letter-to-letter transducers with limit transitions.
//!
//! A run labels every cut of the input ordering with a state. Between two
//! consecutive positions the labels are related by a successor transition
//! that also emits one output letter; at cuts without a predecessor (resp.
//! successor) the label is related to the set of states occurring
//! arbitrarily close on the left (resp. right) by a left (resp. right) limit
//! transition.
//!
//! Elementary transducers are stored as [`Table`]s whose limit transitions
//! are predicates over state sets. Products and compositions are kept
//! symbolic: their states are pairs numbered `s1 * n2 + s2` and every query
//! is answered by projecting onto the components.

mod finite;
pub mod format;
mod term_run;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{pair_letter, split_pair, Alphabet, Letter};

pub use finite::{enumerate_accepting_runs_finite, enumerate_runs_direct, validate_finite_run, FiniteRun};
pub use term_run::{
    find_run_term, find_run_term_with, output_term, reverse_run, validate_run_term, RunTerm,
    SearchLimits,
};

pub type State = usize;

/// A finite set of states, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(Vec<State>);

impl StateSet {
    pub fn new() -> StateSet {
        StateSet(Vec::new())
    }

    pub fn singleton(s: State) -> StateSet {
        StateSet(vec![s])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, s: State) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn insert(&mut self, s: State) -> bool {
        match self.0.binary_search(&s) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, s);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = State> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[State] {
        &self.0
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        StateSet(out)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.iter().any(|s| other.contains(s))
    }

    /// Image under `f`, deduplicated.
    pub fn map(&self, f: impl Fn(State) -> State) -> StateSet {
        self.iter().map(f).collect()
    }

    /// All nonempty subsets of `{0, .., n-1}`, in increasing bitmask order.
    pub fn all_nonempty_subsets(n: usize) -> impl Iterator<Item = StateSet> {
        assert!(n < usize::BITS as usize);
        (1usize..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
    }
}

impl FromIterator<State> for StateSet {
    fn from_iter<I: IntoIterator<Item = State>>(iter: I) -> StateSet {
        let mut v: Vec<State> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

impl<const N: usize> From<[State; N]> for StateSet {
    fn from(states: [State; N]) -> StateSet {
        states.into_iter().collect()
    }
}

/// A condition on a nonempty limit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetPred {
    Any,
    Exactly(StateSet),
    /// Nonempty subsets of the given set.
    Subset(StateSet),
    Meets(StateSet),
    Contains(State),
    Not(Box<SetPred>),
    And(Vec<SetPred>),
    Or(Vec<SetPred>),
}

impl SetPred {
    pub fn eval(&self, p: &StateSet) -> bool {
        match self {
            SetPred::Any => !p.is_empty(),
            SetPred::Exactly(s) => p == s,
            SetPred::Subset(s) => !p.is_empty() && p.is_subset(s),
            SetPred::Meets(s) => p.intersects(s),
            SetPred::Contains(q) => p.contains(*q),
            SetPred::Not(inner) => !inner.eval(p),
            SetPred::And(all) => all.iter().all(|x| x.eval(p)),
            SetPred::Or(any) => any.iter().any(|x| x.eval(p)),
        }
    }

    pub fn not(p: SetPred) -> SetPred {
        SetPred::Not(Box::new(p))
    }

    fn states(&self, out: &mut Vec<State>) {
        match self {
            SetPred::Any => {}
            SetPred::Exactly(s) | SetPred::Subset(s) | SetPred::Meets(s) => out.extend(s.iter()),
            SetPred::Contains(q) => out.push(*q),
            SetPred::Not(inner) => inner.states(out),
            SetPred::And(v) | SetPred::Or(v) => v.iter().for_each(|x| x.states(out)),
        }
    }
}

/// `P -> q` for every `P` satisfying `when` and every `q` in `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftRule {
    pub when: SetPred,
    pub to: StateSet,
}

/// `q -> P` for every `q` in `from` and every `P` satisfying `when`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightRule {
    pub from: StateSet,
    pub when: SetPred,
}

/// Explicit transducer: named states, successor table and limit rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    names: Vec<String>,
    initial: StateSet,
    finals: StateSet,
    /// `succ[p][a]` lists `(output, target)` pairs.
    succ: Vec<Vec<Vec<(Letter, State)>>>,
    left: Vec<LeftRule>,
    right: Vec<RightRule>,
}

impl Table {
    pub fn new<S: AsRef<str>>(names: &[S], input_size: u32) -> Table {
        Table {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            initial: StateSet::new(),
            finals: StateSet::new(),
            succ: vec![vec![Vec::new(); input_size as usize]; names.len()],
            left: Vec::new(),
            right: Vec::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.names.iter().position(|n| n == name)
    }

    pub fn set_initial(&mut self, s: State) {
        self.initial.insert(s);
    }

    pub fn set_final(&mut self, s: State) {
        self.finals.insert(s);
    }

    pub fn add_succ(&mut self, from: State, input: Letter, output: Letter, to: State) {
        let cell = &mut self.succ[from][input.0 as usize];
        if !cell.contains(&(output, to)) {
            cell.push((output, to));
            cell.sort();
        }
    }

    pub fn add_left(&mut self, when: SetPred, to: StateSet) {
        self.left.push(LeftRule { when, to });
    }

    pub fn add_right(&mut self, from: StateSet, when: SetPred) {
        self.right.push(RightRule { from, when });
    }

    pub fn left_rules(&self) -> &[LeftRule] {
        &self.left
    }

    pub fn right_rules(&self) -> &[RightRule] {
        &self.right
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    /// Successor transitions as `(from, input, output, to)`, sorted.
    pub fn transitions(&self) -> Vec<(State, Letter, Letter, State)> {
        let mut out = Vec::new();
        for (p, row) in self.succ.iter().enumerate() {
            for (a, cell) in row.iter().enumerate() {
                for &(b, q) in cell {
                    out.push((p, Letter(a as u32), b, q));
                }
            }
        }
        out
    }

    fn reverse(&self) -> Table {
        let mut rev = Table {
            names: self.names.clone(),
            initial: self.finals.clone(),
            finals: self.initial.clone(),
            succ: vec![vec![Vec::new(); self.succ.first().map_or(0, Vec::len)]; self.names.len()],
            left: Vec::new(),
            right: Vec::new(),
        };
        for (p, a, b, q) in self.transitions() {
            rev.add_succ(q, a, b, p);
        }
        rev.right = self
            .left
            .iter()
            .map(|r| RightRule { from: r.to.clone(), when: r.when.clone() })
            .collect();
        rev.left = self
            .right
            .iter()
            .map(|r| LeftRule { when: r.when.clone(), to: r.from.clone() })
            .collect();
        rev
    }

    fn validate(&self, input: &Alphabet, output: &Alphabet) -> Result<()> {
        let n = self.num_states();
        let bad_state = |s: State| s >= n;
        if self.succ.iter().any(|row| row.len() != input.size() as usize) {
            return Err(Error::AlphabetMismatch("successor table width differs from input alphabet".into()));
        }
        for (p, a, b, q) in self.transitions() {
            if bad_state(q) || !output.contains(b) {
                return Err(Error::AlphabetMismatch(format!(
                    "transition {} -{}|{}-> {} is out of range",
                    p, a.0, b.0, q
                )));
            }
        }
        let mut mentioned = Vec::new();
        for r in &self.left {
            r.when.states(&mut mentioned);
            mentioned.extend(r.to.iter());
        }
        for r in &self.right {
            r.when.states(&mut mentioned);
            mentioned.extend(r.from.iter());
        }
        mentioned.extend(self.initial.iter());
        mentioned.extend(self.finals.iter());
        if let Some(s) = mentioned.into_iter().find(|&s| bad_state(s)) {
            return Err(Error::Shape(format!("state index {s} out of range")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Table(Arc<Table>),
    Product(Arc<Transducer>, Arc<Transducer>),
    /// Runs `outer` over the output of `inner`.
    Compose {
        inner: Arc<Transducer>,
        outer: Arc<Transducer>,
    },
}

/// A transducer, either explicit or a symbolic product/composition.
#[derive(Clone, Debug)]
pub struct Transducer {
    input: Alphabet,
    output: Alphabet,
    kind: Kind,
    states: usize,
}

impl Transducer {
    pub fn from_table(input: Alphabet, output: Alphabet, table: Table) -> Result<Transducer> {
        table.validate(&input, &output)?;
        Ok(Transducer {
            states: table.num_states(),
            input,
            output,
            kind: Kind::Table(Arc::new(table)),
        })
    }

    /// Runs both transducers on the same input and pairs their outputs.
    pub fn product(a1: &Transducer, a2: &Transducer) -> Result<Transducer> {
        if a1.input != a2.input {
            return Err(Error::AlphabetMismatch(format!(
                "product of transducers reading `{}` and `{}`",
                a1.input, a2.input
            )));
        }
        Ok(Transducer {
            input: a1.input.clone(),
            output: Alphabet::pair(&a1.output, &a2.output),
            states: pair_count(a1.states, a2.states)?,
            kind: Kind::Product(Arc::new(a1.clone()), Arc::new(a2.clone())),
        })
    }

    /// `outer ∘ inner`: runs `outer` over the output of `inner`.
    pub fn compose(outer: &Transducer, inner: &Transducer) -> Result<Transducer> {
        if inner.output != outer.input {
            return Err(Error::AlphabetMismatch(format!(
                "composition feeds `{}` into a transducer reading `{}`",
                inner.output, outer.input
            )));
        }
        Ok(Transducer {
            input: inner.input.clone(),
            output: outer.output.clone(),
            states: pair_count(inner.states, outer.states)?,
            kind: Kind::Compose {
                inner: Arc::new(inner.clone()),
                outer: Arc::new(outer.clone()),
            },
        })
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.kind {
            Kind::Table(t) => Some(t),
            _ => None,
        }
    }

    pub(crate) fn table_arc(&self) -> Option<&Arc<Table>> {
        match &self.kind {
            Kind::Table(t) => Some(t),
            _ => None,
        }
    }

    /// The two components and the size of the second one, for composites.
    /// For compositions the first component is the inner transducer.
    fn components(&self) -> Option<(&Transducer, &Transducer)> {
        match &self.kind {
            Kind::Table(_) => None,
            Kind::Product(a, b) => Some((a, b)),
            Kind::Compose { inner, outer } => Some((inner, outer)),
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self.kind, Kind::Product(..))
    }

    /// Components of a product, in order.
    pub fn product_parts(&self) -> Option<(&Transducer, &Transducer)> {
        match &self.kind {
            Kind::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// `(inner, outer)` of a composition.
    pub fn compose_parts(&self) -> Option<(&Transducer, &Transducer)> {
        match &self.kind {
            Kind::Compose { inner, outer } => Some((inner, outer)),
            _ => None,
        }
    }

    /// Splits a composite state into its component states.
    pub fn split_state(&self, s: State) -> Option<(State, State)> {
        let (_, b) = self.components()?;
        Some((s / b.states, s % b.states))
    }

    pub fn join_state(&self, s1: State, s2: State) -> State {
        let (_, b) = self.components().expect("composite transducer");
        s1 * b.states + s2
    }

    pub fn state_name(&self, s: State) -> String {
        match &self.kind {
            Kind::Table(t) => t.names[s].clone(),
            _ => {
                let (a, b) = self.components().unwrap();
                let (s1, s2) = self.split_state(s).unwrap();
                format!("({},{})", a.state_name(s1), b.state_name(s2))
            }
        }
    }

    /// Resolves a state name as printed by [`Transducer::state_name`].
    pub fn state_by_name(&self, name: &str) -> Option<State> {
        match &self.kind {
            Kind::Table(t) => t.state(name),
            _ => {
                let (a, b) = self.components().unwrap();
                let inner = name.strip_prefix('(')?.strip_suffix(')')?;
                let mut depth = 0;
                for (i, c) in inner.char_indices() {
                    match c {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        ',' if depth == 0 => {
                            let s1 = a.state_by_name(&inner[..i])?;
                            let s2 = b.state_by_name(&inner[i + 1..])?;
                            return Some(self.join_state(s1, s2));
                        }
                        _ => {}
                    }
                }
                None
            }
        }
    }

    pub fn is_initial(&self, s: State) -> bool {
        match &self.kind {
            Kind::Table(t) => t.initial.contains(s),
            _ => {
                let (a, b) = self.components().unwrap();
                let (s1, s2) = self.split_state(s).unwrap();
                a.is_initial(s1) && b.is_initial(s2)
            }
        }
    }

    pub fn is_final(&self, s: State) -> bool {
        match &self.kind {
            Kind::Table(t) => t.finals.contains(s),
            _ => {
                let (a, b) = self.components().unwrap();
                let (s1, s2) = self.split_state(s).unwrap();
                a.is_final(s1) && b.is_final(s2)
            }
        }
    }

    pub fn initial_states(&self) -> Vec<State> {
        match &self.kind {
            Kind::Table(t) => t.initial.iter().collect(),
            _ => {
                let (a, b) = self.components().unwrap();
                let right = b.initial_states();
                a.initial_states()
                    .into_iter()
                    .flat_map(|s1| right.iter().map(move |&s2| s1 * b.states + s2))
                    .collect()
            }
        }
    }

    pub fn final_states(&self) -> Vec<State> {
        match &self.kind {
            Kind::Table(t) => t.finals.iter().collect(),
            _ => {
                let (a, b) = self.components().unwrap();
                let right = b.final_states();
                a.final_states()
                    .into_iter()
                    .flat_map(|s1| right.iter().map(move |&s2| s1 * b.states + s2))
                    .collect()
            }
        }
    }

    /// `(output, target)` pairs of the successor transitions reading `a`.
    pub fn successors(&self, s: State, a: Letter) -> Vec<(Letter, State)> {
        match &self.kind {
            Kind::Table(t) => t.succ[s][a.0 as usize].clone(),
            Kind::Product(a1, a2) => {
                let (s1, s2) = (s / a2.states, s % a2.states);
                let right = a2.successors(s2, a);
                let width = a1.output.size();
                let mut out = Vec::new();
                for (b1, t1) in a1.successors(s1, a) {
                    for &(b2, t2) in &right {
                        out.push((pair_letter(b1, b2, width), t1 * a2.states + t2));
                    }
                }
                out
            }
            Kind::Compose { inner, outer } => {
                let (s1, s2) = (s / outer.states, s % outer.states);
                let mut out = Vec::new();
                for (b, t1) in inner.successors(s1, a) {
                    for (c, t2) in outer.successors(s2, b) {
                        out.push((c, t1 * outer.states + t2));
                    }
                }
                out.sort();
                out
            }
        }
    }

    /// Whether the successor transition `s -a|b-> t` exists.
    pub fn has_transition(&self, s: State, a: Letter, b: Letter, t: State) -> bool {
        match &self.kind {
            Kind::Table(table) => table.succ[s][a.0 as usize].contains(&(b, t)),
            Kind::Product(a1, a2) => {
                let (b1, b2) = split_pair(b, a1.output.size());
                a1.has_transition(s / a2.states, a, b1, t / a2.states)
                    && a2.has_transition(s % a2.states, a, b2, t % a2.states)
            }
            Kind::Compose { inner, outer } => {
                let (s1, s2) = (s / outer.states, s % outer.states);
                let (t1, t2) = (t / outer.states, t % outer.states);
                inner
                    .output
                    .letters()
                    .any(|c| outer.has_transition(s2, c, b, t2) && inner.has_transition(s1, a, c, t1))
            }
        }
    }

    /// Whether the left limit transition `p -> q` exists.
    pub fn left_limit(&self, p: &StateSet, q: State) -> bool {
        if p.is_empty() {
            return false;
        }
        match &self.kind {
            Kind::Table(t) => t.left.iter().any(|r| r.to.contains(q) && r.when.eval(p)),
            _ => {
                let (a, b) = self.components().unwrap();
                let n2 = b.states;
                a.left_limit(&p.map(|s| s / n2), q / n2) && b.left_limit(&p.map(|s| s % n2), q % n2)
            }
        }
    }

    /// Whether the right limit transition `q -> p` exists.
    pub fn right_limit(&self, q: State, p: &StateSet) -> bool {
        if p.is_empty() {
            return false;
        }
        match &self.kind {
            Kind::Table(t) => t.right.iter().any(|r| r.from.contains(q) && r.when.eval(p)),
            _ => {
                let (a, b) = self.components().unwrap();
                let n2 = b.states;
                a.right_limit(q / n2, &p.map(|s| s / n2)) && b.right_limit(q % n2, &p.map(|s| s % n2))
            }
        }
    }

    /// Reverses every transition and swaps initial and final states.
    pub fn reverse(&self) -> Transducer {
        let kind = match &self.kind {
            Kind::Table(t) => Kind::Table(Arc::new(t.reverse())),
            Kind::Product(a, b) => Kind::Product(Arc::new(a.reverse()), Arc::new(b.reverse())),
            Kind::Compose { inner, outer } => Kind::Compose {
                inner: Arc::new(inner.reverse()),
                outer: Arc::new(outer.reverse()),
            },
        };
        Transducer {
            input: self.input.clone(),
            output: self.output.clone(),
            kind,
            states: self.states,
        }
    }

    /// Number of successor transitions, computed from per-letter counts so
    /// that large composites need not be enumerated.
    pub fn successor_count(&self) -> u128 {
        self.letter_counts().iter().flatten().sum()
    }

    /// `counts[a][b]`: number of successor transitions reading `a` and
    /// writing `b`.
    fn letter_counts(&self) -> Vec<Vec<u128>> {
        let (ni, no) = (self.input.size() as usize, self.output.size() as usize);
        let mut counts = vec![vec![0u128; no]; ni];
        match &self.kind {
            Kind::Table(t) => {
                for (_, a, b, _) in t.transitions() {
                    counts[a.0 as usize][b.0 as usize] += 1;
                }
            }
            Kind::Product(a1, a2) => {
                let (c1, c2) = (a1.letter_counts(), a2.letter_counts());
                let width = a1.output.size() as usize;
                for a in 0..ni {
                    for (b1, x) in c1[a].iter().enumerate() {
                        for (b2, y) in c2[a].iter().enumerate() {
                            counts[a][b1 + width * b2] += x * y;
                        }
                    }
                }
            }
            Kind::Compose { inner, outer } => {
                let (c1, c2) = (inner.letter_counts(), outer.letter_counts());
                for a in 0..ni {
                    for (b, x) in c1[a].iter().enumerate() {
                        for (c, y) in c2[b].iter().enumerate() {
                            counts[a][c] += x * y;
                        }
                    }
                }
            }
        }
        counts
    }

    /// All successor transitions `(from, input, output, to)`, enumerated
    /// through the generic interface.
    pub fn transitions(&self) -> Vec<(State, Letter, Letter, State)> {
        if let Kind::Table(t) = &self.kind {
            return t.transitions();
        }
        let mut out = Vec::new();
        for p in 0..self.states {
            for a in self.input.letters() {
                for (b, q) in self.successors(p, a) {
                    out.push((p, a, b, q));
                }
            }
        }
        out
    }

    /// Materializes the transducer as a table with one exact-set rule per
    /// limit transition. Refused above `cap` states.
    pub fn expand(&self, cap: usize) -> Result<Table> {
        let n = self.states;
        if n > cap {
            return Err(Error::ResourceExceeded(format!(
                "{n} states exceed the expansion cap of {cap}"
            )));
        }
        let names: Vec<String> = (0..n).map(|s| self.state_name(s)).collect();
        let mut table = Table::new(&names, self.input.size());
        for s in 0..n {
            if self.is_initial(s) {
                table.set_initial(s);
            }
            if self.is_final(s) {
                table.set_final(s);
            }
        }
        for (p, a, b, q) in self.transitions() {
            table.add_succ(p, a, b, q);
        }
        for set in StateSet::all_nonempty_subsets(n) {
            let to: StateSet = (0..n).filter(|&q| self.left_limit(&set, q)).collect();
            if !to.is_empty() {
                table.add_left(SetPred::Exactly(set.clone()), to);
            }
            let from: StateSet = (0..n).filter(|&q| self.right_limit(q, &set)).collect();
            if !from.is_empty() {
                table.add_right(from, SetPred::Exactly(set));
            }
        }
        Ok(table)
    }

    /// Explicit limit relations `(P, q)` over all nonempty `P`, for small
    /// transducers.
    pub fn limit_relations(&self) -> (Vec<(StateSet, State)>, Vec<(State, StateSet)>) {
        let n = self.states;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for set in StateSet::all_nonempty_subsets(n) {
            for q in 0..n {
                if self.left_limit(&set, q) {
                    left.push((set.clone(), q));
                }
                if self.right_limit(q, &set) {
                    right.push((q, set.clone()));
                }
            }
        }
        (left, right)
    }

    /// Structural equality of the observable behaviour for small
    /// transducers: same states, transitions, limits, initial and final sets.
    pub fn same_tables(&self, other: &Transducer) -> bool {
        self.input == other.input
            && self.output == other.output
            && self.states == other.states
            && (0..self.states).all(|s| {
                self.is_initial(s) == other.is_initial(s) && self.is_final(s) == other.is_final(s)
            })
            && self.transitions() == other.transitions()
            && self.limit_relations() == other.limit_relations()
    }
}

fn pair_count(n1: usize, n2: usize) -> Result<usize> {
    n1.checked_mul(n2)
        .ok_or_else(|| Error::ResourceExceeded("state count overflows".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> Transducer {
        let al = Alphabet::Symbols(vec!["a".into()]);
        let mut t = Table::new(&["p", "f"], 1);
        t.set_initial(0);
        t.set_final(1);
        t.add_succ(0, Letter(0), Letter(0), 0);
        t.add_left(SetPred::Exactly(StateSet::singleton(0)), StateSet::singleton(1));
        Transducer::from_table(al.clone(), al, t).unwrap()
    }

    #[test]
    fn state_set_ops() {
        let a = StateSet::from([3, 1, 2]);
        let b = StateSet::from([2, 5]);
        assert_eq!(a.union(&b), StateSet::from([1, 2, 3, 5]));
        assert!(a.intersects(&b));
        assert!(StateSet::from([1, 3]).is_subset(&a));
        assert_eq!(StateSet::all_nonempty_subsets(3).count(), 7);
    }

    #[test]
    fn set_predicates() {
        let p = StateSet::from([0, 2]);
        assert!(SetPred::Subset(StateSet::from([0, 1, 2])).eval(&p));
        assert!(!SetPred::Subset(StateSet::from([0, 1])).eval(&p));
        assert!(SetPred::Meets(StateSet::from([2, 4])).eval(&p));
        assert!(SetPred::not(SetPred::Contains(1)).eval(&p));
        assert!(!SetPred::Subset(StateSet::from([0])).eval(&StateSet::new()));
    }

    #[test]
    fn reverse_swaps_limits() {
        let a = two_state();
        let r = a.reverse();
        assert!(r.is_initial(1) && r.is_final(0));
        assert!(r.right_limit(1, &StateSet::singleton(0)));
        assert!(!r.left_limit(&StateSet::singleton(0), 1));
        assert!(r.reverse().same_tables(&a));
    }

    #[test]
    fn product_projects_limits() {
        let a = two_state();
        let p = Transducer::product(&a, &a).unwrap();
        assert_eq!(p.num_states(), 4);
        assert_eq!(p.state_name(3), "(f,f)");
        assert_eq!(p.state_by_name("(p,f)"), Some(1));
        assert!(p.left_limit(&StateSet::singleton(0), 3));
        assert!(!p.left_limit(&StateSet::singleton(0), 2));
        assert_eq!(p.successor_count(), 1);
        let table = p.expand(4).unwrap();
        assert_eq!(table.left_rules().len(), 1);
    }
}
