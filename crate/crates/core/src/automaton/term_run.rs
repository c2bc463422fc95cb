//! Runs on word terms.
//!
//! A [`RunTerm`] mirrors the shape of the input term. Power nodes carry an
//! eventually periodic labelling: a finite list of per-copy runs followed by
//! a cycle of per-copy runs that repeats forever, plus the state at the limit
//! cut. The prefix may be longer than the term's own prefix and the cycle may
//! span several periods of the input.
//!
//! The search computes, for every subterm, the exact set of summaries
//! `(entry, content, exit)` of runs on that subterm, each with a witness.
//! For an ω-power the run eventually settles in a closed walk over passes of
//! the cycle; the limit set is the union of the contents along that walk.
//! −ω-powers are handled by searching the reversed term on the reversed
//! transducer. Products and compositions are searched component-wise and the
//! component runs are aligned afterwards.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{State, StateSet, Table, Transducer};
use crate::error::{Error, Result};
use crate::words::{pair_letter, reverse_term, Letter, WordTerm};

/// A run on a word term, shaped like the term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RunTerm {
    Empty(State),
    Lit {
        from: State,
        to: State,
        output: Letter,
    },
    Concat(Vec<RunTerm>),
    Omega {
        prefix: Vec<RunTerm>,
        cycle: Vec<RunTerm>,
        exit: State,
    },
    NegOmega {
        entry: State,
        cycle: Vec<RunTerm>,
        suffix: Vec<RunTerm>,
    },
}

impl RunTerm {
    /// State at the leftmost cut.
    pub fn entry(&self) -> State {
        match self {
            RunTerm::Empty(s) => *s,
            RunTerm::Lit { from, .. } => *from,
            RunTerm::Concat(items) => items[0].entry(),
            RunTerm::Omega { prefix, cycle, .. } => prefix.first().unwrap_or(&cycle[0]).entry(),
            RunTerm::NegOmega { entry, .. } => *entry,
        }
    }

    /// State at the rightmost cut.
    pub fn exit(&self) -> State {
        match self {
            RunTerm::Empty(s) => *s,
            RunTerm::Lit { to, .. } => *to,
            RunTerm::Concat(items) => items[items.len() - 1].exit(),
            RunTerm::Omega { exit, .. } => *exit,
            RunTerm::NegOmega { cycle, suffix, .. } => suffix.last().unwrap_or(&cycle[cycle.len() - 1]).exit(),
        }
    }

    /// Every state labelling some cut of the run.
    pub fn content(&self) -> StateSet {
        let mut states = Vec::new();
        self.collect_states(&mut states);
        states.into_iter().collect()
    }

    fn collect_states(&self, out: &mut Vec<State>) {
        match self {
            RunTerm::Empty(s) => out.push(*s),
            RunTerm::Lit { from, to, .. } => out.extend([*from, *to]),
            RunTerm::Concat(items) => items.iter().for_each(|r| r.collect_states(out)),
            RunTerm::Omega { prefix, cycle, exit } => {
                out.push(*exit);
                prefix.iter().chain(cycle).for_each(|r| r.collect_states(out));
            }
            RunTerm::NegOmega { entry, cycle, suffix } => {
                out.push(*entry);
                cycle.iter().chain(suffix).for_each(|r| r.collect_states(out));
            }
        }
    }

    pub fn map_states(&self, f: &impl Fn(State) -> State) -> RunTerm {
        let map = |v: &[RunTerm]| v.iter().map(|r| r.map_states(f)).collect();
        match self {
            RunTerm::Empty(s) => RunTerm::Empty(f(*s)),
            RunTerm::Lit { from, to, output } => RunTerm::Lit {
                from: f(*from),
                to: f(*to),
                output: *output,
            },
            RunTerm::Concat(items) => RunTerm::Concat(map(items)),
            RunTerm::Omega { prefix, cycle, exit } => RunTerm::Omega {
                prefix: map(prefix),
                cycle: map(cycle),
                exit: f(*exit),
            },
            RunTerm::NegOmega { entry, cycle, suffix } => RunTerm::NegOmega {
                entry: f(*entry),
                cycle: map(cycle),
                suffix: map(suffix),
            },
        }
    }

    /// Human-readable rendering with state names.
    pub fn render(&self, a: &Transducer) -> String {
        let name = |s: &State| a.state_name(*s);
        let list = |v: &[RunTerm]| v.iter().map(|r| r.render(a)).collect::<Vec<_>>().join(" . ");
        match self {
            RunTerm::Empty(s) => format!("[{}]", name(s)),
            RunTerm::Lit { from, to, output } => {
                format!("{} -{}-> {}", name(from), a.output().render_letter(*output), name(to))
            }
            RunTerm::Concat(items) => list(items),
            RunTerm::Omega { prefix, cycle, exit } => {
                let pre = if prefix.is_empty() { String::new() } else { format!("{} . ", list(prefix)) };
                format!("{pre}({})^w => {}", list(cycle), name(exit))
            }
            RunTerm::NegOmega { entry, cycle, suffix } => {
                let suf = if suffix.is_empty() { String::new() } else { format!(" . {}", list(suffix)) };
                format!("{} <= ({})^-w{suf}", name(entry), list(cycle))
            }
        }
    }
}

/// The output word of a run, laid out like the run.
pub fn output_term(r: &RunTerm) -> WordTerm {
    let map = |v: &[RunTerm]| v.iter().map(output_term).collect();
    match r {
        RunTerm::Empty(_) => WordTerm::Empty,
        RunTerm::Lit { output, .. } => WordTerm::Lit(*output),
        RunTerm::Concat(items) => WordTerm::Concat(map(items)),
        RunTerm::Omega { prefix, cycle, .. } => WordTerm::Omega {
            prefix: map(prefix),
            cycle: map(cycle),
        },
        RunTerm::NegOmega { cycle, suffix, .. } => WordTerm::NegOmega {
            cycle: map(cycle),
            suffix: map(suffix),
        },
    }
}

/// The same run read right to left, as a run of the reversed transducer on
/// the reversed term.
pub fn reverse_run(r: &RunTerm) -> RunTerm {
    let rev = |v: &[RunTerm]| v.iter().rev().map(reverse_run).collect();
    match r {
        RunTerm::Empty(s) => RunTerm::Empty(*s),
        RunTerm::Lit { from, to, output } => RunTerm::Lit {
            from: *to,
            to: *from,
            output: *output,
        },
        RunTerm::Concat(items) => RunTerm::Concat(rev(items)),
        RunTerm::Omega { prefix, cycle, exit } => RunTerm::NegOmega {
            entry: *exit,
            cycle: rev(cycle),
            suffix: rev(prefix),
        },
        RunTerm::NegOmega { entry, cycle, suffix } => RunTerm::Omega {
            prefix: rev(suffix),
            cycle: rev(cycle),
            exit: *entry,
        },
    }
}

/// Term factor covering copy `i` (counted from the left) of an ω-power.
fn omega_factor<'a>(prefix: &'a [WordTerm], cycle: &'a [WordTerm], i: usize) -> &'a WordTerm {
    if i < prefix.len() {
        &prefix[i]
    } else {
        &cycle[(i - prefix.len()) % cycle.len()]
    }
}

/// Term factor covering copy `i` counted from the right of a −ω-power.
fn neg_omega_factor<'a>(cycle: &'a [WordTerm], suffix: &'a [WordTerm], i: usize) -> &'a WordTerm {
    if i < suffix.len() {
        &suffix[suffix.len() - 1 - i]
    } else {
        &cycle[cycle.len() - 1 - (i - suffix.len()) % cycle.len()]
    }
}

fn omega_run(prefix: &[RunTerm], cycle: &[RunTerm], i: usize) -> RunTerm {
    if i < prefix.len() {
        prefix[i].clone()
    } else {
        cycle[(i - prefix.len()) % cycle.len()].clone()
    }
}

fn neg_omega_run(cycle: &[RunTerm], suffix: &[RunTerm], i: usize) -> RunTerm {
    if i < suffix.len() {
        suffix[suffix.len() - 1 - i].clone()
    } else {
        cycle[cycle.len() - 1 - (i - suffix.len()) % cycle.len()].clone()
    }
}

/// Checks every condition of an accepting run and returns its output.
pub fn validate_run_term(a: &Transducer, t: &WordTerm, r: &RunTerm) -> Result<WordTerm> {
    let mut states = Vec::new();
    r.collect_states(&mut states);
    if let Some(s) = states.iter().find(|&&s| s >= a.num_states()) {
        return Err(Error::invalid_run("root", format!("state index {s} out of range")));
    }
    let (entry, exit, _) = check(a, t, r, "root")?;
    if !a.is_initial(entry) {
        return Err(Error::invalid_run("root", format!("{} is not initial", a.state_name(entry))));
    }
    if !a.is_final(exit) {
        return Err(Error::invalid_run("root", format!("{} is not final", a.state_name(exit))));
    }
    Ok(output_term(r))
}

fn check_chain(a: &Transducer, runs: &[&RunTerm], path: &str) -> Result<()> {
    for (i, w) in runs.windows(2).enumerate() {
        if w[0].exit() != w[1].entry() {
            return Err(Error::invalid_run(
                format!("{path}[{}]", i + 1),
                format!(
                    "fragment starts in {} but the previous one ends in {}",
                    a.state_name(w[1].entry()),
                    a.state_name(w[0].exit())
                ),
            ));
        }
    }
    Ok(())
}

fn union_contents(runs: &[RunTerm]) -> StateSet {
    let mut states = Vec::new();
    for r in runs {
        r.collect_states(&mut states);
    }
    states.into_iter().collect()
}

fn render_set(a: &Transducer, set: &StateSet) -> String {
    let names: Vec<String> = set.iter().map(|s| a.state_name(s)).collect();
    format!("{{{}}}", names.join(","))
}

fn check(a: &Transducer, t: &WordTerm, r: &RunTerm, path: &str) -> Result<(State, State, StateSet)> {
    match (t, r) {
        (WordTerm::Empty, RunTerm::Empty(s)) => Ok((*s, *s, StateSet::singleton(*s))),
        (WordTerm::Concat(items), RunTerm::Empty(s)) if items.is_empty() => {
            Ok((*s, *s, StateSet::singleton(*s)))
        }
        (WordTerm::Lit(letter), RunTerm::Lit { from, to, output }) => {
            if a.has_transition(*from, *letter, *output, *to) {
                Ok((*from, *to, StateSet::from([*from, *to])))
            } else {
                Err(Error::invalid_run(
                    path,
                    format!(
                        "missing successor transition {} -{}|{}-> {}",
                        a.state_name(*from),
                        a.input().render_letter(*letter),
                        a.output().render_letter(*output),
                        a.state_name(*to)
                    ),
                ))
            }
        }
        (WordTerm::Concat(ts), RunTerm::Concat(rs)) => {
            if ts.len() != rs.len() || rs.is_empty() {
                return Err(Error::invalid_run(path, "run shape does not match term"));
            }
            let mut content = StateSet::new();
            for (i, (ti, ri)) in ts.iter().zip(rs).enumerate() {
                let (_, _, c) = check(a, ti, ri, &format!("{path}.{i}"))?;
                content = content.union(&c);
            }
            check_chain(a, &rs.iter().collect::<Vec<_>>(), path)?;
            Ok((rs[0].entry(), rs[rs.len() - 1].exit(), content))
        }
        (
            WordTerm::Omega { prefix: tp, cycle: tc },
            RunTerm::Omega { prefix: rp, cycle: rc, exit },
        ) => {
            if rc.is_empty() || rp.len() < tp.len() || rc.len() % tc.len() != 0 {
                return Err(Error::invalid_run(path, "ω-power run layout does not cover the term"));
            }
            let mut content = StateSet::singleton(*exit);
            for (i, ri) in rp.iter().enumerate() {
                let (_, _, c) = check(a, omega_factor(tp, tc, i), ri, &format!("{path}.prefix[{i}]"))?;
                content = content.union(&c);
            }
            for (j, rj) in rc.iter().enumerate() {
                let factor = omega_factor(tp, tc, rp.len() + j);
                let (_, _, c) = check(a, factor, rj, &format!("{path}.cycle[{j}]"))?;
                content = content.union(&c);
            }
            let chain: Vec<&RunTerm> = rp.iter().chain(rc).chain(std::iter::once(&rc[0])).collect();
            check_chain(a, &chain, &format!("{path}.copies"))?;
            let limit = union_contents(rc);
            if !a.left_limit(&limit, *exit) {
                return Err(Error::invalid_run(
                    path,
                    format!(
                        "missing left-limit {} -> {}",
                        render_set(a, &limit),
                        a.state_name(*exit)
                    ),
                ));
            }
            Ok((r.entry(), *exit, content))
        }
        (
            WordTerm::NegOmega { cycle: tc, suffix: ts },
            RunTerm::NegOmega { entry, cycle: rc, suffix: rs },
        ) => {
            if rc.is_empty() || rs.len() < ts.len() || rc.len() % tc.len() != 0 {
                return Err(Error::invalid_run(path, "−ω-power run layout does not cover the term"));
            }
            let (m, s) = (rc.len(), rs.len());
            let mut content = StateSet::singleton(*entry);
            for (j, rj) in rc.iter().enumerate() {
                let factor = neg_omega_factor(tc, ts, s + (m - 1 - j));
                let (_, _, c) = check(a, factor, rj, &format!("{path}.cycle[{j}]"))?;
                content = content.union(&c);
            }
            for (j, rj) in rs.iter().enumerate() {
                let factor = neg_omega_factor(tc, ts, s - 1 - j);
                let (_, _, c) = check(a, factor, rj, &format!("{path}.suffix[{j}]"))?;
                content = content.union(&c);
            }
            let chain: Vec<&RunTerm> = std::iter::once(&rc[m - 1]).chain(rc).chain(rs).collect();
            check_chain(a, &chain, &format!("{path}.copies"))?;
            let limit = union_contents(rc);
            if !a.right_limit(*entry, &limit) {
                return Err(Error::invalid_run(
                    path,
                    format!(
                        "missing right-limit {} -> {}",
                        a.state_name(*entry),
                        render_set(a, &limit)
                    ),
                ));
            }
            Ok((*entry, r.exit(), content))
        }
        (WordTerm::Shuffle(_), _) => Err(Error::Unsupported("runs over shuffle terms".into())),
        _ => Err(Error::invalid_run(path, "run shape does not match term")),
    }
}

/// Resource limits of [`find_run_term_with`].
#[derive(Clone, Debug)]
pub struct SearchLimits {
    /// Summaries and walk configurations explored before giving up.
    pub max_configs: usize,
    /// Largest transducer searched directly rather than component-wise.
    pub direct_state_cap: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_configs: 5_000_000,
            direct_state_cap: 4096,
        }
    }
}

/// Finds an accepting run on `t` and returns it with its output term.
pub fn find_run_term(a: &Transducer, t: &WordTerm) -> Result<(RunTerm, WordTerm)> {
    find_run_term_with(a, t, &SearchLimits::default())
}

pub fn find_run_term_with(a: &Transducer, t: &WordTerm, limits: &SearchLimits) -> Result<(RunTerm, WordTerm)> {
    t.check(a.input())?;
    if t.has_shuffle() {
        return Err(Error::Unsupported("run search over shuffle terms".into()));
    }
    let mut budget = Budget {
        used: 0,
        max: limits.max_configs,
    };
    let run = find_raw(a, t, limits, &mut budget)?;
    let output = validate_run_term(a, t, &run)?;
    Ok((run, output))
}

struct Budget {
    used: usize,
    max: usize,
}

impl Budget {
    fn charge(&mut self, n: usize) -> Result<()> {
        self.used += n;
        if self.used > self.max {
            Err(Error::Budget(self.used))
        } else {
            Ok(())
        }
    }
}

fn find_raw(a: &Transducer, t: &WordTerm, limits: &SearchLimits, budget: &mut Budget) -> Result<RunTerm> {
    if let Some((a1, a2)) = a.product_parts() {
        let r1 = find_raw(a1, t, limits, budget)?;
        let r2 = find_raw(a2, t, limits, budget)?;
        let width = a1.output().size();
        return merge(&r1, &r2, &|s1, s2| a.join_state(s1, s2), &|x, y| pair_letter(x, y, width));
    }
    if let Some((inner, outer)) = a.compose_parts() {
        let r1 = find_raw(inner, t, limits, budget)?;
        let o1 = output_term(&r1);
        match find_raw(outer, &o1, limits, budget) {
            Ok(r2) => return merge(&r1, &r2, &|s1, s2| a.join_state(s1, s2), &|_, c| c),
            // Another run of `inner` might feed `outer` successfully.
            Err(Error::NoRun) if a.num_states() <= limits.direct_state_cap => {}
            Err(Error::NoRun) => return Err(Error::Budget(budget.used)),
            Err(e) => return Err(e),
        }
    }
    if let Some(table) = a.table_arc() {
        return find_in_table(a, table, t, budget);
    }
    if a.num_states() > limits.direct_state_cap {
        return Err(Error::ResourceExceeded(format!(
            "direct run search over {} states",
            a.num_states()
        )));
    }
    let mut search = Search {
        fwd: a,
        bwd: None,
        budget,
        exits: HashMap::new(),
    };
    let summaries = search.summarize(false, t)?;
    summaries
        .into_iter()
        .find(|((p, _, q), _)| a.is_initial(*p) && a.is_final(*q))
        .map(|(_, w)| w)
        .ok_or(Error::NoRun)
}

/// Entries kept in each per-thread memo of table searches.
const TABLE_MEMO_CAP: usize = 1 << 16;

type TableMemo = FxHashMap<(usize, WordTerm), (Arc<Table>, Result<RunTerm>)>;

/// Run on `u v^ω` as the states at cuts `0, 1, ...` and the outputs at
/// positions `0, 1, ...`, both periodic from `prefix_len` on with period
/// `period`.
#[derive(Clone)]
struct UpRun {
    states: Vec<State>,
    outputs: Vec<Letter>,
    prefix_len: usize,
    exit: State,
}

impl UpRun {
    fn period(&self) -> usize {
        self.states.len() - self.prefix_len
    }

    fn at(&self, i: usize) -> (State, Letter) {
        let k = if i < self.prefix_len {
            i
        } else {
            self.prefix_len + (i - self.prefix_len) % self.period()
        };
        (self.states[k], self.outputs[k])
    }
}

type UpMemo = FxHashMap<(usize, Vec<Letter>, Vec<Letter>), (Arc<Table>, Result<UpRun>)>;

thread_local! {
    // Keyed by table address; the stored `Arc` keeps the address from being
    // reused by another table while the entry lives.
    static TABLE_RUNS: RefCell<TableMemo> = RefCell::new(FxHashMap::default());
    static TABLE_UP_RUNS: RefCell<UpMemo> = RefCell::new(FxHashMap::default());
}

fn find_in_table(a: &Transducer, table: &Arc<Table>, t: &WordTerm, budget: &mut Budget) -> Result<RunTerm> {
    if let Some((u, v)) = t.to_up() {
        let run = find_up_in_table(a, table, u, v, budget)?;
        let mut pos = 0;
        return Ok(reshape(t, &run, &mut pos));
    }
    let key = (Arc::as_ptr(table) as usize, t.clone());
    if let Some(hit) = TABLE_RUNS.with(|m| m.borrow().get(&key).map(|(_, r)| r.clone())) {
        return hit;
    }
    let result = search_direct(a, t, budget);
    if matches!(result, Ok(_) | Err(Error::NoRun)) {
        TABLE_RUNS.with(|m| {
            let mut m = m.borrow_mut();
            if m.len() >= TABLE_MEMO_CAP {
                m.clear();
            }
            m.insert(key, (table.clone(), result.clone()));
        });
    }
    result
}

/// Shortest presentation of `u v^ω`.
fn normalize_up(mut u: Vec<Letter>, mut v: Vec<Letter>) -> (Vec<Letter>, Vec<Letter>) {
    let n = v.len();
    if let Some(d) = (1..n).find(|&d| n % d == 0 && (d..n).all(|i| v[i] == v[i - d])) {
        v.truncate(d);
    }
    while u.last().is_some() && u.last() == v.last() {
        u.pop();
        v.rotate_right(1);
    }
    (u, v)
}

fn find_up_in_table(
    a: &Transducer,
    table: &Arc<Table>,
    u: Vec<Letter>,
    v: Vec<Letter>,
    budget: &mut Budget,
) -> Result<UpRun> {
    let (u, v) = normalize_up(u, v);
    let key = (Arc::as_ptr(table) as usize, u, v);
    if let Some(hit) = TABLE_UP_RUNS.with(|m| m.borrow().get(&key).map(|(_, r)| r.clone())) {
        return hit;
    }
    let mut items: Vec<WordTerm> = key.1.iter().map(|&l| WordTerm::Lit(l)).collect();
    items.push(WordTerm::omega(WordTerm::from_finite(&key.2)));
    let result = search_direct(a, &WordTerm::concat(items), budget).and_then(|r| flatten_up(&r));
    if matches!(result, Ok(_) | Err(Error::NoRun)) {
        TABLE_UP_RUNS.with(|m| {
            let mut m = m.borrow_mut();
            if m.len() >= TABLE_MEMO_CAP {
                m.clear();
            }
            m.insert(key, (table.clone(), result.clone()));
        });
    }
    result
}

fn push_lits(r: &RunTerm, out: &mut Vec<(State, Letter)>) {
    match r {
        RunTerm::Empty(_) => {}
        RunTerm::Lit { from, output, .. } => out.push((*from, *output)),
        RunTerm::Concat(items) => items.iter().for_each(|x| push_lits(x, out)),
        RunTerm::Omega { .. } | RunTerm::NegOmega { .. } => unreachable!("finite fragment expected"),
    }
}

fn flatten_up(r: &RunTerm) -> Result<UpRun> {
    let items: Vec<&RunTerm> = match r {
        RunTerm::Concat(items) => items.iter().collect(),
        other => vec![other],
    };
    let shape = || Error::Shape("run on an ultimately periodic word has an unexpected layout".into());
    let (last, init) = items.split_last().ok_or_else(shape)?;
    let RunTerm::Omega { prefix, cycle, exit } = last else {
        return Err(shape());
    };
    let mut head = Vec::new();
    for x in init.iter().copied().chain(prefix) {
        push_lits(x, &mut head);
    }
    let prefix_len = head.len();
    for x in cycle {
        push_lits(x, &mut head);
    }
    Ok(UpRun {
        states: head.iter().map(|x| x.0).collect(),
        outputs: head.iter().map(|x| x.1).collect(),
        prefix_len,
        exit: *exit,
    })
}

/// Lays `run` out along the presentation `t`, starting at position `pos`.
fn reshape(t: &WordTerm, run: &UpRun, pos: &mut usize) -> RunTerm {
    match t {
        WordTerm::Empty => RunTerm::Empty(run.at(*pos).0),
        WordTerm::Lit(_) => {
            let (from, output) = run.at(*pos);
            *pos += 1;
            RunTerm::Lit { from, to: run.at(*pos).0, output }
        }
        WordTerm::Concat(items) if items.is_empty() => RunTerm::Empty(run.at(*pos).0),
        WordTerm::Concat(items) => RunTerm::Concat(items.iter().map(|x| reshape(x, run, pos)).collect()),
        WordTerm::Omega { prefix, cycle } => {
            let mut rp: Vec<RunTerm> = prefix.iter().map(|x| reshape(x, run, pos)).collect();
            let span: usize = cycle.iter().map(|x| x.letters().len()).sum();
            while *pos < run.prefix_len {
                rp.extend(cycle.iter().map(|x| reshape(x, run, pos)));
            }
            let copies = run.period() / gcd(run.period(), span);
            let mut rc = Vec::with_capacity(copies * cycle.len());
            for _ in 0..copies {
                rc.extend(cycle.iter().map(|x| reshape(x, run, pos)));
            }
            RunTerm::Omega { prefix: rp, cycle: rc, exit: run.exit }
        }
        WordTerm::NegOmega { .. } | WordTerm::Shuffle(_) => unreachable!("ultimately periodic term expected"),
    }
}

fn search_direct(a: &Transducer, t: &WordTerm, budget: &mut Budget) -> Result<RunTerm> {
    let mut search = Search {
        fwd: a,
        bwd: None,
        budget,
        exits: HashMap::new(),
    };
    let summaries = search.summarize(false, t)?;
    summaries
        .into_iter()
        .find(|((p, _, q), _)| a.is_initial(*p) && a.is_final(*q))
        .map(|(_, w)| w)
        .ok_or(Error::NoRun)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Pairs two runs over the same term, unrolling power nodes to a common
/// layout.
fn merge(
    r1: &RunTerm,
    r2: &RunTerm,
    join: &dyn Fn(State, State) -> State,
    out: &dyn Fn(Letter, Letter) -> Letter,
) -> Result<RunTerm> {
    match (r1, r2) {
        (RunTerm::Empty(a), RunTerm::Empty(b)) => Ok(RunTerm::Empty(join(*a, *b))),
        (
            RunTerm::Lit { from: f1, to: t1, output: o1 },
            RunTerm::Lit { from: f2, to: t2, output: o2 },
        ) => Ok(RunTerm::Lit {
            from: join(*f1, *f2),
            to: join(*t1, *t2),
            output: out(*o1, *o2),
        }),
        (RunTerm::Concat(x), RunTerm::Concat(y)) if x.len() == y.len() => Ok(RunTerm::Concat(
            x.iter().zip(y).map(|(a, b)| merge(a, b, join, out)).collect::<Result<_>>()?,
        )),
        (
            RunTerm::Omega { prefix: p1, cycle: c1, exit: e1 },
            RunTerm::Omega { prefix: p2, cycle: c2, exit: e2 },
        ) => {
            let k = p1.len().max(p2.len());
            let m = lcm(c1.len(), c2.len());
            let pair = |i: usize| merge(&omega_run(p1, c1, i), &omega_run(p2, c2, i), join, out);
            Ok(RunTerm::Omega {
                prefix: (0..k).map(pair).collect::<Result<_>>()?,
                cycle: (k..k + m).map(pair).collect::<Result<_>>()?,
                exit: join(*e1, *e2),
            })
        }
        (
            RunTerm::NegOmega { entry: e1, cycle: c1, suffix: s1 },
            RunTerm::NegOmega { entry: e2, cycle: c2, suffix: s2 },
        ) => {
            let s = s1.len().max(s2.len());
            let m = lcm(c1.len(), c2.len());
            let pair = |i: usize| merge(&neg_omega_run(c1, s1, i), &neg_omega_run(c2, s2, i), join, out);
            Ok(RunTerm::NegOmega {
                entry: join(*e1, *e2),
                cycle: (0..m).map(|j| pair(s + m - 1 - j)).collect::<Result<_>>()?,
                suffix: (0..s).map(|j| pair(s - 1 - j)).collect::<Result<_>>()?,
            })
        }
        _ => Err(Error::Shape("component runs have different shapes".into())),
    }
}

type Key = (State, StateSet, State);

struct Search<'a> {
    fwd: &'a Transducer,
    bwd: Option<Transducer>,
    budget: &'a mut Budget,
    exits: HashMap<(bool, StateSet), Vec<State>>,
}

impl Search<'_> {
    fn automaton(&mut self, rev: bool) -> &Transducer {
        if rev {
            let fwd = self.fwd;
            self.bwd.get_or_insert_with(|| fwd.reverse())
        } else {
            self.fwd
        }
    }

    /// States `q` with a left limit `limit -> q`.
    fn exits(&mut self, rev: bool, limit: &StateSet) -> Vec<State> {
        if let Some(v) = self.exits.get(&(rev, limit.clone())) {
            return v.clone();
        }
        let a = self.automaton(rev);
        let v: Vec<State> = (0..a.num_states()).filter(|&q| a.left_limit(limit, q)).collect();
        self.exits.insert((rev, limit.clone()), v.clone());
        v
    }

    fn summarize(&mut self, rev: bool, t: &WordTerm) -> Result<BTreeMap<Key, RunTerm>> {
        let n = self.automaton(rev).num_states();
        let mut out = BTreeMap::new();
        match t {
            WordTerm::Empty => {
                for p in 0..n {
                    out.insert((p, StateSet::singleton(p), p), RunTerm::Empty(p));
                }
            }
            WordTerm::Concat(items) if items.is_empty() => return self.summarize(rev, &WordTerm::Empty),
            WordTerm::Lit(letter) => {
                let a = self.automaton(rev);
                for p in 0..n {
                    for (b, q) in a.successors(p, *letter) {
                        out.entry((p, StateSet::from([p, q]), q)).or_insert(RunTerm::Lit {
                            from: p,
                            to: q,
                            output: b,
                        });
                    }
                }
            }
            WordTerm::Concat(items) => {
                for (k, w) in self.sequence(rev, items)? {
                    out.insert(k, RunTerm::Concat(w));
                }
            }
            WordTerm::Omega { prefix, cycle } => return self.omega(rev, prefix, cycle),
            WordTerm::NegOmega { .. } => {
                for ((p, c, q), w) in self.summarize(!rev, &reverse_term(t))? {
                    out.insert((q, c, p), reverse_run(&w));
                }
            }
            WordTerm::Shuffle(_) => return Err(Error::Unsupported("run search over shuffle terms".into())),
        }
        self.budget.charge(out.len())?;
        Ok(out)
    }

    /// Summaries of the concatenation of `items`, keeping one witness per
    /// factor. The empty sequence yields `(p, {p}, p)` with no witnesses.
    fn sequence(&mut self, rev: bool, items: &[WordTerm]) -> Result<BTreeMap<Key, Vec<RunTerm>>> {
        let n = self.automaton(rev).num_states();
        let mut cur: BTreeMap<Key, Vec<RunTerm>> =
            (0..n).map(|p| ((p, StateSet::singleton(p), p), Vec::new())).collect();
        for item in items {
            let step = self.summarize(rev, item)?;
            let mut by_source: HashMap<State, Vec<(&StateSet, State, &RunTerm)>> = HashMap::new();
            for ((p, c, q), w) in &step {
                by_source.entry(*p).or_default().push((c, *q, w));
            }
            let mut next = BTreeMap::new();
            for ((p, c, q), w) in &cur {
                for &(c2, r, w2) in by_source.get(q).map(Vec::as_slice).unwrap_or(&[]) {
                    next.entry((*p, c.union(c2), r)).or_insert_with(|| {
                        let mut v = w.clone();
                        v.push(w2.clone());
                        v
                    });
                }
            }
            self.budget.charge(next.len())?;
            cur = next;
        }
        Ok(cur)
    }

    fn omega(&mut self, rev: bool, prefix: &[WordTerm], cycle: &[WordTerm]) -> Result<BTreeMap<Key, RunTerm>> {
        let pre = self.sequence(rev, prefix)?;
        let passes: Vec<(Key, Vec<RunTerm>)> = self.sequence(rev, cycle)?.into_iter().collect();
        let n = self.automaton(rev).num_states();
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, ((p, _, _), _)) in passes.iter().enumerate() {
            edges[*p].push(i);
        }

        // Closed walks through each node: the union of their contents and
        // the passes taken.
        let mut loops: HashMap<State, Vec<(StateSet, Vec<usize>)>> = HashMap::new();
        let mut out = BTreeMap::new();
        let mut by_entry: BTreeMap<State, Vec<(&StateSet, State, &Vec<RunTerm>)>> = BTreeMap::new();
        for ((p, c, v), w) in &pre {
            by_entry.entry(*p).or_default().push((c, *v, w));
        }
        for (p, starts) in by_entry {
            // Walk closure from the end of the prefix: configurations are
            // (node, accumulated content) with a back pointer.
            let mut index: HashMap<(State, StateSet), usize> = HashMap::new();
            let mut configs: Vec<(State, StateSet, Origin)> = Vec::new();
            let mut queue = VecDeque::new();
            for (si, (c, v, _)) in starts.iter().enumerate() {
                let key = (*v, (*c).clone());
                if !index.contains_key(&key) {
                    index.insert(key.clone(), configs.len());
                    queue.push_back(configs.len());
                    configs.push((key.0, key.1, Origin::Start(si)));
                }
            }
            while let Some(ci) = queue.pop_front() {
                self.budget.charge(1)?;
                let (v, acc) = (configs[ci].0, configs[ci].1.clone());
                for &e in &edges[v] {
                    let ((_, c, q), _) = &passes[e];
                    let key = (*q, acc.union(c));
                    if !index.contains_key(&key) {
                        index.insert(key.clone(), configs.len());
                        queue.push_back(configs.len());
                        configs.push((key.0, key.1, Origin::Step(ci, e)));
                    }
                }
            }
            for ci in 0..configs.len() {
                let v = configs[ci].0;
                if !loops.contains_key(&v) {
                    let found = self.closed_walks(v, &edges, &passes)?;
                    loops.insert(v, found);
                }
                for (limit, walk) in &loops[&v] {
                    for q in self.exits(rev, limit) {
                        let mut content = configs[ci].1.union(limit);
                        content.insert(q);
                        out.entry((p, content, q)).or_insert_with(|| {
                            let (start, steps) = unwind(&configs, ci);
                            let mut runs = starts[start].2.clone();
                            for e in steps {
                                runs.extend(passes[e].1.iter().cloned());
                            }
                            let cycle_runs = walk.iter().flat_map(|&e| passes[e].1.iter().cloned()).collect();
                            RunTerm::Omega {
                                prefix: runs,
                                cycle: cycle_runs,
                                exit: q,
                            }
                        });
                    }
                }
            }
        }
        self.budget.charge(out.len())?;
        Ok(out)
    }

    /// Every content union achievable by a nonempty closed walk from `v`,
    /// each with one walk realizing it.
    fn closed_walks(
        &mut self,
        v: State,
        edges: &[Vec<usize>],
        passes: &[(Key, Vec<RunTerm>)],
    ) -> Result<Vec<(StateSet, Vec<usize>)>> {
        let mut index: HashMap<(State, StateSet), usize> = HashMap::new();
        let mut configs: Vec<(State, StateSet, Origin)> = vec![(v, StateSet::new(), Origin::Start(0))];
        let mut queue = VecDeque::from([0usize]);
        let mut found: BTreeMap<StateSet, Vec<usize>> = BTreeMap::new();
        while let Some(ci) = queue.pop_front() {
            self.budget.charge(1)?;
            let (u, acc) = (configs[ci].0, configs[ci].1.clone());
            for &e in &edges[u] {
                let ((_, c, q), _) = &passes[e];
                let union = acc.union(c);
                if *q == v && !found.contains_key(&union) {
                    let (_, mut steps) = unwind(&configs, ci);
                    steps.push(e);
                    found.insert(union.clone(), steps);
                }
                let key = (*q, union);
                if !index.contains_key(&key) {
                    index.insert(key.clone(), configs.len());
                    queue.push_back(configs.len());
                    configs.push((key.0, key.1, Origin::Step(ci, e)));
                }
            }
        }
        Ok(found.into_iter().collect())
    }
}

#[derive(Clone, Copy)]
enum Origin {
    Start(usize),
    Step(usize, usize),
}

/// Start index and the passes taken to reach configuration `ci`.
fn unwind(configs: &[(State, StateSet, Origin)], mut ci: usize) -> (usize, Vec<usize>) {
    let mut steps = Vec::new();
    loop {
        match configs[ci].2 {
            Origin::Start(s) => {
                steps.reverse();
                return (s, steps);
            }
            Origin::Step(prev, e) => {
                steps.push(e);
                ci = prev;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{SetPred, Table};
    use crate::words::{parse_term, Alphabet};

    fn omega_acceptor() -> Transducer {
        let al = Alphabet::Symbols(vec!["a".into()]);
        let mut t = Table::new(&["p", "f"], 1);
        t.set_initial(0);
        t.set_final(1);
        t.add_succ(0, Letter(0), Letter(0), 0);
        t.add_left(SetPred::Exactly(StateSet::singleton(0)), StateSet::singleton(1));
        Transducer::from_table(al.clone(), al, t).unwrap()
    }

    #[test]
    fn omega_run_on_two_state_acceptor() {
        let a = omega_acceptor();
        let t = parse_term("a^w", a.input()).unwrap();
        let (run, out) = find_run_term(&a, &t).unwrap();
        assert_eq!(
            run,
            RunTerm::Omega {
                prefix: vec![],
                cycle: vec![RunTerm::Lit { from: 0, to: 0, output: Letter(0) }],
                exit: 1
            }
        );
        assert_eq!(out.simplify().render(a.output()), "a^w");
    }

    #[test]
    fn no_run_is_proven() {
        let a = omega_acceptor();
        let t = parse_term("a", a.input()).unwrap();
        assert_eq!(find_run_term(&a, &t), Err(Error::NoRun));
        let u = parse_term("a^-w", a.input()).unwrap();
        assert_eq!(find_run_term(&a, &u), Err(Error::NoRun));
    }

    #[test]
    fn missing_left_limit_is_reported() {
        let a = omega_acceptor();
        let t = parse_term("a^w", a.input()).unwrap();
        let bad = RunTerm::Omega {
            prefix: vec![],
            cycle: vec![RunTerm::Lit { from: 0, to: 0, output: Letter(0) }],
            exit: 0,
        };
        let err = validate_run_term(&a, &t, &bad).unwrap_err();
        assert!(err.to_string().contains("missing left-limit"), "{err}");
    }

    #[test]
    fn reverse_run_is_an_involution() {
        let r = RunTerm::Concat(vec![
            RunTerm::Lit { from: 0, to: 1, output: Letter(1) },
            RunTerm::Omega {
                prefix: vec![RunTerm::Empty(1)],
                cycle: vec![RunTerm::Lit { from: 1, to: 1, output: Letter(0) }],
                exit: 2,
            },
        ]);
        assert_eq!(reverse_run(&reverse_run(&r)), r);
    }
}
