//! Runs on finite words.

use super::{State, Transducer};
use crate::error::{Error, Result};
use crate::words::{pair_letter, Letter};

/// States labelling the `n + 1` cuts of a length-`n` word.
pub type FiniteRun = Vec<State>;

/// Checks `run` against `word` and returns the emitted output.
pub fn validate_finite_run(a: &Transducer, word: &[Letter], run: &[State]) -> Result<Vec<Letter>> {
    if run.len() != word.len() + 1 {
        return Err(Error::invalid_run(
            "run",
            format!("{} states for a word of length {}", run.len(), word.len()),
        ));
    }
    if run.iter().any(|&s| s >= a.num_states()) {
        return Err(Error::invalid_run("run", "state index out of range"));
    }
    if !a.is_initial(run[0]) {
        return Err(Error::invalid_run(
            "cut 0",
            format!("{} is not initial", a.state_name(run[0])),
        ));
    }
    let mut output = Vec::with_capacity(word.len());
    for (i, &letter) in word.iter().enumerate() {
        let (p, q) = (run[i], run[i + 1]);
        let Some(&(b, _)) = a.successors(p, letter).iter().find(|(_, t)| *t == q) else {
            return Err(Error::invalid_run(
                format!("position {i}"),
                format!(
                    "no transition {} -{}-> {}",
                    a.state_name(p),
                    a.input().render_letter(letter),
                    a.state_name(q)
                ),
            ));
        };
        output.push(b);
    }
    let last = run[word.len()];
    if !a.is_final(last) {
        return Err(Error::invalid_run(
            format!("cut {}", word.len()),
            format!("{} is not final", a.state_name(last)),
        ));
    }
    Ok(output)
}

/// All accepting runs with their outputs, ordered by the sequence of state
/// names. Composites are enumerated component-wise.
pub fn enumerate_accepting_runs_finite(a: &Transducer, word: &[Letter]) -> Vec<(FiniteRun, Vec<Letter>)> {
    let mut runs = accepting_runs(a, word);
    sort_runs(a, &mut runs);
    runs
}

/// Same result as [`enumerate_accepting_runs_finite`], by depth-first search
/// through the generic successor interface. Only suitable for small
/// composites; used to cross-check the component-wise enumeration.
pub fn enumerate_runs_direct(a: &Transducer, word: &[Letter]) -> Vec<(FiniteRun, Vec<Letter>)> {
    let mut runs = Vec::new();
    for s in a.initial_states() {
        dfs(a, word, vec![s], Vec::new(), &mut runs);
    }
    sort_runs(a, &mut runs);
    runs
}

fn sort_runs(a: &Transducer, runs: &mut [(FiniteRun, Vec<Letter>)]) {
    runs.sort_by_cached_key(|(r, out)| {
        (
            r.iter().map(|&s| a.state_name(s)).collect::<Vec<_>>(),
            out.clone(),
        )
    });
}

fn accepting_runs(a: &Transducer, word: &[Letter]) -> Vec<(FiniteRun, Vec<Letter>)> {
    if let Some((a1, a2)) = a.product_parts() {
        let right = accepting_runs(a2, word);
        let width = a1.output().size();
        let mut out = Vec::new();
        for (r1, o1) in accepting_runs(a1, word) {
            for (r2, o2) in &right {
                out.push((
                    join_runs(a, &r1, r2),
                    o1.iter().zip(o2).map(|(&x, &y)| pair_letter(x, y, width)).collect(),
                ));
            }
        }
        return out;
    }
    if let Some((inner, outer)) = a.compose_parts() {
        let mut out = Vec::new();
        for (r1, o1) in accepting_runs(inner, word) {
            for (r2, o2) in accepting_runs(outer, &o1) {
                out.push((join_runs(a, &r1, &r2), o2));
            }
        }
        return out;
    }
    let mut runs = Vec::new();
    for s in a.initial_states() {
        dfs(a, word, vec![s], Vec::new(), &mut runs);
    }
    runs
}

fn join_runs(a: &Transducer, r1: &[State], r2: &[State]) -> FiniteRun {
    r1.iter().zip(r2).map(|(&s1, &s2)| a.join_state(s1, s2)).collect()
}

fn dfs(
    a: &Transducer,
    word: &[Letter],
    run: Vec<State>,
    output: Vec<Letter>,
    acc: &mut Vec<(FiniteRun, Vec<Letter>)>,
) {
    let i = run.len() - 1;
    let p = run[i];
    if i == word.len() {
        if a.is_final(p) {
            acc.push((run, output));
        }
        return;
    }
    for (b, q) in a.successors(p, word[i]) {
        let mut r = run.clone();
        r.push(q);
        let mut o = output.clone();
        o.push(b);
        dfs(a, word, r, o, acc);
    }
}
