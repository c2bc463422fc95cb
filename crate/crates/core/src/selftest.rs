//! Differential testing of the compiled transducers against the direct
//! semantics.
//!
//! Formulas are enumerated by depth (every constructor counts one level,
//! atoms and constants have depth 0) and indexed, so a seeded sample is
//! reproducible from the seed alone.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::automaton::{enumerate_accepting_runs_finite, find_run_term};
use crate::construction::compile;
use crate::error::Result;
use crate::formula::{Formula, Temporal};
use crate::oracle::{eval_finite, eval_up, UpWord};
use crate::words::{Alphabet, FiniteWord, Letter};

/// Default seed for [`sample_formulas`].
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

const BINARY: usize = 1 + Temporal::ALL.len();

fn base_count(ap: &[String]) -> u128 {
    ap.len() as u128 + 2
}

/// Number of formulas of depth at most `depth` over `ap`.
pub fn count_formulas(depth: usize, ap: &[String]) -> u128 {
    let c0 = base_count(ap);
    let mut c = c0;
    for _ in 0..depth {
        c = c0 + c + BINARY as u128 * c * c;
    }
    c
}

/// The formula with the given index among those of depth at most `depth`.
/// Order: atoms, `true`, `false`, negations, then `|` and the temporal
/// operators, each over all ordered pairs.
pub fn unrank_formula(depth: usize, ap: &[String], index: u128) -> Formula {
    let c0 = base_count(ap);
    if index < c0 {
        return match index as usize {
            i if i < ap.len() => Formula::Atom(ap[i].clone()),
            i if i == ap.len() => Formula::True,
            _ => Formula::False,
        };
    }
    assert!(depth > 0, "formula index out of range");
    let sub = count_formulas(depth - 1, ap);
    let mut i = index - c0;
    if i < sub {
        return Formula::not(unrank_formula(depth - 1, ap, i));
    }
    i -= sub;
    let op = (i / (sub * sub)) as usize;
    let rest = i % (sub * sub);
    let l = unrank_formula(depth - 1, ap, rest / sub);
    let r = unrank_formula(depth - 1, ap, rest % sub);
    match op {
        0 => Formula::or(l, r),
        k => Temporal::ALL[k - 1].apply(l, r),
    }
}

/// All formulas of depth at most `depth`, in index order.
pub fn all_formulas(depth: usize, ap: &[String]) -> Vec<Formula> {
    (0..count_formulas(depth, ap)).map(|i| unrank_formula(depth, ap, i)).collect()
}

/// `n` distinct formulas drawn uniformly among those of depth at most
/// `depth` (all of them if there are fewer than `n`).
pub fn sample_formulas(depth: usize, ap: &[String], n: usize, seed: u64) -> Vec<Formula> {
    let total = count_formulas(depth, ap);
    if total <= n as u128 {
        return all_formulas(depth, ap);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let i = rng.gen_range(0..total);
        if seen.insert(i) {
            out.push(unrank_formula(depth, ap, i));
        }
    }
    out
}

/// Every word over `alphabet` of length at most `max_len`, shortest first.
pub fn finite_words(alphabet: &Alphabet, max_len: usize) -> Vec<FiniteWord> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<FiniteWord> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.letters().map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Ultimately periodic words `u v^ω` with `|u| <= max_prefix` and
/// `1 <= |v| <= max_cycle`.
pub fn up_words(alphabet: &Alphabet, max_prefix: usize, max_cycle: usize) -> Vec<UpWord<Letter>> {
    let prefixes = finite_words(alphabet, max_prefix);
    let cycles: Vec<FiniteWord> = finite_words(alphabet, max_cycle).into_iter().filter(|v| !v.is_empty()).collect();
    let mut out = Vec::new();
    for u in &prefixes {
        for v in &cycles {
            out.push(UpWord::new(u.clone(), v.clone()));
        }
    }
    out
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn bit_letters(v: &[Letter]) -> String {
    v.iter().map(|l| char::from_digit(l.0, 10).unwrap_or('?')).collect()
}

/// Checks the compiled transducer for `f` on a finite word: exactly one
/// accepting run whose output is the truth word. Returns the expected and
/// observed outputs on mismatch.
pub fn check_finite(f: &Formula, ap: &[String], a: &crate::Transducer, w: &[Letter]) -> Result<Option<(String, String)>> {
    let expected = eval_finite(f, ap, w)?;
    let runs = enumerate_accepting_runs_finite(a, w);
    let got = match runs.as_slice() {
        [(_, out)] => bit_letters(out),
        [] => "no-run".to_string(),
        many => format!("{}-runs", many.len()),
    };
    let want = bits(&expected);
    Ok((got != want).then_some((want, got)))
}

/// Outcome of a differential run.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
    pub lines: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} checks, {} failures: {}",
            self.checked,
            self.failures.len(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }

    fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self.lines.extend(other.lines);
    }

    pub fn render(&self, verbose: bool) -> String {
        let mut out = String::new();
        let lines = if verbose { &self.lines } else { &self.failures };
        for l in lines {
            writeln!(out, "{l}").unwrap();
        }
        writeln!(out, "{}", self.summary()).unwrap();
        out
    }
}

/// Smallest failing (subformula, shorter word) pair reachable from a
/// failing pair by dropping subterms or letters.
fn shrink(f: &Formula, ap: &[String], w: &[Letter]) -> (Formula, FiniteWord) {
    let fails = |g: &Formula, v: &[Letter]| {
        compile(g, ap)
            .and_then(|a| check_finite(g, ap, &a, v))
            .map(|r| r.is_some())
            .unwrap_or(false)
    };
    let (mut f, mut w) = (f.clone(), w.to_vec());
    loop {
        let smaller = f.children().into_iter().find(|g| fails(g, &w)).cloned();
        if let Some(g) = smaller {
            f = g;
            continue;
        }
        let shorter = (0..w.len()).map(|i| {
            let mut v = w.clone();
            v.remove(i);
            v
        });
        let mut changed = false;
        for v in shorter {
            if fails(&f, &v) {
                w = v;
                changed = true;
                break;
            }
        }
        if !changed {
            return (f, w);
        }
    }
}

/// Runs `check` on every formula in parallel and concatenates the reports
/// in input order.
fn per_formula(formulas: &[Formula], check: impl Fn(&Formula) -> Result<Report> + Send + Sync) -> Result<Report> {
    let parts: Vec<Report> = formulas.par_iter().map(&check).collect::<Result<_>>()?;
    let mut report = Report::default();
    parts.into_iter().for_each(|r| report.absorb(r));
    Ok(report)
}

/// Compares every formula in `formulas` with every word of length at most
/// `max_len` over `2^ap`. Passing cases are listed only with `keep_ok`.
pub fn run_finite(formulas: &[Formula], ap: &[String], max_len: usize, keep_ok: bool) -> Result<Report> {
    let alphabet = Alphabet::Props(ap.to_vec());
    let words = finite_words(&alphabet, max_len);
    per_formula(formulas, |f| {
        let mut report = Report::default();
        let a = compile(f, ap)?;
        for w in &words {
            report.checked += 1;
            let shown = || alphabet.render_word(w);
            match check_finite(f, ap, &a, w)? {
                None if keep_ok => {
                    let want = bits(&eval_finite(f, ap, w)?);
                    report.lines.push(format!("OK {f} [{}] {want} {want}", shown()));
                }
                None => {}
                Some((want, got)) => {
                    let (g, v) = shrink(f, ap, w);
                    let line = format!(
                        "FAIL {f} [{}] {want} {got} (shrunk: {g} [{}])",
                        shown(),
                        alphabet.render_word(&v)
                    );
                    report.lines.push(line.clone());
                    report.failures.push(line);
                }
            }
        }
        Ok(report)
    })
}

/// Compares the run found on `u v^ω` with the direct semantics. Subformulas
/// with a Stavi connective are expected to be constantly false.
pub fn check_up(f: &Formula, ap: &[String], a: &crate::Transducer, w: &UpWord<Letter>) -> Result<Option<(String, String)>> {
    let expected = eval_up(f, ap, w)?;
    let show = |x: &UpWord<bool>| format!("{}({})^w", bits(&x.prefix), bits(&x.cycle));
    let got = match find_run_term(a, &w.to_term()) {
        Ok((_, out)) => match UpWord::from_term(&out.simplify()) {
            Some(x) => x.map(|l| l.0 == 1).normalize(),
            None => return Ok(Some((show(&expected), format!("non-periodic output {}", out.render(a.output()))))),
        },
        Err(e) => return Ok(Some((show(&expected), format!("error: {e}")))),
    };
    Ok((got != expected).then(|| (show(&expected), show(&got))))
}

/// Compares every formula with every ultimately periodic word `u v^ω`,
/// `|u| <= max_prefix`, `1 <= |v| <= max_cycle`. Passing cases are listed
/// only with `keep_ok`.
pub fn run_up(
    formulas: &[Formula],
    ap: &[String],
    max_prefix: usize,
    max_cycle: usize,
    keep_ok: bool,
) -> Result<Report> {
    let alphabet = Alphabet::Props(ap.to_vec());
    let words = up_words(&alphabet, max_prefix, max_cycle);
    per_formula(formulas, |f| {
        let mut report = Report::default();
        let a = compile(f, ap)?;
        for w in &words {
            report.checked += 1;
            let shown = || w.to_term().render(&alphabet);
            match check_up(f, ap, &a, w)? {
                None if keep_ok => report.lines.push(format!("OK {f} [{}]", shown())),
                None => {}
                Some((want, got)) => {
                    let line = format!("FAIL {f} [{}] {want} {got}", shown());
                    report.lines.push(line.clone());
                    report.failures.push(line);
                }
            }
        }
        Ok(report)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts() {
        assert_eq!(count_formulas(0, &ap(&["a", "b"])), 4);
        assert_eq!(count_formulas(1, &ap(&["a", "b"])), 88);
        assert_eq!(count_formulas(2, &ap(&["a"])), 13059);
    }

    #[test]
    fn unranking_is_injective_and_depth_bounded() {
        let p = ap(&["a"]);
        let all = all_formulas(1, &p);
        let distinct: BTreeSet<String> = all.iter().map(|f| f.to_sexpr()).collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all.iter().all(|f| f.depth() <= 1));
    }

    #[test]
    fn sample_is_reproducible() {
        let p = ap(&["a", "b"]);
        let x = sample_formulas(3, &p, 20, 7);
        assert_eq!(x, sample_formulas(3, &p, 20, 7));
        assert_eq!(x.iter().map(|f| f.to_sexpr()).collect::<BTreeSet<_>>().len(), 20);
    }

    #[test]
    fn word_counts() {
        let al = Alphabet::Props(ap(&["a", "b"]));
        assert_eq!(finite_words(&al, 4).len(), 341);
        assert_eq!(up_words(&Alphabet::Props(ap(&["a"])), 3, 3).len(), 15 * 14);
    }

    #[test]
    fn small_run_passes() {
        let p = ap(&["a"]);
        let report = run_finite(&all_formulas(1, &p), &p, 3, false).unwrap();
        assert!(report.passed(), "{}", report.render(false));
    }
}
