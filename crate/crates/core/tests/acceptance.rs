//! Acceptance checks, one line per criterion.
//!
//! Runs with its own harness (`cargo test --test acceptance`) so that every
//! criterion reports PASS or FAIL even when an earlier one fails.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lotl_core::automaton::format::{parse_automaton, write_automaton, DEFAULT_EXPAND_CAP};
use lotl_core::automaton::{enumerate_accepting_runs_finite, find_run_term};
use lotl_core::construction::{
    atom_automaton, compile, const_automaton, not_automaton, or_automaton, since_automaton,
    stavi_since_automaton, stavi_until_automaton, until_automaton,
};
use lotl_core::formula::{parse, Formula};
use lotl_core::oracle::UpWord;
use lotl_core::reach::{
    accepts_nonempty_word, find_live_transition, satisfiable, satisfiable_within, saturate, RuleSet, Verdict,
    DEFAULT_MAX_ITEMS,
};
use lotl_core::selftest::{all_formulas, finite_words, run_finite, run_up, sample_formulas, up_words, DEFAULT_SEED};
use lotl_core::words::parse_term;
use lotl_core::{Alphabet, Letter, Transducer};

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> Result<Transducer, String> {
    let text = fs::read_to_string(fixture(name)).map_err(|e| format!("{name}: {e}"))?;
    parse_automaton(&text).map_err(|e| format!("{name}: {e}"))
}

fn props(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

fn elementary_sizes() -> Outcome {
    let ap = props(&["a"]);
    let one = [
        ("atom", atom_automaton("a", &ap).map_err(|e| e.to_string())?),
        ("true", const_automaton(true, &Alphabet::Props(ap.clone()))),
        ("false", const_automaton(false, &Alphabet::Props(ap.clone()))),
        ("not", not_automaton()),
        ("or", or_automaton()),
    ];
    for (name, a) in &one {
        ensure(a.num_states() == 1, || format!("{name} has {} states", a.num_states()))?;
    }
    let sizes = [
        ("U", until_automaton(), 5),
        ("S", since_automaton(), 5),
        ("U'", stavi_until_automaton(), 10),
        ("S'", stavi_since_automaton(), 10),
    ];
    for (name, a, n) in &sizes {
        ensure(a.num_states() == *n, || format!("{name} has {} states, expected {n}", a.num_states()))?;
    }
    let written = write_automaton(&until_automaton(), DEFAULT_EXPAND_CAP).map_err(|e| e.to_string())?;
    let shipped = fs::read_to_string(fixture("until.aut")).map_err(|e| e.to_string())?;
    ensure(written == shipped, || "until.aut differs from the built Until table".into())?;
    ensure(load("until.aut")?.same_tables(&until_automaton()), || {
        "until.aut parses to different tables".into()
    })?;
    Ok("1-state leaves, |A_U| = |A_S| = 5, |A_U'| = |A_S'| = 10, until.aut identical".into())
}

fn oracle_equivalence() -> Outcome {
    let ap = props(&["a", "b"]);
    let start = Instant::now();
    let formulas = sample_formulas(3, &ap, 500, DEFAULT_SEED);
    ensure(formulas.len() == 500, || format!("sampled {} formulas", formulas.len()))?;
    let report = run_finite(&formulas, &ap, 4, false).map_err(|e| e.to_string())?;
    ensure(report.passed(), || {
        format!("{}; first: {}", report.summary(), report.failures[0])
    })?;
    ensure(report.checked == 500 * 341, || format!("{} checks", report.checked))?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{} in {:.1?}", report.summary(), start.elapsed()))
}

fn non_ambiguity() -> Outcome {
    let start = Instant::now();
    let words = finite_words(&Alphabet::Bits(2), 5);
    let autos = [
        ("U", until_automaton()),
        ("U'", stavi_until_automaton()),
        ("S", since_automaton()),
        ("S'", stavi_since_automaton()),
    ];
    for (name, a) in &autos {
        for w in &words {
            let n = enumerate_accepting_runs_finite(a, w).len();
            ensure(n == 1, || {
                format!("{name} has {n} runs on {}", Alphabet::Bits(2).render_word(w))
            })?;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{} words x 4 automata, one run each", words.len()))
}

fn eval_rendered(formula: &str, word: &str) -> Result<String, String> {
    let ap = props(&["a"]);
    let f = parse(formula, &ap).map_err(|e| e.to_string())?;
    let a = compile(&f, &ap).map_err(|e| e.to_string())?;
    let t = parse_term(word, &Alphabet::Props(ap)).map_err(|e| e.to_string())?;
    let (_, out) = find_run_term(&a, &t).map_err(|e| e.to_string())?;
    Ok(out.simplify().render(a.output()))
}

fn truth_word_example() -> Outcome {
    let f = "!a & G !(X a)";
    let first = eval_rendered(f, "{a} {}^w {a} {}^w {a}")?;
    ensure(first == "0 1^w 0 1^w 0", || format!("got `{first}`"))?;
    let second = eval_rendered(f, "({a} {})^w")?;
    ensure(second == "0^w", || format!("got `{second}`"))?;
    Ok(format!("`{first}` and `{second}`"))
}

fn verdict(f: &str, ap: &[&str], rules: RuleSet) -> Result<(Verdict, Duration), String> {
    let ap = props(ap);
    let f: Formula = parse(f, &ap).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let v = satisfiable(&f, &ap, rules, DEFAULT_MAX_ITEMS).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    within(t, Duration::from_secs(60))?;
    Ok((v, t))
}

fn sat_verdicts() -> Outcome {
    let ab = ["a", "b"];
    let expect = |f: &str, rules: RuleSet, want: &[&str]| -> Result<(), String> {
        let (v, _) = verdict(f, &ab, rules)?;
        ensure(want.contains(&v.label()), || format!("`{f}` with {rules}: {}", v.label()))
    };
    expect("a & !a", RuleSet::ALL, &["UNSAT"])?;
    expect("a U b", RuleSet::ALL, &["SAT"])?;
    expect("a S b", RuleSet::ALL, &["SAT"])?;
    expect("a U' b", RuleSet::ALL, &["SAT"])?;
    expect("a U' b", "succ,cat".parse().unwrap(), &["UNSAT", "UNKNOWN"])?;
    let ap = props(&ab);
    let f = parse("a U' b", &ap).map_err(|e| e.to_string())?;
    let b = load("finite_words.aut")?;
    let v = satisfiable_within(&f, &ap, &b, RuleSet::ALL, DEFAULT_MAX_ITEMS).map_err(|e| e.to_string())?;
    ensure(v == Verdict::Unsat, || format!("`a U' b` within finite words: {}", v.label()))?;
    Ok("UNSAT, SAT, SAT, SAT, UNSAT/UNKNOWN without limit rules, UNSAT within finite words".into())
}

fn dense_fixture() -> Outcome {
    let a = load("fig1b.aut")?;
    let all = saturate(&a, RuleSet::ALL, DEFAULT_MAX_ITEMS);
    ensure(accepts_nonempty_word(&a, &all), || "no nonempty word accepted with all rules".into())?;
    let no_shuffle = saturate(&a, "succ,cat,omega,negomega".parse().unwrap(), DEFAULT_MAX_ITEMS);
    ensure(!accepts_nonempty_word(&a, &no_shuffle), || {
        "a nonempty word is accepted without the shuffle rule".into()
    })?;
    Ok(format!(
        "nonempty with all rules ({} items), empty without shuffle ({} items)",
        all.len(),
        no_shuffle.len()
    ))
}

fn gap_fixture() -> Outcome {
    for name in ["fig4.aut", "gap_future.aut"] {
        let a = load(name)?;
        for w in finite_words(a.input(), 4).iter().filter(|w| w.len() >= 2) {
            let runs = enumerate_accepting_runs_finite(&a, w);
            ensure(runs.len() == 1, || format!("{name}: {} runs on a word of length {}", runs.len(), w.len()))?;
            ensure(runs[0].1.iter().all(|l| *l == Letter(0)), || {
                format!("{name}: nonzero output on a word of length {}", w.len())
            })?;
        }
        let ones = |rules: RuleSet| find_live_transition(&a, rules, DEFAULT_MAX_ITEMS, |b| b == Letter(1));
        let plain = ones("succ,cat".parse().unwrap());
        ensure(plain == Verdict::Unsat, || format!("{name}: 1-output live without limit rules"))?;
        let full = ones(RuleSet::ALL);
        ensure(matches!(full, Verdict::Sat(_)), || format!("{name}: no live 1-output transition"))?;
    }
    Ok("finite words of length 2-4 output zeros; 1-transitions live only with limit rules".into())
}

fn omega_agreement() -> Outcome {
    let ap = props(&["a"]);
    let start = Instant::now();
    let formulas = all_formulas(2, &ap);
    let report = run_up(&formulas, &ap, 3, 3, false).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("{}; first: {}", report.summary(), report.failures[0]))?;
    let words = up_words(&Alphabet::Props(ap.clone()), 3, 3);
    let zero = UpWord::new(vec![], vec![Letter(0)]);
    let mut stavi = 0;
    for f in formulas.iter().filter(|f| matches!(f, Formula::StaviUntil(..) | Formula::StaviSince(..))) {
        stavi += 1;
        let a = compile(f, &ap).map_err(|e| e.to_string())?;
        for w in &words {
            let (_, out) = find_run_term(&a, &w.to_term()).map_err(|e| format!("{f}: {e}"))?;
            let got = UpWord::from_term(&out.simplify()).map(|x| x.normalize());
            ensure(got.as_ref() == Some(&zero), || format!("{f} is not constantly 0"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "{} formulas x {} words, {}; {stavi} Stavi formulas constant 0; {:.1?}",
        formulas.len(),
        words.len(),
        report.summary(),
        start.elapsed()
    ))
}

fn reversal() -> Outcome {
    let elementary = [
        atom_automaton("a", &props(&["a"])).map_err(|e| e.to_string())?,
        const_automaton(true, &Alphabet::Props(props(&["a"]))),
        not_automaton(),
        or_automaton(),
        until_automaton(),
        since_automaton(),
        stavi_until_automaton(),
        stavi_since_automaton(),
    ];
    for a in &elementary {
        ensure(a.reverse().reverse().same_tables(a), || "reverse is not an involution".into())?;
    }
    let pairs = [
        ("S", since_automaton(), until_automaton()),
        ("S'", stavi_since_automaton(), stavi_until_automaton()),
    ];
    let words = finite_words(&Alphabet::Bits(2), 4);
    for (name, past, future) in &pairs {
        for w in &words {
            let rev: Vec<Letter> = w.iter().rev().copied().collect();
            let p = enumerate_accepting_runs_finite(past, w);
            let f = enumerate_accepting_runs_finite(future, &rev);
            ensure(p.len() == 1 && f.len() == 1, || format!("{name}: run counts {} / {}", p.len(), f.len()))?;
            let (run_p, out_p) = &p[0];
            let (run_f, out_f) = &f[0];
            let names_p: Vec<String> = run_p.iter().map(|&s| past.state_name(s)).collect();
            let mut names_f: Vec<String> = run_f.iter().map(|&s| future.state_name(s)).collect();
            names_f.reverse();
            let mut out_f = out_f.clone();
            out_f.reverse();
            ensure(names_p == names_f && *out_p == out_f, || {
                format!("{name}: mismatch on {}", Alphabet::Bits(2).render_word(w))
            })?;
        }
    }
    Ok(format!("involution on {} automata; {} words per past connective", elementary.len(), words.len()))
}

fn state_counts() -> Outcome {
    let count = |text: &str, ap: &[&str]| -> Result<usize, String> {
        let ap = props(ap);
        let f = parse(text, &ap).map_err(|e| e.to_string())?;
        Ok(compile(&f, &ap).map_err(|e| e.to_string())?.num_states())
    };
    let nested = count("a U (b U c)", &["a", "b", "c"])?;
    let next = count("X a", &["a"])?;
    ensure(nested == 25 && next == 5, || format!("got {nested} and {next}"))?;
    Ok("a U (b U c): 25 states, X a: 5 states".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("elementary sizes and Until fixture", elementary_sizes),
        ("oracle equivalence on finite words", oracle_equivalence),
        ("non-ambiguity of elementary automata", non_ambiguity),
        ("truth-word example", truth_word_example),
        ("satisfiability verdicts", sat_verdicts),
        ("dense-order fixture", dense_fixture),
        ("gap fixture", gap_fixture),
        ("ω-word agreement", omega_agreement),
        ("reversal duality", reversal),
        ("state-count formula", state_counts),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
