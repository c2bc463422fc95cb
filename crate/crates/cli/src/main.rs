use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lotl_core::automaton::format::{parse_automaton, write_automaton, DEFAULT_EXPAND_CAP};
use lotl_core::automaton::find_run_term;
use lotl_core::construction::{compile, predicted_states};
use lotl_core::formula::{self, Formula};
use lotl_core::oracle::{eval_finite, eval_up, UpWord};
use lotl_core::reach::{satisfiable, satisfiable_within, RuleSet, Verdict, DEFAULT_MAX_ITEMS};
use lotl_core::selftest::{self, DEFAULT_SEED};
use lotl_core::words::{parse_term, props_in_text};
use lotl_core::{Alphabet, Error, Letter, Transducer, WordTerm};

#[derive(Parser)]
#[command(name = "lotl", version, about = "Temporal logic over arbitrary linear orderings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the desugared syntax tree of a formula.
    Parse {
        formula: String,
        /// Proposition names (default: the atoms of the formula).
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
    },
    /// Compile a formula into a transducer and print its size.
    Compile {
        formula: String,
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
        /// Write the transducer in the text format.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest state count accepted by `--out`.
        #[arg(long, default_value_t = DEFAULT_EXPAND_CAP)]
        expand_cap: usize,
    },
    /// Print the truth word of a formula on a word term.
    Eval { formula: String, word: String },
    /// Print the truth word computed directly from the semantics (finite
    /// and ultimately periodic words only).
    Oracle { formula: String, word: String },
    /// Run an automaton file on a word term and print the run and output.
    Run { automaton: String, word: String },
    /// Decide satisfiability.
    Sat {
        formula: String,
        /// Restrict models to the words accepted by this automaton.
        #[arg(long)]
        within: Option<String>,
        /// Enabled closure rules: succ,cat,omega,negomega,shuffle.
        #[arg(long, default_value = "all")]
        rules: String,
        #[arg(long, env = "LOTL_MAX_ITEMS", default_value_t = DEFAULT_MAX_ITEMS)]
        max_items: usize,
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
    },
    /// Compare compiled transducers with the direct semantics.
    Selftest {
        /// Formula depth bound.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Word length bound (prefix and cycle bound with `--omega`).
        #[arg(long, default_value_t = 4)]
        len: usize,
        /// Number of sampled formulas.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "a,b")]
        props: Vec<String>,
        /// Check ultimately periodic words instead of finite ones.
        #[arg(long)]
        omega: bool,
        /// Write the full report to a file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print every case, not only failures.
        #[arg(long)]
        verbose: bool,
    },
}

enum Failure {
    Io(String),
    Core(Error),
    /// A completed run whose answer is negative, with its own exit status.
    Status(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult = Result<(), Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Reads an automaton file. A bare name such as `fig1b` falls back to the
/// shipped fixtures.
fn load_automaton(name: &str) -> Result<Transducer, Failure> {
    let direct = PathBuf::from(name);
    let path = if direct.exists() || name.contains('/') {
        direct
    } else {
        let file = if name.ends_with(".aut") { name.to_string() } else { format!("{name}.aut") };
        fixtures_dir().join(file)
    };
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    Ok(parse_automaton(&text)?)
}

/// The proposition set: explicit names if given, otherwise the atoms of the
/// formula together with `extra`.
fn proposition_set(f: &Formula, explicit: &[String], extra: &[String]) -> Vec<String> {
    if !explicit.is_empty() {
        return explicit.to_vec();
    }
    let mut all: BTreeSet<String> = f.atoms();
    all.extend(extra.iter().cloned());
    all.into_iter().collect()
}

fn parse_formula(text: &str, explicit: &[String], extra: &[String]) -> Result<(Formula, Vec<String>), Failure> {
    let f = formula::parse_unchecked(text)?;
    let ap = proposition_set(&f, explicit, extra);
    Ok((formula::parse(text, &ap)?, ap))
}

fn print_verdict(v: &Verdict) -> CliResult {
    println!("{}", v.label());
    match v {
        Verdict::Sat(trace) => {
            for line in trace {
                println!("  {line}");
            }
            Ok(())
        }
        Verdict::Unsat => Ok(()),
        Verdict::Unknown => Err(Failure::Status(3)),
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Parse { formula, props } => {
            let (f, _) = parse_formula(&formula, &props, &[])?;
            println!("{}", f.to_sexpr());
            println!("{f}");
        }
        Command::Compile { formula, props, out, expand_cap } => {
            let (f, ap) = parse_formula(&formula, &props, &[])?;
            let a = compile(&f, &ap)?;
            debug_assert_eq!(a.num_states() as u128, predicted_states(&f));
            println!("states: {}", a.num_states());
            println!("successor transitions: {}", a.successor_count());
            println!("input: {}", a.input());
            if let Some(path) = out {
                let text = write_automaton(&a, expand_cap)?;
                fs::write(&path, text).map_err(|e| io_err(&path, e))?;
            }
        }
        Command::Eval { formula, word } => {
            let (f, ap) = parse_formula(&formula, &[], &props_in_text(&word))?;
            let alphabet = Alphabet::Props(ap.clone());
            let term = parse_term(&word, &alphabet)?;
            let a = compile(&f, &ap)?;
            let (_, out) = find_run_term(&a, &term)?;
            println!("{}", out.simplify().render(a.output()));
        }
        Command::Oracle { formula, word } => {
            let (f, ap) = parse_formula(&formula, &[], &props_in_text(&word))?;
            let alphabet = Alphabet::Props(ap.clone());
            let term = parse_term(&word, &alphabet)?;
            let truth = if let Ok(w) = term.to_finite() {
                let bits: Vec<Letter> = eval_finite(&f, &ap, &w)?.into_iter().map(|b| Letter(b as u32)).collect();
                WordTerm::from_finite(&bits)
            } else if let Some(w) = UpWord::from_term(&term.simplify()) {
                eval_up(&f, &ap, &w)?.to_letters().to_term()
            } else {
                return Err(Error::Shape("the oracle handles finite and ultimately periodic words only".into()).into());
            };
            println!("{}", truth.simplify().render(&Alphabet::Bits(1)));
        }
        Command::Run { automaton, word } => {
            let a = load_automaton(&automaton)?;
            let term = parse_term(&word, a.input())?;
            let (r, out) = find_run_term(&a, &term)?;
            println!("run: {}", r.render(&a));
            println!("output: {}", out.simplify().render(a.output()));
        }
        Command::Sat { formula, within, rules, max_items, props } => {
            let rules: RuleSet = rules.parse()?;
            match within {
                None => {
                    let (f, ap) = parse_formula(&formula, &props, &[])?;
                    print_verdict(&satisfiable(&f, &ap, rules, max_items)?)?;
                }
                Some(file) => {
                    let b = load_automaton(&file)?;
                    let extra = match b.input() {
                        Alphabet::Props(p) => p.clone(),
                        other => {
                            return Err(Error::AlphabetMismatch(format!(
                                "`--within` needs an automaton reading sets of propositions, found `{other}`"
                            ))
                            .into())
                        }
                    };
                    let (f, ap) = parse_formula(&formula, &props, &extra)?;
                    print_verdict(&satisfiable_within(&f, &ap, &b, rules, max_items)?)?;
                }
            }
        }
        Command::Selftest { depth, len, samples, seed, props, omega, out, verbose } => {
            let formulas = selftest::sample_formulas(depth, &props, samples, seed);
            let keep_ok = verbose || out.is_some();
            let report = if omega {
                selftest::run_up(&formulas, &props, len, len, keep_ok)?
            } else {
                selftest::run_finite(&formulas, &props, len, keep_ok)?
            };
            if let Some(path) = out {
                fs::write(&path, report.render(true)).map_err(|e| io_err(&path, e))?;
            }
            print!("{}", report.render(verbose));
            if !report.passed() {
                return Err(Failure::Status(5));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Status(code)) => ExitCode::from(code),
        Err(Failure::Io(msg)) => {
            eprintln!("error[io]: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            let class = e.class();
            eprintln!("error[{class}]: {e}");
            ExitCode::from(match class {
                "resource" => 3,
                "no-run" => 4,
                _ => 2,
            })
        }
    }
}
