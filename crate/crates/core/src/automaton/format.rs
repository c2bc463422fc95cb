//! Line-oriented text format for transducers.
//!
//! ```text
//! # comment
//! alphabet_in: bits 1            # or `props a b`, `symbols x y`
//! alphabet_out: bits 1
//! states: q0 q1 q2
//! initial: q0
//! final: q0 q2
//! succ: q0 ; - ; 1 ; q1          # from ; input ; output ; to
//! llim: * ; q0                   # limit set ; targets
//! rlim: q0, q2 ; {q1,q2}         # sources ; limit set
//! ```
//!
//! An input `-` stands for every input letter; an output `-` copies the
//! input letter. A limit set is `{p,q}` (exactly that set), `*{p,q}` (every
//! nonempty subset of it) or `*` (every nonempty set).

use std::fmt::Write as _;

use super::{SetPred, StateSet, Table, Transducer};
use crate::error::{Error, Result};
use crate::words::{parse_term, Alphabet, Letter, WordTerm};

/// Default state cap when expanding symbolic limit rules for output.
pub const DEFAULT_EXPAND_CAP: usize = 10;

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

/// Splits on `sep` outside parentheses and braces.
fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' | '<' => depth += 1,
            ')' | '}' | '>' => depth -= 1,
            _ if c == sep && depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts
}

fn parse_alphabet(spec: &str, line: usize) -> Result<Alphabet> {
    let mut words = spec.split_whitespace();
    let kind = words.next().ok_or_else(|| err(line, "missing alphabet"))?;
    let rest: Vec<String> = words.map(str::to_string).collect();
    match kind {
        "props" => Ok(Alphabet::Props(rest)),
        "symbols" if !rest.is_empty() => Ok(Alphabet::Symbols(rest)),
        "bits" => match rest.as_slice() {
            [k] => k
                .parse()
                .ok()
                .filter(|&k: &usize| k <= 16)
                .map(Alphabet::Bits)
                .ok_or_else(|| err(line, format!("bad bit width `{k}`"))),
            _ => Err(err(line, "expected `bits <width>`")),
        },
        _ => Err(err(line, format!("unknown alphabet `{spec}`"))),
    }
}

struct Pending {
    line: usize,
    fields: Vec<String>,
}

/// Parses the text format.
pub fn parse_automaton(text: &str) -> Result<Transducer> {
    let mut input = None;
    let mut output = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial = Vec::new();
    let mut finals = Vec::new();
    let mut succ = Vec::new();
    let mut llim = Vec::new();
    let mut rlim = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| err(line, "expected `key: value`"))?;
        let value = value.trim();
        let names = || -> Vec<String> {
            split_top(value, ',')
                .into_iter()
                .flat_map(|s| s.split_whitespace())
                .map(str::to_string)
                .collect()
        };
        match key.trim() {
            "alphabet_in" => input = Some(parse_alphabet(value, line)?),
            "alphabet_out" => output = Some(parse_alphabet(value, line)?),
            "states" => states = Some(names()),
            "initial" => initial.push((line, names())),
            "final" => finals.push((line, names())),
            "succ" | "llim" | "rlim" => {
                let fields: Vec<String> = split_top(value, ';').into_iter().map(str::to_string).collect();
                let pending = Pending { line, fields };
                match key.trim() {
                    "succ" => succ.push(pending),
                    "llim" => llim.push(pending),
                    _ => rlim.push(pending),
                }
            }
            other => return Err(err(line, format!("unknown key `{other}`"))),
        }
    }
    let input = input.ok_or_else(|| err(0, "missing `alphabet_in`"))?;
    let output = output.ok_or_else(|| err(0, "missing `alphabet_out`"))?;
    let names = states.ok_or_else(|| err(0, "missing `states`"))?;
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(err(0, format!("duplicate state `{n}`")));
        }
    }
    let mut table = Table::new(&names, input.size());
    let state = |name: &str, line: usize| {
        table_state(&names, name).ok_or_else(|| err(line, format!("unknown state `{name}`")))
    };
    for (line, list) in &initial {
        for n in list {
            let s = state(n, *line)?;
            table.set_initial(s);
        }
    }
    for (line, list) in &finals {
        for n in list {
            let s = state(n, *line)?;
            table.set_final(s);
        }
    }
    for Pending { line, fields } in &succ {
        let [from, a, b, to] = fields.as_slice() else {
            return Err(err(*line, "expected `from ; input ; output ; to`"));
        };
        let (from, to) = (state(from, *line)?, state(to, *line)?);
        let inputs: Vec<Letter> = if a == "-" {
            input.letters().collect()
        } else {
            vec![parse_letter(a, &input, *line)?]
        };
        for x in inputs {
            let y = if b == "-" {
                if input != output {
                    return Err(err(*line, "output `-` copies the input and needs equal alphabets"));
                }
                x
            } else {
                parse_letter(b, &output, *line)?
            };
            table.add_succ(from, x, y, to);
        }
    }
    for Pending { line, fields } in &llim {
        let [set, targets] = fields.as_slice() else {
            return Err(err(*line, "expected `SET ; targets`"));
        };
        let when = parse_set(set, &names, *line)?;
        let to = parse_state_list(targets, &names, *line)?;
        table.add_left(when, to);
    }
    for Pending { line, fields } in &rlim {
        let [sources, set] = fields.as_slice() else {
            return Err(err(*line, "expected `sources ; SET`"));
        };
        let from = parse_state_list(sources, &names, *line)?;
        let when = parse_set(set, &names, *line)?;
        table.add_right(from, when);
    }
    Transducer::from_table(input, output, table)
}

fn table_state(names: &[String], name: &str) -> Option<usize> {
    names.iter().position(|n| n == name)
}

fn parse_letter(text: &str, alphabet: &Alphabet, line: usize) -> Result<Letter> {
    match parse_term(text, alphabet) {
        Ok(WordTerm::Lit(l)) => Ok(l),
        Ok(_) => Err(err(line, format!("`{text}` is not a single letter"))),
        Err(e) => Err(err(line, format!("bad letter `{text}`: {e}"))),
    }
}

fn parse_state_list(text: &str, names: &[String], line: usize) -> Result<StateSet> {
    let mut set = StateSet::new();
    for n in split_top(text, ',').into_iter().flat_map(|s| s.split_whitespace()) {
        set.insert(table_state(names, n).ok_or_else(|| err(line, format!("unknown state `{n}`")))?);
    }
    if set.is_empty() {
        return Err(err(line, "empty state list"));
    }
    Ok(set)
}

fn parse_set(text: &str, names: &[String], line: usize) -> Result<SetPred> {
    if text == "*" {
        return Ok(SetPred::Any);
    }
    let (subsets, body) = match text.strip_prefix('*') {
        Some(rest) => (true, rest.trim()),
        None => (false, text),
    };
    let inner = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| err(line, format!("expected a set `{{..}}`, found `{text}`")))?;
    let set = parse_state_list(inner, names, line)?;
    Ok(if subsets { SetPred::Subset(set) } else { SetPred::Exactly(set) })
}

fn write_alphabet(a: &Alphabet) -> Result<String> {
    match a {
        Alphabet::Pair(..) => Err(Error::Unsupported(format!(
            "alphabet `{a}` has no text form"
        ))),
        Alphabet::Props(p) if p.is_empty() => Ok("props".into()),
        other => Ok(other.to_string()),
    }
}

/// Writes `a` with every limit rule expanded to exact sets. Refused when
/// the transducer has more than `cap` states.
pub fn write_automaton(a: &Transducer, cap: usize) -> Result<String> {
    let table = a.expand(cap)?;
    let names = table.names();
    let set = |s: &StateSet| -> String {
        let v: Vec<&str> = s.iter().map(|q| names[q].as_str()).collect();
        v.join(",")
    };
    let mut out = String::new();
    writeln!(out, "alphabet_in: {}", write_alphabet(a.input())?).unwrap();
    writeln!(out, "alphabet_out: {}", write_alphabet(a.output())?).unwrap();
    writeln!(out, "states: {}", names.join(" ")).unwrap();
    writeln!(out, "initial: {}", set(table.initial())).unwrap();
    writeln!(out, "final: {}", set(table.finals())).unwrap();
    for (p, x, y, q) in table.transitions() {
        writeln!(
            out,
            "succ: {} ; {} ; {} ; {}",
            names[p],
            a.input().render_letter(x),
            a.output().render_letter(y),
            names[q]
        )
        .unwrap();
    }
    for rule in table.left_rules() {
        if let SetPred::Exactly(s) = &rule.when {
            writeln!(out, "llim: {{{}}} ; {}", set(s), set(&rule.to)).unwrap();
        }
    }
    for rule in table.right_rules() {
        if let SetPred::Exactly(s) = &rule.when {
            writeln!(out, "rlim: {} ; {{{}}}", set(&rule.from), set(s)).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two states
alphabet_in: bits 1
alphabet_out: bits 1
states: p q'
initial: p
final: q'
succ: p ; - ; - ; p
succ: p ; 1 ; 0 ; q'
llim: *{p} ; q'
rlim: q' ; *
";

    #[test]
    fn parses_wildcards_and_sets() {
        let a = parse_automaton(SMALL).unwrap();
        assert_eq!(a.num_states(), 2);
        assert_eq!(a.successors(0, Letter(1)), vec![(Letter(0), 1), (Letter(1), 0)]);
        assert!(a.left_limit(&StateSet::singleton(0), 1));
        assert!(!a.left_limit(&StateSet::from([0, 1]), 1));
        assert!(a.right_limit(1, &StateSet::from([0, 1])));
    }

    #[test]
    fn write_then_parse_round_trips() {
        let a = parse_automaton(SMALL).unwrap();
        let text = write_automaton(&a, DEFAULT_EXPAND_CAP).unwrap();
        let b = parse_automaton(&text).unwrap();
        assert!(a.same_tables(&b));
        assert_eq!(write_automaton(&b, DEFAULT_EXPAND_CAP).unwrap(), text);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = SMALL.replace("succ: p ; 1 ; 0 ; q'", "succ: p ; 1 ; 0 ; r");
        assert_eq!(
            parse_automaton(&bad).unwrap_err(),
            Error::Format { line: 8, message: "unknown state `r`".into() }
        );
    }

    #[test]
    fn refuses_above_cap() {
        let a = parse_automaton(SMALL).unwrap();
        assert!(matches!(write_automaton(&a, 1), Err(Error::ResourceExceeded(_))));
    }
}
