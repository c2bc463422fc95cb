//! Formula syntax: the core connectives, surface sugar, a parser and a
//! printer with minimal parentheses.
//!
//! Concrete precedence, tightest first: unary operators (`!`, `X`, `F`, `G`,
//! `Y`, `O`, `H`), the temporal binaries (`U`, `S`, `U'`, `S'`, `Uns`, `Sns`,
//! right-associative), `&`, `|`, and `->` (right-associative).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Core formula. Everything the parser accepts is desugared into these nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Strict until: some later position satisfies the right operand and
    /// every position strictly in between satisfies the left one.
    Until(Box<Formula>, Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    StaviUntil(Box<Formula>, Box<Formula>),
    StaviSince(Box<Formula>, Box<Formula>),
}

/// The four temporal binary connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Temporal {
    Until,
    Since,
    StaviUntil,
    StaviSince,
}

impl Temporal {
    pub const ALL: [Temporal; 4] = [
        Temporal::Until,
        Temporal::Since,
        Temporal::StaviUntil,
        Temporal::StaviSince,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Temporal::Until => "U",
            Temporal::Since => "S",
            Temporal::StaviUntil => "U'",
            Temporal::StaviSince => "S'",
        }
    }

    pub fn apply(self, left: Formula, right: Formula) -> Formula {
        let (l, r) = (Box::new(left), Box::new(right));
        match self {
            Temporal::Until => Formula::Until(l, r),
            Temporal::Since => Formula::Since(l, r),
            Temporal::StaviUntil => Formula::StaviUntil(l, r),
            Temporal::StaviSince => Formula::StaviSince(l, r),
        }
    }
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn since(l: Formula, r: Formula) -> Formula {
        Formula::Since(Box::new(l), Box::new(r))
    }

    pub fn stavi_until(l: Formula, r: Formula) -> Formula {
        Formula::StaviUntil(Box::new(l), Box::new(r))
    }

    pub fn stavi_since(l: Formula, r: Formula) -> Formula {
        Formula::StaviSince(Box::new(l), Box::new(r))
    }

    /// Splits a temporal node into its connective and operands.
    pub fn as_temporal(&self) -> Option<(Temporal, &Formula, &Formula)> {
        match self {
            Formula::Until(l, r) => Some((Temporal::Until, l, r)),
            Formula::Since(l, r) => Some((Temporal::Since, l, r)),
            Formula::StaviUntil(l, r) => Some((Temporal::StaviUntil, l, r)),
            Formula::StaviSince(l, r) => Some((Temporal::StaviSince, l, r)),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(c) => vec![c],
            Formula::Or(l, r)
            | Formula::Until(l, r)
            | Formula::Since(l, r)
            | Formula::StaviUntil(l, r)
            | Formula::StaviSince(l, r) => vec![l, r],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Height of the tree; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn temporal_count(&self) -> usize {
        let own = usize::from(self.as_temporal().is_some());
        own + self
            .children()
            .into_iter()
            .map(Formula::temporal_count)
            .sum::<usize>()
    }

    pub fn is_stavi_free(&self) -> bool {
        !matches!(self, Formula::StaviUntil(..) | Formula::StaviSince(..))
            && self.children().into_iter().all(Formula::is_stavi_free)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(name) = self {
            out.insert(name.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// All subformulas in post-order (children before parents).
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        for c in self.children() {
            c.collect_subformulas(out);
        }
        out.push(self);
    }

    /// S-expression view of the tree, used by the `parse` subcommand.
    pub fn to_sexpr(&self) -> String {
        match self {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Atom(p) => p.clone(),
            Formula::Not(c) => format!("(Not {})", c.to_sexpr()),
            Formula::Or(l, r) => format!("(Or {} {})", l.to_sexpr(), r.to_sexpr()),
            Formula::Until(l, r) => format!("(Until {} {})", l.to_sexpr(), r.to_sexpr()),
            Formula::Since(l, r) => format!("(Since {} {})", l.to_sexpr(), r.to_sexpr()),
            Formula::StaviUntil(l, r) => {
                format!("(StaviUntil {} {})", l.to_sexpr(), r.to_sexpr())
            }
            Formula::StaviSince(l, r) => {
                format!("(StaviSince {} {})", l.to_sexpr(), r.to_sexpr())
            }
        }
    }

    /// Prints the formula in the concrete grammar with as few parentheses as
    /// the precedence table allows.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Or(..) => LEVEL_OR,
            Formula::Not(_) => LEVEL_UNARY,
            Formula::True | Formula::False | Formula::Atom(_) => LEVEL_ATOM,
            _ => LEVEL_TEMPORAL,
        }
    }

    fn render_into(&self, out: &mut String, min_level: u8) {
        let wrap = self.level() < min_level;
        if wrap {
            out.push('(');
        }
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Atom(p) => out.push_str(p),
            Formula::Not(c) => {
                out.push('!');
                c.render_into(out, LEVEL_UNARY);
            }
            Formula::Or(l, r) => {
                l.render_into(out, LEVEL_OR);
                out.push_str(" | ");
                r.render_into(out, LEVEL_OR + 1);
            }
            _ => {
                let (op, l, r) = self.as_temporal().expect("temporal node");
                l.render_into(out, LEVEL_TEMPORAL + 1);
                out.push(' ');
                out.push_str(op.token());
                out.push(' ');
                r.render_into(out, LEVEL_TEMPORAL);
            }
        }
        if wrap {
            out.push(')');
        }
    }
}

// Binding strength of the printed core connectives; `&` and `->` never
// appear in core formulas.
const LEVEL_OR: u8 = 1;
const LEVEL_TEMPORAL: u8 = 2;
const LEVEL_UNARY: u8 = 3;
const LEVEL_ATOM: u8 = 4;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Surface syntax before desugaring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sugared {
    True,
    False,
    Atom(String),
    Not(Box<Sugared>),
    Or(Box<Sugared>, Box<Sugared>),
    Temporal(Temporal, Box<Sugared>, Box<Sugared>),
    And(Box<Sugared>, Box<Sugared>),
    Implies(Box<Sugared>, Box<Sugared>),
    Next(Box<Sugared>),
    Eventually(Box<Sugared>),
    Always(Box<Sugared>),
    Yesterday(Box<Sugared>),
    Once(Box<Sugared>),
    Historically(Box<Sugared>),
    /// Non-strict until: the current position may witness either operand.
    UntilNonStrict(Box<Sugared>, Box<Sugared>),
    SinceNonStrict(Box<Sugared>, Box<Sugared>),
}

impl Sugared {
    /// Rewrites every derived connective into the core ones.
    pub fn desugar(&self) -> Formula {
        use Formula as F;
        match self {
            Sugared::True => F::True,
            Sugared::False => F::False,
            Sugared::Atom(p) => F::Atom(p.clone()),
            Sugared::Not(c) => F::not(c.desugar()),
            Sugared::Or(l, r) => F::or(l.desugar(), r.desugar()),
            Sugared::Temporal(op, l, r) => op.apply(l.desugar(), r.desugar()),
            Sugared::And(l, r) => F::not(F::or(F::not(l.desugar()), F::not(r.desugar()))),
            Sugared::Implies(l, r) => F::or(F::not(l.desugar()), r.desugar()),
            Sugared::Next(c) => F::until(F::False, c.desugar()),
            Sugared::Yesterday(c) => F::since(F::False, c.desugar()),
            Sugared::Eventually(c) => eventually(c.desugar(), Temporal::Until),
            Sugared::Once(c) => eventually(c.desugar(), Temporal::Since),
            Sugared::Always(c) => F::not(eventually(F::not(c.desugar()), Temporal::Until)),
            Sugared::Historically(c) => F::not(eventually(F::not(c.desugar()), Temporal::Since)),
            Sugared::UntilNonStrict(l, r) => non_strict(l.desugar(), r.desugar(), Temporal::Until),
            Sugared::SinceNonStrict(l, r) => non_strict(l.desugar(), r.desugar(), Temporal::Since),
        }
    }

    /// Embeds a core formula into the surface syntax unchanged.
    pub fn from_core(f: &Formula) -> Sugared {
        let b = |f: &Formula| Box::new(Sugared::from_core(f));
        match f {
            Formula::True => Sugared::True,
            Formula::False => Sugared::False,
            Formula::Atom(p) => Sugared::Atom(p.clone()),
            Formula::Not(c) => Sugared::Not(b(c)),
            Formula::Or(l, r) => Sugared::Or(b(l), b(r)),
            _ => {
                let (op, l, r) = f.as_temporal().expect("temporal node");
                Sugared::Temporal(op, b(l), b(r))
            }
        }
    }
}

fn eventually(f: Formula, op: Temporal) -> Formula {
    Formula::or(f.clone(), op.apply(Formula::True, f))
}

fn non_strict(l: Formula, r: Formula, op: Temporal) -> Formula {
    let strict = op.apply(l.clone(), r.clone());
    let l_and_strict = Formula::not(Formula::or(Formula::not(l), Formula::not(strict)));
    Formula::or(r, l_and_strict)
}

/// Parses and desugars `text`; every atom must belong to `props`.
pub fn parse(text: &str, props: &[String]) -> Result<Formula> {
    let surface = parse_surface(text)?;
    let core = surface.desugar();
    for atom in core.atoms() {
        if !props.contains(&atom) {
            return Err(Error::UnknownProposition(atom));
        }
    }
    Ok(core)
}

/// Parses without checking atoms against a proposition set.
pub fn parse_unchecked(text: &str) -> Result<Formula> {
    Ok(parse_surface(text)?.desugar())
}

pub fn parse_surface(text: &str) -> Result<Sugared> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let f = parser.implication()?;
    match parser.peek() {
        None => Ok(f),
        Some((offset, tok)) => Err(Error::syntax(
            *offset,
            format!("unexpected {}", tok.describe()),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    LParen,
    RParen,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Unary(char),
    Binary(BinaryTok),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinaryTok {
    Core(Temporal),
    UntilNonStrict,
    SinceNonStrict,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Unary(c) => format!("`{c}`"),
            Tok::Binary(BinaryTok::Core(t)) => format!("`{}`", t.token()),
            Tok::Binary(BinaryTok::UntilNonStrict) => "`Uns`".into(),
            Tok::Binary(BinaryTok::SinceNonStrict) => "`Sns`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'!' => out.push((start, Tok::Bang)),
            b'&' => out.push((start, Tok::Amp)),
            b'|' => out.push((start, Tok::Pipe)),
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    out.push((start, Tok::Arrow));
                } else {
                    return Err(Error::syntax(start, "expected `->`"));
                }
            }
            b'a'..=b'z' => {
                while i + 1 < bytes.len()
                    && matches!(bytes[i + 1], b'a'..=b'z' | b'0'..=b'9' | b'_')
                {
                    i += 1;
                }
                let word = &text[start..=i];
                out.push((
                    start,
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    },
                ));
            }
            b'A'..=b'Z' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric() {
                    i += 1;
                }
                let mut word = text[start..=i].to_string();
                if bytes.get(i + 1) == Some(&b'\'') {
                    i += 1;
                    word.push('\'');
                }
                let tok = match word.as_str() {
                    "U" => Tok::Binary(BinaryTok::Core(Temporal::Until)),
                    "S" => Tok::Binary(BinaryTok::Core(Temporal::Since)),
                    "U'" => Tok::Binary(BinaryTok::Core(Temporal::StaviUntil)),
                    "S'" => Tok::Binary(BinaryTok::Core(Temporal::StaviSince)),
                    "Uns" => Tok::Binary(BinaryTok::UntilNonStrict),
                    "Sns" => Tok::Binary(BinaryTok::SinceNonStrict),
                    "X" | "F" | "G" | "Y" | "O" | "H" => Tok::Unary(word.chars().next().unwrap()),
                    _ => return Err(Error::syntax(start, format!("unknown operator `{word}`"))),
                };
                out.push((start, tok));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(Error::syntax(start, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|(_, t)| t) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Sugared> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let right = self.implication()?;
            return Ok(Sugared::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Sugared> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let right = self.conjunction()?;
            left = Sugared::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Sugared> {
        let mut left = self.temporal()?;
        while self.eat(&Tok::Amp) {
            let right = self.temporal()?;
            left = Sugared::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn temporal(&mut self) -> Result<Sugared> {
        let left = self.unary()?;
        if let Some((_, Tok::Binary(op))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let right = Box::new(self.temporal()?);
            let left = Box::new(left);
            return Ok(match op {
                BinaryTok::Core(t) => Sugared::Temporal(t, left, right),
                BinaryTok::UntilNonStrict => Sugared::UntilNonStrict(left, right),
                BinaryTok::SinceNonStrict => Sugared::SinceNonStrict(left, right),
            });
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Sugared> {
        let Some((offset, tok)) = self.peek().cloned() else {
            return Err(Error::syntax(self.end, "unexpected end of input"));
        };
        self.pos += 1;
        let operand = |p: &mut Parser| p.unary().map(Box::new);
        match tok {
            Tok::Bang => Ok(Sugared::Not(operand(self)?)),
            Tok::Unary(c) => {
                let inner = operand(self)?;
                Ok(match c {
                    'X' => Sugared::Next(inner),
                    'F' => Sugared::Eventually(inner),
                    'G' => Sugared::Always(inner),
                    'Y' => Sugared::Yesterday(inner),
                    'O' => Sugared::Once(inner),
                    _ => Sugared::Historically(inner),
                })
            }
            Tok::Ident(name) => Ok(Sugared::Atom(name)),
            Tok::True => Ok(Sugared::True),
            Tok::False => Ok(Sugared::False),
            Tok::LParen => {
                let inner = self.implication()?;
                match self.peek() {
                    Some((_, Tok::RParen)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some((o, t)) => Err(Error::syntax(*o, format!("expected `)`, found {}", t.describe()))),
                    None => Err(Error::syntax(self.end, "unexpected end of input, expected `)`")),
                }
            }
            other => Err(Error::syntax(offset, format!("unexpected {}", other.describe()))),
        }
    }
}
