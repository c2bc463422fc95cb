//! Words indexed by finitely presented linear orderings.
//!
//! A [`WordTerm`] is built from letters, concatenation, ω-powers, −ω-powers
//! and shuffles. Letters are small integers interpreted by an [`Alphabet`].

use std::fmt;

use crate::error::{Error, Result};

/// A letter, interpreted by an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A finite word is a plain sequence of letters.
pub type FiniteWord = Vec<Letter>;

/// Finite alphabets used for inputs, outputs and intermediate tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// Subsets of the named propositions; bit `i` of a letter is `props[i]`.
    Props(Vec<String>),
    /// Tuples of `k` bits; bit 0 is the first component.
    Bits(usize),
    /// Named symbols, letter `i` is `names[i]`.
    Symbols(Vec<String>),
    /// Pairs `(x, y)`, encoded as `x + |left| * y`.
    Pair(Box<Alphabet>, Box<Alphabet>),
}

impl Alphabet {
    pub fn props<S: AsRef<str>>(names: &[S]) -> Alphabet {
        Alphabet::Props(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn bit() -> Alphabet {
        Alphabet::Bits(1)
    }

    /// Product alphabet. Bit tuples concatenate, which keeps the encoding
    /// identical to the generic pair encoding.
    pub fn pair(left: &Alphabet, right: &Alphabet) -> Alphabet {
        match (left, right) {
            (Alphabet::Bits(m), Alphabet::Bits(n)) => Alphabet::Bits(m + n),
            _ => Alphabet::Pair(Box::new(left.clone()), Box::new(right.clone())),
        }
    }

    pub fn size(&self) -> u32 {
        match self {
            Alphabet::Props(p) => 1 << p.len(),
            Alphabet::Bits(k) => 1 << k,
            Alphabet::Symbols(s) => s.len() as u32,
            Alphabet::Pair(a, b) => a.size() * b.size(),
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size()).map(Letter)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.0 < self.size()
    }

    /// Encodes a proposition set; `None` when a name is not declared.
    pub fn props_letter<S: AsRef<str>>(&self, names: &[S]) -> Option<Letter> {
        let Alphabet::Props(props) = self else {
            return None;
        };
        let mut bits = 0;
        for name in names {
            let i = props.iter().position(|p| p == name.as_ref())?;
            bits |= 1 << i;
        }
        Some(Letter(bits))
    }

    pub fn render_letter(&self, letter: Letter) -> String {
        let l = letter.0;
        match self {
            Alphabet::Props(props) => {
                let names: Vec<&str> = props
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| l >> i & 1 == 1)
                    .map(|(_, p)| p.as_str())
                    .collect();
                format!("{{{}}}", names.join(","))
            }
            Alphabet::Bits(1) => (l & 1).to_string(),
            Alphabet::Bits(k) => {
                let bits: Vec<String> = (0..*k).map(|i| (l >> i & 1).to_string()).collect();
                format!("<{}>", bits.join(","))
            }
            Alphabet::Symbols(names) => names[l as usize].clone(),
            Alphabet::Pair(a, b) => {
                let (x, y) = split_pair(letter, a.size());
                format!("({},{})", a.render_letter(x), b.render_letter(y))
            }
        }
    }

    pub fn render_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "()".into();
        }
        let parts: Vec<String> = word.iter().map(|&l| self.render_letter(l)).collect();
        parts.join(" ")
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Props(p) if p.is_empty() => write!(f, "props"),
            Alphabet::Props(p) => write!(f, "props {}", p.join(" ")),
            Alphabet::Bits(k) => write!(f, "bits {k}"),
            Alphabet::Symbols(s) => write!(f, "symbols {}", s.join(" ")),
            Alphabet::Pair(a, b) => write!(f, "pair({a}; {b})"),
        }
    }
}

pub fn pair_letter(x: Letter, y: Letter, left_size: u32) -> Letter {
    Letter(x.0 + left_size * y.0)
}

pub fn split_pair(l: Letter, left_size: u32) -> (Letter, Letter) {
    (Letter(l.0 % left_size), Letter(l.0 / left_size))
}

/// A word term. Powers and shuffles must have bodies denoting nonempty words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WordTerm {
    Empty,
    Lit(Letter),
    Concat(Vec<WordTerm>),
    /// `prefix[0] ... prefix[k-1] (cycle[0] ... cycle[m-1])^ω`. Terms parsed
    /// from text have an empty prefix and a single cycle factor; truth words
    /// produced by runs use the general shape, one factor per copy.
    Omega {
        prefix: Vec<WordTerm>,
        cycle: Vec<WordTerm>,
    },
    /// Mirror of [`WordTerm::Omega`]: `(cycle)^-ω suffix`.
    NegOmega {
        cycle: Vec<WordTerm>,
        suffix: Vec<WordTerm>,
    },
    Shuffle(Vec<WordTerm>),
}

impl WordTerm {
    pub fn omega(body: WordTerm) -> WordTerm {
        WordTerm::Omega {
            prefix: vec![],
            cycle: vec![body],
        }
    }

    pub fn neg_omega(body: WordTerm) -> WordTerm {
        WordTerm::NegOmega {
            cycle: vec![body],
            suffix: vec![],
        }
    }

    pub fn concat(items: Vec<WordTerm>) -> WordTerm {
        match items.len() {
            0 => WordTerm::Empty,
            1 => items.into_iter().next().unwrap(),
            _ => WordTerm::Concat(items),
        }
    }

    pub fn from_finite(word: &[Letter]) -> WordTerm {
        WordTerm::concat(word.iter().map(|&l| WordTerm::Lit(l)).collect())
    }

    /// Whether the term denotes the empty word.
    pub fn is_empty_word(&self) -> bool {
        match self {
            WordTerm::Empty => true,
            WordTerm::Lit(_) => false,
            WordTerm::Concat(items) => items.iter().all(WordTerm::is_empty_word),
            WordTerm::Omega { prefix, cycle } | WordTerm::NegOmega { cycle, suffix: prefix } => {
                prefix.iter().all(WordTerm::is_empty_word) && cycle.iter().all(WordTerm::is_empty_word)
            }
            WordTerm::Shuffle(bodies) => bodies.iter().all(WordTerm::is_empty_word),
        }
    }

    /// Checks that power and shuffle bodies are nonempty and that letters
    /// belong to `alphabet`.
    pub fn check(&self, alphabet: &Alphabet) -> Result<()> {
        match self {
            WordTerm::Empty => Ok(()),
            WordTerm::Lit(l) => {
                if alphabet.contains(*l) {
                    Ok(())
                } else {
                    Err(Error::AlphabetMismatch(format!(
                        "letter {} outside alphabet `{alphabet}`",
                        l.0
                    )))
                }
            }
            WordTerm::Concat(items) => items.iter().try_for_each(|t| t.check(alphabet)),
            WordTerm::Omega { prefix, cycle } | WordTerm::NegOmega { cycle, suffix: prefix } => {
                if cycle.is_empty() || cycle.iter().all(WordTerm::is_empty_word) {
                    return Err(Error::Shape("power of the empty word".into()));
                }
                prefix
                    .iter()
                    .chain(cycle)
                    .try_for_each(|t| t.check(alphabet))
            }
            WordTerm::Shuffle(bodies) => {
                if bodies.is_empty() || bodies.iter().any(WordTerm::is_empty_word) {
                    return Err(Error::Shape("shuffle of the empty word".into()));
                }
                bodies.iter().try_for_each(|t| t.check(alphabet))
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            WordTerm::Empty | WordTerm::Lit(_) => true,
            WordTerm::Concat(items) => items.iter().all(WordTerm::is_finite),
            _ => false,
        }
    }

    pub fn has_shuffle(&self) -> bool {
        match self {
            WordTerm::Empty | WordTerm::Lit(_) => false,
            WordTerm::Concat(items) => items.iter().any(WordTerm::has_shuffle),
            WordTerm::Omega { prefix, cycle } | WordTerm::NegOmega { cycle, suffix: prefix } => {
                prefix.iter().chain(cycle).any(WordTerm::has_shuffle)
            }
            WordTerm::Shuffle(_) => true,
        }
    }

    /// Flattens a finite term into its letter sequence.
    pub fn to_finite(&self) -> Result<FiniteWord> {
        let mut out = Vec::new();
        self.push_finite(&mut out)?;
        Ok(out)
    }

    fn push_finite(&self, out: &mut FiniteWord) -> Result<()> {
        match self {
            WordTerm::Empty => Ok(()),
            WordTerm::Lit(l) => {
                out.push(*l);
                Ok(())
            }
            WordTerm::Concat(items) => items.iter().try_for_each(|t| t.push_finite(out)),
            WordTerm::Omega { .. } => Err(Error::InfiniteTerm("contains an ω-power".into())),
            WordTerm::NegOmega { .. } => Err(Error::InfiniteTerm("contains a −ω-power".into())),
            WordTerm::Shuffle(_) => Err(Error::InfiniteTerm("contains a shuffle".into())),
        }
    }

    /// Splits `u v^ω` into `(u, v)` when the term has that shape with finite
    /// `u` and `v`.
    pub fn to_up(&self) -> Option<(FiniteWord, FiniteWord)> {
        let items: Vec<&WordTerm> = match self {
            WordTerm::Concat(items) => items.iter().collect(),
            other => vec![other],
        };
        let (last, init) = items.split_last()?;
        let WordTerm::Omega { prefix, cycle } = last else {
            return None;
        };
        let mut u = Vec::new();
        for t in init.iter().copied().chain(prefix) {
            t.push_finite(&mut u).ok()?;
        }
        let mut v = Vec::new();
        for t in cycle {
            t.push_finite(&mut v).ok()?;
        }
        if v.is_empty() {
            return None;
        }
        Some((u, v))
    }

    pub fn map_letters(&self, f: &impl Fn(Letter) -> Letter) -> WordTerm {
        let map = |items: &[WordTerm]| items.iter().map(|t| t.map_letters(f)).collect();
        match self {
            WordTerm::Empty => WordTerm::Empty,
            WordTerm::Lit(l) => WordTerm::Lit(f(*l)),
            WordTerm::Concat(items) => WordTerm::Concat(map(items)),
            WordTerm::Omega { prefix, cycle } => WordTerm::Omega {
                prefix: map(prefix),
                cycle: map(cycle),
            },
            WordTerm::NegOmega { cycle, suffix } => WordTerm::NegOmega {
                cycle: map(cycle),
                suffix: map(suffix),
            },
            WordTerm::Shuffle(bodies) => WordTerm::Shuffle(map(bodies)),
        }
    }

    /// Distinct letters occurring in the term, sorted.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_letters(&self, out: &mut Vec<Letter>) {
        match self {
            WordTerm::Empty => {}
            WordTerm::Lit(l) => out.push(*l),
            WordTerm::Concat(items) | WordTerm::Shuffle(items) => {
                items.iter().for_each(|t| t.collect_letters(out))
            }
            WordTerm::Omega { prefix, cycle } | WordTerm::NegOmega { cycle, suffix: prefix } => {
                prefix.iter().chain(cycle).for_each(|t| t.collect_letters(out))
            }
        }
    }

    /// Renders in the word-term grammar, so that the output parses back
    /// over the same alphabet.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        match self {
            WordTerm::Empty => "()".into(),
            WordTerm::Concat(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .filter(|t| !matches!(t, WordTerm::Empty))
                    .map(|t| t.render_factor(alphabet))
                    .collect();
                if parts.is_empty() {
                    "()".into()
                } else {
                    parts.join(" ")
                }
            }
            _ => self.render_factor(alphabet),
        }
    }

    fn render_factor(&self, alphabet: &Alphabet) -> String {
        match self {
            WordTerm::Empty => "()".into(),
            WordTerm::Lit(l) => alphabet.render_letter(*l),
            WordTerm::Concat(_) => format!("({})", self.render(alphabet)),
            WordTerm::Omega { prefix, cycle } => {
                let mut parts: Vec<String> = prefix.iter().map(|t| t.render_factor(alphabet)).collect();
                parts.push(format!("{}^w", render_power_body(cycle, alphabet)));
                parts.join(" ")
            }
            WordTerm::NegOmega { cycle, suffix } => {
                let mut parts = vec![format!("{}^-w", render_power_body(cycle, alphabet))];
                parts.extend(suffix.iter().map(|t| t.render_factor(alphabet)));
                parts.join(" ")
            }
            WordTerm::Shuffle(bodies) => {
                let parts: Vec<String> = bodies.iter().map(|t| t.render(alphabet)).collect();
                format!("sh({})", parts.join(", "))
            }
        }
    }

    /// Rewrites to a canonical equivalent for display: flattens
    /// concatenations, drops empty factors, replaces finite cycles by their
    /// primitive root and folds factors adjacent to a power into its cycle.
    pub fn simplify(&self) -> WordTerm {
        let mut items = Vec::new();
        self.simplified_factors(&mut items);
        fold_into_powers(&mut items);
        WordTerm::concat(items)
    }

    fn simplified_factors(&self, out: &mut Vec<WordTerm>) {
        match self {
            WordTerm::Empty => {}
            WordTerm::Lit(_) => out.push(self.clone()),
            WordTerm::Concat(items) => items.iter().for_each(|t| t.simplified_factors(out)),
            WordTerm::Omega { prefix, cycle } => {
                prefix.iter().for_each(|t| t.simplified_factors(out));
                out.push(WordTerm::Omega {
                    prefix: vec![],
                    cycle: simplify_cycle(cycle),
                });
            }
            WordTerm::NegOmega { cycle, suffix } => {
                out.push(WordTerm::NegOmega {
                    cycle: simplify_cycle(cycle),
                    suffix: vec![],
                });
                suffix.iter().for_each(|t| t.simplified_factors(out));
            }
            WordTerm::Shuffle(bodies) => {
                out.push(WordTerm::Shuffle(bodies.iter().map(WordTerm::simplify).collect()))
            }
        }
    }
}

fn render_power_body(cycle: &[WordTerm], alphabet: &Alphabet) -> String {
    let factors: Vec<&WordTerm> = cycle
        .iter()
        .filter(|t| !matches!(t, WordTerm::Empty))
        .collect();
    match factors.as_slice() {
        [WordTerm::Lit(l)] => alphabet.render_letter(*l),
        [WordTerm::Shuffle(_)] => factors[0].render_factor(alphabet),
        [WordTerm::Concat(items)] => render_power_body(items, alphabet),
        _ => {
            let parts: Vec<String> = factors.iter().map(|t| t.render_factor(alphabet)).collect();
            format!("({})", parts.join(" "))
        }
    }
}

fn simplify_cycle(cycle: &[WordTerm]) -> Vec<WordTerm> {
    let mut factors = Vec::new();
    for t in cycle {
        t.simplified_factors(&mut factors);
    }
    fold_into_powers(&mut factors);
    let n = factors.len();
    for d in 1..n {
        if n % d == 0 && (d..n).all(|i| factors[i] == factors[i - d]) {
            factors.truncate(d);
            break;
        }
    }
    factors
}

/// `x (y x)^ω` becomes `(x y)^ω`; `(x y)^-ω x` becomes `(y x)^-ω`.
fn fold_into_powers(items: &mut Vec<WordTerm>) {
    let mut i = 0;
    while i < items.len() {
        let absorb_left = i > 0
            && matches!(&items[i], WordTerm::Omega { cycle, .. } if cycle.last() == Some(&items[i - 1]));
        if absorb_left {
            if let WordTerm::Omega { cycle, .. } = &mut items[i] {
                cycle.rotate_right(1);
            }
            items.remove(i - 1);
            i -= 1;
            continue;
        }
        let absorb_right = i + 1 < items.len()
            && matches!(&items[i], WordTerm::NegOmega { cycle, .. } if cycle.first() == Some(&items[i + 1]));
        if absorb_right {
            if let WordTerm::NegOmega { cycle, .. } = &mut items[i] {
                cycle.rotate_left(1);
            }
            items.remove(i + 1);
            continue;
        }
        i += 1;
    }
}

/// Reversal: concatenations flip and ω-powers become −ω-powers.
pub fn reverse_term(t: &WordTerm) -> WordTerm {
    let rev = |items: &[WordTerm]| items.iter().rev().map(reverse_term).collect();
    match t {
        WordTerm::Empty => WordTerm::Empty,
        WordTerm::Lit(l) => WordTerm::Lit(*l),
        WordTerm::Concat(items) => WordTerm::Concat(rev(items)),
        WordTerm::Omega { prefix, cycle } => WordTerm::NegOmega {
            cycle: rev(cycle),
            suffix: rev(prefix),
        },
        WordTerm::NegOmega { cycle, suffix } => WordTerm::Omega {
            prefix: rev(suffix),
            cycle: rev(cycle),
        },
        WordTerm::Shuffle(bodies) => WordTerm::Shuffle(bodies.iter().map(reverse_term).collect()),
    }
}

/// Letterwise pairing of two terms of identical shape.
pub fn zip_terms(t1: &WordTerm, t2: &WordTerm, left_size: u32) -> Result<WordTerm> {
    let zip_all = |a: &[WordTerm], b: &[WordTerm]| -> Result<Vec<WordTerm>> {
        if a.len() != b.len() {
            return Err(Error::Shape(format!(
                "factor counts differ ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        a.iter()
            .zip(b)
            .map(|(x, y)| zip_terms(x, y, left_size))
            .collect()
    };
    match (t1, t2) {
        (WordTerm::Empty, WordTerm::Empty) => Ok(WordTerm::Empty),
        (WordTerm::Lit(a), WordTerm::Lit(b)) => Ok(WordTerm::Lit(pair_letter(*a, *b, left_size))),
        (WordTerm::Concat(a), WordTerm::Concat(b)) => Ok(WordTerm::Concat(zip_all(a, b)?)),
        (WordTerm::Omega { prefix: p1, cycle: c1 }, WordTerm::Omega { prefix: p2, cycle: c2 }) => {
            Ok(WordTerm::Omega {
                prefix: zip_all(p1, p2)?,
                cycle: zip_all(c1, c2)?,
            })
        }
        (
            WordTerm::NegOmega { cycle: c1, suffix: s1 },
            WordTerm::NegOmega { cycle: c2, suffix: s2 },
        ) => Ok(WordTerm::NegOmega {
            cycle: zip_all(c1, c2)?,
            suffix: zip_all(s1, s2)?,
        }),
        (WordTerm::Shuffle(a), WordTerm::Shuffle(b)) => Ok(WordTerm::Shuffle(zip_all(a, b)?)),
        _ => Err(Error::Shape(format!(
            "cannot pair {} with {}",
            t1.kind_name(),
            t2.kind_name()
        ))),
    }
}

/// Inverse of [`zip_terms`].
pub fn unzip_term(t: &WordTerm, left_size: u32) -> (WordTerm, WordTerm) {
    (
        t.map_letters(&|l| split_pair(l, left_size).0),
        t.map_letters(&|l| split_pair(l, left_size).1),
    )
}

impl WordTerm {
    fn kind_name(&self) -> &'static str {
        match self {
            WordTerm::Empty => "the empty term",
            WordTerm::Lit(_) => "a letter",
            WordTerm::Concat(_) => "a concatenation",
            WordTerm::Omega { .. } => "an ω-power",
            WordTerm::NegOmega { .. } => "a −ω-power",
            WordTerm::Shuffle(_) => "a shuffle",
        }
    }
}

/// Proposition names written inside `{...}` letters, in order of first
/// appearance. Used to build an alphabet before parsing.
pub fn props_in_text(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut inside = false;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '{' => inside = true,
            '}' | ',' if inside => {
                let name = current.trim().to_string();
                if !name.is_empty() && !out.contains(&name) {
                    out.push(name);
                }
                current.clear();
                if c == '}' {
                    inside = false;
                }
            }
            _ if inside => current.push(c),
            _ => {}
        }
    }
    out
}

/// Parses a word term over `alphabet`. Empty text denotes the empty word.
pub fn parse_term(text: &str, alphabet: &Alphabet) -> Result<WordTerm> {
    let mut p = TermParser {
        src: text,
        pos: 0,
        alphabet,
    };
    p.skip_ws();
    if p.at_end() {
        return Ok(WordTerm::Empty);
    }
    let t = p.term()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected input"));
    }
    t.check(alphabet)?;
    Ok(t)
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl TermParser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::syntax(self.pos, message)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn starts_factor(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), Some(c) if c == '{' || c == '(' || c == '<' || c == '0' || c == '1' || c.is_ascii_alphabetic() || c == '_')
    }

    fn term(&mut self) -> Result<WordTerm> {
        let mut items = Vec::new();
        while self.starts_factor() {
            items.push(self.factor()?);
        }
        if items.is_empty() {
            return Err(self.error("expected a letter, `(` or `sh(`"));
        }
        Ok(WordTerm::concat(items))
    }

    fn factor(&mut self) -> Result<WordTerm> {
        let mut t = self.primary()?;
        loop {
            self.skip_ws();
            let rest = &self.src[self.pos..];
            if rest.starts_with("^w") {
                self.pos += 2;
                t = WordTerm::omega(t);
            } else if rest.starts_with("^-w") {
                self.pos += 3;
                t = WordTerm::neg_omega(t);
            } else if rest.starts_with('^') {
                return Err(self.error("expected `^w` or `^-w`"));
            } else {
                return Ok(t);
            }
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }

    fn primary(&mut self) -> Result<WordTerm> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('{') => self.props_letter().map(WordTerm::Lit),
            Some('<') => self.bits_letter().map(WordTerm::Lit),
            Some('(') => {
                if let Some(l) = self.try_tuple_letter()? {
                    return Ok(WordTerm::Lit(l));
                }
                self.pos = start + 1;
                self.skip_ws();
                if self.peek() == Some(')') {
                    self.pos += 1;
                    return Ok(WordTerm::Empty);
                }
                let t = self.term()?;
                self.expect(')')?;
                Ok(t)
            }
            Some('0') | Some('1') if matches!(self.alphabet, Alphabet::Bits(1)) => {
                let bit = self.peek() == Some('1');
                self.pos += 1;
                Ok(WordTerm::Lit(Letter(bit as u32)))
            }
            Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
                let name = self.ident();
                if name == "sh" && self.src[self.pos..].starts_with('(') {
                    self.pos += 1;
                    let mut bodies = vec![self.term()?];
                    loop {
                        self.skip_ws();
                        match self.peek() {
                            Some(',') => {
                                self.pos += 1;
                                bodies.push(self.term()?);
                            }
                            Some(')') => {
                                self.pos += 1;
                                return Ok(WordTerm::Shuffle(bodies));
                            }
                            _ => return Err(self.error("expected `,` or `)` in shuffle")),
                        }
                    }
                }
                self.symbol(&name, start).map(WordTerm::Lit)
            }
            _ => Err(Error::syntax(start, "expected a letter, `(` or `sh(`")),
        }
    }

    fn symbol(&self, name: &str, start: usize) -> Result<Letter> {
        match self.alphabet {
            Alphabet::Symbols(names) => names
                .iter()
                .position(|n| n == name)
                .map(|i| Letter(i as u32))
                .ok_or_else(|| Error::syntax(start, format!("unknown symbol `{name}`"))),
            other => Err(Error::syntax(
                start,
                format!("`{name}` is not a letter of `{other}`"),
            )),
        }
    }

    fn props_letter(&mut self) -> Result<Letter> {
        let start = self.pos;
        self.pos += 1;
        let mut names = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.pos += 1;
                    break;
                }
                Some(',') if !names.is_empty() => self.pos += 1,
                Some(c) if c.is_ascii_alphabetic() || c == '_' => names.push(self.ident()),
                _ => return Err(self.error("expected a proposition or `}`")),
            }
        }
        match self.alphabet {
            Alphabet::Props(_) => self.alphabet.props_letter(&names).ok_or_else(|| {
                Error::syntax(start, format!("letter mentions a proposition outside `{}`", self.alphabet))
            }),
            other => Err(Error::syntax(start, format!("`{{..}}` is not a letter of `{other}`"))),
        }
    }

    fn bits_letter(&mut self) -> Result<Letter> {
        let start = self.pos;
        self.pos += 1;
        let bits = self.bit_list('>')?;
        match self.alphabet {
            Alphabet::Bits(k) if *k == bits.len() => Ok(bits_to_letter(&bits)),
            other => Err(Error::syntax(start, format!("bit tuple is not a letter of `{other}`"))),
        }
    }

    fn bit_list(&mut self, close: char) -> Result<Vec<bool>> {
        let mut bits = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('0') | Some('1') => {
                    bits.push(self.peek() == Some('1'));
                    self.pos += 1;
                }
                _ => return Err(self.error("expected `0` or `1`")),
            }
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(bits);
                }
                _ => return Err(self.error(format!("expected `,` or `{close}`"))),
            }
        }
    }

    /// `(x,y)` letters of pair alphabets and `(b1,..,bk)` bit tuples.
    /// Returns `None` (without consuming) when the parenthesis is a group.
    fn try_tuple_letter(&mut self) -> Result<Option<Letter>> {
        let start = self.pos;
        match self.alphabet {
            Alphabet::Bits(k) if *k >= 2 => {
                self.pos += 1;
                let letter = self.bit_list(')').ok().filter(|b| b.len() == *k).map(|b| bits_to_letter(&b));
                if letter.is_none() {
                    self.pos = start;
                }
                Ok(letter)
            }
            Alphabet::Pair(a, b) => {
                self.pos += 1;
                let attempt = (|| -> Result<Letter> {
                    let x = TermParser { src: self.src, pos: self.pos, alphabet: a };
                    let (x, pos) = x.single_letter()?;
                    self.pos = pos;
                    self.expect(',')?;
                    let y = TermParser { src: self.src, pos: self.pos, alphabet: b };
                    let (y, pos) = y.single_letter()?;
                    self.pos = pos;
                    self.expect(')')?;
                    Ok(pair_letter(x, y, a.size()))
                })();
                match attempt {
                    Ok(l) => Ok(Some(l)),
                    Err(_) => {
                        self.pos = start;
                        Ok(None)
                    }
                }
            }
            _ => Ok(None),
        }
    }

    fn single_letter(mut self) -> Result<(Letter, usize)> {
        match self.primary()? {
            WordTerm::Lit(l) => Ok((l, self.pos)),
            _ => Err(self.error("expected a single letter")),
        }
    }
}

fn bits_to_letter(bits: &[bool]) -> Letter {
    Letter(
        bits.iter()
            .enumerate()
            .map(|(i, &b)| (b as u32) << i)
            .sum(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::props(&["a", "b"])
    }

    #[test]
    fn parses_and_renders_props_terms() {
        let al = Alphabet::props(&["a"]);
        let t = parse_term("{a} {}^w {a} {}^w {a}", &al).unwrap();
        assert_eq!(t.render(&al), "{a} {}^w {a} {}^w {a}");
        let u = parse_term("({a} {})^w", &al).unwrap();
        assert_eq!(
            u,
            WordTerm::omega(WordTerm::Concat(vec![WordTerm::Lit(Letter(1)), WordTerm::Lit(Letter(0))]))
        );
        assert_eq!(u.render(&al), "({a} {})^w");
    }

    #[test]
    fn bit_tuples() {
        let al = Alphabet::Bits(2);
        let t = parse_term("<1,0> (0,1)", &al).unwrap();
        assert_eq!(t.to_finite().unwrap(), vec![Letter(1), Letter(2)]);
        assert_eq!(t.render(&al), "<1,0> <0,1>");
        let g = parse_term("(<1,0> <0,1>)^w", &al).unwrap();
        assert!(matches!(g, WordTerm::Omega { .. }));
    }

    #[test]
    fn reverse_examples() {
        let al = Alphabet::Symbols(vec!["a".into(), "b".into()]);
        let t = parse_term("a b^w", &al).unwrap();
        assert_eq!(reverse_term(&t).render(&al), "b^-w a");
        let s = parse_term("sh(a,b)", &al).unwrap();
        assert_eq!(reverse_term(&reverse_term(&s)), s);
        assert_eq!(reverse_term(&WordTerm::Empty), WordTerm::Empty);
    }

    #[test]
    fn to_finite_examples() {
        let al = Alphabet::Symbols(vec!["a".into(), "b".into(), "c".into()]);
        let t = parse_term("a (b c)", &al).unwrap();
        assert_eq!(t.to_finite().unwrap(), vec![Letter(0), Letter(1), Letter(2)]);
        let w = parse_term("a^w", &al).unwrap();
        assert!(matches!(w.to_finite(), Err(Error::InfiniteTerm(_))));
        assert_eq!(WordTerm::Empty.to_finite().unwrap(), vec![]);
        assert_eq!(parse_term("", &al).unwrap(), WordTerm::Empty);
    }

    #[test]
    fn zip_examples() {
        let bit = Alphabet::bit();
        let one = parse_term("1^w", &bit).unwrap();
        let zero = parse_term("0^w", &bit).unwrap();
        let z = zip_terms(&one, &zero, 2).unwrap();
        assert_eq!(z.render(&Alphabet::Bits(2)), "<1,0>^w");
        let x = parse_term("1 0", &bit).unwrap();
        let y = parse_term("0 1", &bit).unwrap();
        assert_eq!(zip_terms(&x, &y, 2).unwrap().render(&Alphabet::Bits(2)), "<1,0> <0,1>");
        let aa = parse_term("1 1", &bit).unwrap();
        assert!(matches!(zip_terms(&one, &aa, 2), Err(Error::Shape(_))));
        assert_eq!(unzip_term(&zip_terms(&x, &y, 2).unwrap(), 2), (x, y));
    }

    #[test]
    fn simplify_folds_cycles() {
        let bit = Alphabet::bit();
        let t = WordTerm::Concat(vec![
            WordTerm::Lit(Letter(0)),
            WordTerm::Omega {
                prefix: vec![WordTerm::Lit(Letter(1))],
                cycle: vec![WordTerm::Lit(Letter(1)), WordTerm::Lit(Letter(1))],
            },
            WordTerm::Lit(Letter(0)),
        ]);
        assert_eq!(t.simplify().render(&bit), "0 1^w 0");
        let c = WordTerm::omega(WordTerm::Concat(vec![WordTerm::Lit(Letter(0)), WordTerm::Lit(Letter(0))]));
        assert_eq!(c.simplify().render(&bit), "0^w");
        let n = WordTerm::Concat(vec![
            WordTerm::NegOmega {
                cycle: vec![WordTerm::Lit(Letter(1)), WordTerm::Lit(Letter(0))],
                suffix: vec![],
            },
            WordTerm::Lit(Letter(1)),
        ]);
        assert_eq!(n.simplify().render(&bit), "(0 1)^-w");
    }

    #[test]
    fn props_scan() {
        assert_eq!(props_in_text("{b} {a,b}^w {}"), vec!["b", "a"]);
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(parse_term("{a} {c}", &ab()).is_err());
        assert!(parse_term("()^w", &ab()).is_err());
        assert!(parse_term("{a}^x", &ab()).is_err());
        assert!(parse_term("sh()", &ab()).is_err());
    }

    #[test]
    fn up_split() {
        let al = ab();
        let t = parse_term("{a} ({b} {})^w", &al).unwrap();
        assert_eq!(t.to_up(), Some((vec![Letter(1)], vec![Letter(2), Letter(0)])));
        assert_eq!(parse_term("{a}^w {b}", &al).unwrap().to_up(), None);
    }
}
