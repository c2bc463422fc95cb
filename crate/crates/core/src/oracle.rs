//! Direct evaluation of formulas on finite and ultimately periodic words.
//!
//! Neither kind of word has gaps, so both Stavi connectives are constantly
//! false here.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::words::{Letter, WordTerm};

fn atom_index(p: &str, ap: &[String]) -> Result<usize> {
    ap.iter()
        .position(|x| x == p)
        .ok_or_else(|| Error::UnknownProposition(p.to_string()))
}

/// Truth word of `f` on a finite word over `2^ap`.
pub fn eval_finite(f: &Formula, ap: &[String], w: &[Letter]) -> Result<Vec<bool>> {
    let n = w.len();
    Ok(match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(p) => {
            let i = atom_index(p, ap)?;
            w.iter().map(|l| l.0 >> i & 1 == 1).collect()
        }
        Formula::Not(g) => eval_finite(g, ap, w)?.into_iter().map(|b| !b).collect(),
        Formula::Or(l, r) => {
            let (x, y) = (eval_finite(l, ap, w)?, eval_finite(r, ap, w)?);
            x.iter().zip(&y).map(|(a, b)| *a || *b).collect()
        }
        Formula::Until(l, r) => {
            let (phi, psi) = (eval_finite(l, ap, w)?, eval_finite(r, ap, w)?);
            let mut out = vec![false; n];
            for i in (0..n.saturating_sub(1)).rev() {
                out[i] = psi[i + 1] || (phi[i + 1] && out[i + 1]);
            }
            out
        }
        Formula::Since(l, r) => {
            let (phi, psi) = (eval_finite(l, ap, w)?, eval_finite(r, ap, w)?);
            let mut out = vec![false; n];
            for i in 1..n {
                out[i] = psi[i - 1] || (phi[i - 1] && out[i - 1]);
            }
            out
        }
        Formula::StaviUntil(..) | Formula::StaviSince(..) => {
            f.children().into_iter().try_for_each(|c| eval_finite(c, ap, w).map(drop))?;
            vec![false; n]
        }
    })
}

/// Quadratic evaluator that quantifies over positions literally; a second
/// implementation of the finite semantics.
pub fn eval_naive(f: &Formula, ap: &[String], w: &[Letter]) -> Result<Vec<bool>> {
    (0..w.len()).map(|i| holds_at(f, ap, w, i)).collect()
}

fn holds_at(f: &Formula, ap: &[String], w: &[Letter], i: usize) -> Result<bool> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => w[i].0 >> atom_index(p, ap)? & 1 == 1,
        Formula::Not(g) => !holds_at(g, ap, w, i)?,
        Formula::Or(l, r) => holds_at(l, ap, w, i)? || holds_at(r, ap, w, i)?,
        Formula::Until(l, r) => {
            let mut found = false;
            for j in i + 1..w.len() {
                if holds_at(r, ap, w, j)? {
                    let mut between = true;
                    for k in i + 1..j {
                        between &= holds_at(l, ap, w, k)?;
                    }
                    if between {
                        found = true;
                        break;
                    }
                }
            }
            found
        }
        Formula::Since(l, r) => {
            let mut found = false;
            for j in (0..i).rev() {
                if holds_at(r, ap, w, j)? {
                    let mut between = true;
                    for k in j + 1..i {
                        between &= holds_at(l, ap, w, k)?;
                    }
                    if between {
                        found = true;
                        break;
                    }
                }
            }
            found
        }
        Formula::StaviUntil(..) | Formula::StaviSince(..) => false,
    })
}

/// The ω-word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UpWord<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T: Clone + PartialEq> UpWord<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> UpWord<T> {
        assert!(!cycle.is_empty(), "an ultimately periodic word needs a nonempty cycle");
        UpWord { prefix, cycle }
    }

    pub fn at(&self, i: usize) -> T {
        if i < self.prefix.len() {
            self.prefix[i].clone()
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()].clone()
        }
    }

    /// Same word with the given prefix length and cycle length; `p` must be
    /// at least the current prefix length and `l` a multiple of the cycle.
    pub fn unroll(&self, p: usize, l: usize) -> UpWord<T> {
        debug_assert!(p >= self.prefix.len() && l % self.cycle.len() == 0);
        UpWord {
            prefix: (0..p).map(|i| self.at(i)).collect(),
            cycle: (p..p + l).map(|i| self.at(i)).collect(),
        }
    }

    /// Shortest presentation: primitive cycle, shortest prefix.
    pub fn normalize(&self) -> UpWord<T> {
        let mut cycle = self.cycle.clone();
        let n = cycle.len();
        for d in 1..n {
            if n % d == 0 && (d..n).all(|i| cycle[i] == cycle[i - d]) {
                cycle.truncate(d);
                break;
            }
        }
        let mut prefix = self.prefix.clone();
        while prefix.last().is_some() && prefix.last() == cycle.last() {
            prefix.pop();
            cycle.rotate_right(1);
        }
        UpWord { prefix, cycle }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> UpWord<U> {
        UpWord {
            prefix: self.prefix.iter().map(&f).collect(),
            cycle: self.cycle.iter().map(&f).collect(),
        }
    }
}

impl UpWord<Letter> {
    pub fn to_term(&self) -> WordTerm {
        let mut items: Vec<WordTerm> = self.prefix.iter().map(|&l| WordTerm::Lit(l)).collect();
        items.push(WordTerm::omega(WordTerm::from_finite(&self.cycle)));
        WordTerm::concat(items)
    }

    pub fn from_term(t: &WordTerm) -> Option<UpWord<Letter>> {
        t.to_up().map(|(u, v)| UpWord::new(u, v))
    }
}

impl UpWord<bool> {
    pub fn to_letters(&self) -> UpWord<Letter> {
        self.map(|&b| Letter(b as u32))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn align<T: Clone + PartialEq>(x: &UpWord<T>, y: &UpWord<T>) -> (UpWord<T>, UpWord<T>) {
    let p = x.prefix.len().max(y.prefix.len());
    let (a, b) = (x.cycle.len(), y.cycle.len());
    let l = a / gcd(a, b) * b;
    (x.unroll(p, l), y.unroll(p, l))
}

/// Truth word of `f` on `w`, as a normalized ultimately periodic word.
pub fn eval_up(f: &Formula, ap: &[String], w: &UpWord<Letter>) -> Result<UpWord<bool>> {
    Ok(eval_up_raw(f, ap, w)?.normalize())
}

fn eval_up_raw(f: &Formula, ap: &[String], w: &UpWord<Letter>) -> Result<UpWord<bool>> {
    Ok(match f {
        Formula::True => UpWord::new(vec![], vec![true]),
        Formula::False => UpWord::new(vec![], vec![false]),
        Formula::Atom(p) => {
            let i = atom_index(p, ap)?;
            w.map(|l| l.0 >> i & 1 == 1)
        }
        Formula::Not(g) => eval_up_raw(g, ap, w)?.map(|b| !b),
        Formula::Or(l, r) => {
            let (x, y) = align(&eval_up_raw(l, ap, w)?, &eval_up_raw(r, ap, w)?);
            UpWord::new(
                x.prefix.iter().zip(&y.prefix).map(|(a, b)| *a || *b).collect(),
                x.cycle.iter().zip(&y.cycle).map(|(a, b)| *a || *b).collect(),
            )
        }
        Formula::Until(l, r) => {
            let (phi, psi) = align(&eval_up_raw(l, ap, w)?, &eval_up_raw(r, ap, w)?);
            let (p, len) = (phi.prefix.len(), phi.cycle.len());
            // Past position p the operands repeat with period `len`, so the
            // first ψ after i, if any, lies before max(i + 1, p) + len.
            let value = |i: usize| {
                let horizon = (i + 1).max(p) + len;
                match (i + 1..horizon).find(|&j| psi.at(j)) {
                    Some(j) => (i + 1..j).all(|k| phi.at(k)),
                    None => false,
                }
            };
            UpWord::new((0..p).map(value).collect(), (p..p + len).map(value).collect())
        }
        Formula::Since(l, r) => {
            let (phi, psi) = align(&eval_up_raw(l, ap, w)?, &eval_up_raw(r, ap, w)?);
            let (p, len) = (phi.prefix.len(), phi.cycle.len());
            // Each period maps the running value through a constant or the
            // identity, so the result repeats from p + len on.
            let total = p + 2 * len;
            let mut out = vec![false; total];
            for i in 1..total {
                out[i] = psi.at(i - 1) || (phi.at(i - 1) && out[i - 1]);
            }
            let cycle = out.split_off(p + len);
            UpWord::new(out, cycle)
        }
        Formula::StaviUntil(..) | Formula::StaviSince(..) => {
            f.children().into_iter().try_for_each(|c| eval_up_raw(c, ap, w).map(drop))?;
            UpWord::new(vec![], vec![false])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_surface, parse_unchecked};

    fn ap(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn bits(v: &[bool]) -> String {
        v.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn finite_examples() {
        let a = ap(&["a", "b"]);
        let f = parse_unchecked("!a & G !X a").unwrap();
        assert_eq!(bits(&eval_finite(&f, &a, &[Letter(1), Letter(0)]).unwrap()), "01");
        let u = parse_unchecked("a U b").unwrap();
        assert_eq!(bits(&eval_finite(&u, &a, &[Letter(1), Letter(1), Letter(2)]).unwrap()), "110");
        let s = parse_unchecked("a U' b").unwrap();
        assert_eq!(bits(&eval_finite(&s, &a, &[Letter(3), Letter(2)]).unwrap()), "00");
    }

    #[test]
    fn strict_and_non_strict_until_differ() {
        let a = ap(&["a", "b"]);
        let strict = parse_unchecked("a U b").unwrap();
        let loose = parse_surface("a Uns b").unwrap().desugar();
        let w = [Letter(2)];
        assert_eq!(eval_finite(&strict, &a, &w).unwrap(), vec![false]);
        assert_eq!(eval_finite(&loose, &a, &w).unwrap(), vec![true]);
    }

    #[test]
    fn up_examples() {
        let b = ap(&["b"]);
        let f = parse_unchecked("F b").unwrap();
        let w = UpWord::new(vec![], vec![Letter(1)]);
        assert_eq!(eval_up(&f, &b, &w).unwrap(), UpWord::new(vec![], vec![true]));
        let a = ap(&["a"]);
        let g = parse_unchecked("G a").unwrap();
        let w = UpWord::new(vec![], vec![Letter(1), Letter(0)]);
        assert_eq!(eval_up(&g, &a, &w).unwrap(), UpWord::new(vec![], vec![false]));
        let s = parse_unchecked("a U' a").unwrap();
        assert_eq!(eval_up(&s, &a, &w).unwrap(), UpWord::new(vec![], vec![false]));
    }

    #[test]
    fn since_stabilizes_after_one_period() {
        let a = ap(&["a", "b"]);
        let f = parse_unchecked("a S b").unwrap();
        // b once, then a forever: true from position 1 on.
        let w = UpWord::new(vec![Letter(2)], vec![Letter(1)]);
        assert_eq!(eval_up(&f, &a, &w).unwrap(), UpWord::new(vec![false], vec![true]));
        // a fails once per period: true exactly right after each b.
        let w = UpWord::new(vec![], vec![Letter(2), Letter(0)]);
        assert_eq!(eval_up(&f, &a, &w).unwrap(), UpWord::new(vec![], vec![false, true]));
    }

    #[test]
    fn normalize_shortens() {
        let w = UpWord::new(vec![1, 2, 1, 2], vec![1, 2, 1, 2]);
        assert_eq!(w.normalize(), UpWord::new(vec![], vec![1, 2]));
    }
}
