//! Regular expressions over tuple letters.
//!
//! Letters are bare digits for one track (`0`, `1`) or bracketed tuples
//! (`[0,1]`). Operators: concatenation, `|`, `*`, `?`, and `+`. A `+` sitting
//! between two operands is alternation, as in `(0+1)*`; elsewhere it is the
//! postfix one-or-more operator.

use std::collections::HashMap;
use std::sync::Arc;

use super::{alphabet_size, encode_letter, Automaton, RawDfa};
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Empty,
    Letter(usize),
    Concat(Box<Regex>, Box<Regex>),
    Alt(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    fn concat(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, b) => b,
            (a, Regex::Empty) => a,
            (a, b) => Regex::Concat(Box::new(a), Box::new(b)),
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    radix: usize,
    arity: usize,
    alphabets: Option<&'a [Vec<u8>]>,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Regex {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn starts_operand(c: Option<char>) -> bool {
        matches!(c, Some(c) if c.is_ascii_digit() || c == '[' || c == '(')
    }

    /// Whether the `+` at the current position separates two operands.
    fn plus_is_alternation(&mut self) -> bool {
        let save = self.pos;
        self.pos += 1;
        let next = self.peek();
        self.pos = save;
        Self::starts_operand(next)
    }

    fn alternation(&mut self) -> Result<Regex> {
        let mut left = self.concatenation()?;
        loop {
            match self.peek() {
                Some('|') => {
                    self.pos += 1;
                }
                Some('+') if self.plus_is_alternation() => {
                    self.pos += 1;
                }
                _ => return Ok(left),
            }
            let right = self.concatenation()?;
            left = Regex::Alt(Box::new(left), Box::new(right));
        }
    }

    fn concatenation(&mut self) -> Result<Regex> {
        let mut acc = Regex::Empty;
        while Self::starts_operand(self.peek()) {
            let item = self.postfix()?;
            acc = Regex::concat(acc, item);
        }
        Ok(acc)
    }

    fn postfix(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    r = Regex::Star(Box::new(r));
                }
                Some('?') => {
                    self.pos += 1;
                    r = Regex::Alt(Box::new(r), Box::new(Regex::Empty));
                }
                Some('+') if !self.plus_is_alternation() => {
                    self.pos += 1;
                    r = Regex::concat(r.clone(), Regex::Star(Box::new(r)));
                }
                _ => return Ok(r),
            }
        }
    }

    fn atom(&mut self) -> Result<Regex> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.alternation()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('[') => {
                self.pos += 1;
                let mut digits = Vec::new();
                loop {
                    self.skip_ws();
                    let start = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if start == self.pos {
                        return Err(self.error("expected a digit"));
                    }
                    let text: String = self.chars[start..self.pos].iter().collect();
                    let d: u8 = text
                        .parse()
                        .map_err(|_| self.error(format!("digit {text} too large")))?;
                    digits.push((d, start));
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected ',' or ']'")),
                    }
                }
                self.letter(&digits)
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                self.pos += 1;
                self.letter(&[(c as u8 - b'0', at)])
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of pattern")),
        }
    }

    fn letter(&self, digits: &[(u8, usize)]) -> Result<Regex> {
        if digits.len() != self.arity {
            return Err(Error::Regex {
                pos: digits.first().map_or(self.pos, |d| d.1),
                msg: format!("letter has {} components, expected {}", digits.len(), self.arity),
            });
        }
        for (j, &(d, at)) in digits.iter().enumerate() {
            let allowed = match self.alphabets {
                Some(sets) => sets[j].contains(&d),
                None => (d as usize) < self.radix,
            };
            if !allowed || d as usize >= self.radix {
                return Err(Error::Regex {
                    pos: at,
                    msg: format!("digit {d} is outside the alphabet of track {}", j + 1),
                });
            }
        }
        let plain: Vec<u8> = digits.iter().map(|d| d.0).collect();
        Ok(Regex::Letter(encode_letter(self.radix, &plain)))
    }
}

pub fn parse(
    pattern: &str,
    radix: usize,
    arity: usize,
    alphabets: Option<&[Vec<u8>]>,
) -> Result<Regex> {
    if let Some(sets) = alphabets {
        if sets.len() != arity {
            return Err(Error::Regex {
                pos: 0,
                msg: format!("{} alphabets given for {arity} tracks", sets.len()),
            });
        }
    }
    let mut p = Parser {
        chars: pattern.chars().collect(),
        pos: 0,
        radix,
        arity,
        alphabets,
    };
    let r = p.alternation()?;
    if p.peek().is_some() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(r)
}

/// Thompson NFA: `eps[s]` epsilon successors, `edges[s]` labelled ones.
#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<u32>>,
    edges: Vec<Vec<(usize, u32)>>,
}

impl Nfa {
    fn add(&mut self) -> u32 {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() as u32 - 1
    }

    /// Returns (entry, exit).
    fn build(&mut self, r: &Regex) -> (u32, u32) {
        match r {
            Regex::Empty => {
                let s = self.add();
                (s, s)
            }
            Regex::Letter(l) => {
                let (a, b) = (self.add(), self.add());
                self.edges[a as usize].push((*l, b));
                (a, b)
            }
            Regex::Concat(x, y) => {
                let (a, b) = self.build(x);
                let (c, d) = self.build(y);
                self.eps[b as usize].push(c);
                (a, d)
            }
            Regex::Alt(x, y) => {
                let (s, t) = (self.add(), self.add());
                let (a, b) = self.build(x);
                let (c, d) = self.build(y);
                self.eps[s as usize].extend([a, c]);
                self.eps[b as usize].push(t);
                self.eps[d as usize].push(t);
                (s, t)
            }
            Regex::Star(x) => {
                let (s, t) = (self.add(), self.add());
                let (a, b) = self.build(x);
                self.eps[s as usize].extend([a, t]);
                self.eps[b as usize].extend([a, t]);
                (s, t)
            }
        }
    }

    fn closure(&self, mut set: Vec<u32>) -> Vec<u32> {
        let mut seen: std::collections::HashSet<u32> = set.iter().copied().collect();
        let mut stack = set.clone();
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s as usize] {
                if seen.insert(t) {
                    set.push(t);
                    stack.push(t);
                }
            }
        }
        set.sort_unstable();
        set
    }
}

/// Compile a pattern to a minimal automaton (no zero normalization).
pub fn compile(
    system: &Arc<NumerationSystem>,
    arity: usize,
    alphabets: Option<&[Vec<u8>]>,
    pattern: &str,
) -> Result<Automaton> {
    let radix = system.radix();
    let regex = parse(pattern, radix, arity, alphabets)?;
    let mut nfa = Nfa::default();
    let (entry, exit) = nfa.build(&regex);
    let k = alphabet_size(radix, arity);

    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let start = nfa.closure(vec![entry]);
    ids.insert(start.clone(), 0);
    sets.push(start);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut by_letter: Vec<Vec<u32>> = vec![Vec::new(); k];
        for &s in &sets[i] {
            for &(l, t) in &nfa.edges[s as usize] {
                by_letter[l].push(t);
            }
        }
        for targets in by_letter {
            let set = nfa.closure(targets);
            let id = match ids.get(&set) {
                Some(&id) => id,
                None => {
                    let id = sets.len() as u32;
                    ids.insert(set.clone(), id);
                    sets.push(set);
                    id
                }
            };
            trans.push(id);
        }
        i += 1;
    }
    let accepting = sets.iter().map(|s| s.binary_search(&exit).is_ok()).collect();
    Ok(Automaton::from_raw(
        system.clone(),
        arity,
        RawDfa {
            initial: 0,
            trans,
            accepting,
            outputs: None,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alt(a: Regex, b: Regex) -> Regex {
        Regex::Alt(Box::new(a), Box::new(b))
    }

    #[test]
    fn plus_between_operands_is_alternation() {
        let r = parse("0+1", 2, 1, None).unwrap();
        assert_eq!(r, alt(Regex::Letter(0), Regex::Letter(1)));
        let r = parse("1+", 2, 1, None).unwrap();
        assert_eq!(
            r,
            Regex::Concat(
                Box::new(Regex::Letter(1)),
                Box::new(Regex::Star(Box::new(Regex::Letter(1))))
            )
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse("[0,1", 2, 2, None) {
            Err(Error::Regex { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse("(0|2)", 2, 1, None) {
            Err(Error::Regex { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("0)", 2, 1, None).is_err());
    }
}
