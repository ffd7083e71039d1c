//! Command syntax.
//!
//! ```text
//! ost <name> [0] [a_1 ... a_m]
//! def <name> "<formula>"
//! def <name> {digits}... "<regex>"
//! reg <name> [?msd_<sys>] {digits}... "<regex>"
//! eval <name> "<sentence>"
//! combine <name> <pred>[=<value>]...
//! shift <name> [?msd_<sys>]
//! beatty <name> [?msd_<sys>] a b c d e [from <k>]
//! basis <name> [?msd_<sys>] a b c d e cap <h> [from <k>]
//! info <name>
//! enum <name> <k>
//! export-dot <name> [<path>]
//! expect <name> TRUE | FALSE
//! expect <name> states <n>
//! expect <name> values <v_0> <v_1> ...
//! expect <name> outputs <v_0> <v_1> ...
//! expect <name> outputs-in <v>...
//! expect <name> beatty a b c d e [from <k>] [upto <n>]
//! expect <name> order <h> [except <x>...]
//! ```

use crate::error::CliError;
use crate::script::{tokenize, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Ost {
        name: String,
        period: Vec<u64>,
    },
    Def {
        name: String,
        formula: String,
    },
    Regex {
        name: String,
        system: Option<String>,
        alphabets: Option<Vec<Vec<u8>>>,
        arity: usize,
        pattern: String,
    },
    Eval {
        name: String,
        formula: String,
    },
    Combine {
        name: String,
        parts: Vec<(String, i64)>,
    },
    Shift {
        name: String,
        system: Option<String>,
    },
    Beatty {
        name: String,
        system: Option<String>,
        spec: [i64; 5],
        first_index: u64,
    },
    Basis {
        name: String,
        system: Option<String>,
        spec: [i64; 5],
        cap: usize,
        first_index: u64,
    },
    Info {
        name: String,
    },
    Enum {
        name: String,
        count: usize,
    },
    ExportDot {
        name: String,
        path: Option<String>,
    },
    Expect {
        name: String,
        what: Expectation,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    Truth(bool),
    States(usize),
    Values(Vec<u64>),
    Outputs(Vec<i64>),
    OutputsIn(Vec<i64>),
    Beatty {
        spec: [i64; 5],
        first_index: u64,
        upto: u64,
    },
    Order {
        order: usize,
        exceptional: Vec<u64>,
    },
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |v: &[String]| v.join(" ");
        match self {
            Expectation::Truth(t) => write!(f, "{}", if *t { "TRUE" } else { "FALSE" }),
            Expectation::States(n) => write!(f, "states {n}"),
            Expectation::Values(v) => {
                write!(f, "values {}", list(&v.iter().map(u64::to_string).collect::<Vec<_>>()))
            }
            Expectation::Outputs(v) => {
                write!(f, "outputs {}", list(&v.iter().map(i64::to_string).collect::<Vec<_>>()))
            }
            Expectation::OutputsIn(v) => {
                write!(f, "outputs-in {}", list(&v.iter().map(i64::to_string).collect::<Vec<_>>()))
            }
            Expectation::Beatty {
                spec: [a, b, c, d, e],
                first_index,
                upto,
            } => write!(f, "beatty {a} {b} {c} {d} {e} from {first_index} upto {upto}"),
            Expectation::Order { order, exceptional } => {
                write!(f, "order {order}")?;
                if !exceptional.is_empty() {
                    let ex: Vec<String> = exceptional.iter().map(u64::to_string).collect();
                    write!(f, " except {}", list(&ex))?;
                }
                Ok(())
            }
        }
    }
}

impl Command {
    pub fn name(&self) -> &str {
        match self {
            Command::Ost { name, .. }
            | Command::Def { name, .. }
            | Command::Regex { name, .. }
            | Command::Eval { name, .. }
            | Command::Combine { name, .. }
            | Command::Shift { name, .. }
            | Command::Beatty { name, .. }
            | Command::Basis { name, .. }
            | Command::Info { name }
            | Command::Enum { name, .. }
            | Command::ExportDot { name, .. }
            | Command::Expect { name, .. } => name,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Command(msg.into())
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<String, CliError> {
        match self.next() {
            Some(Token::Word(w)) => Ok(w),
            _ => Err(bad(format!("expected {what}"))),
        }
    }

    fn quoted(&mut self, what: &str) -> Result<String, CliError> {
        match self.next() {
            Some(Token::Quoted(q)) => Ok(q),
            _ => Err(bad(format!("expected {what} in double quotes"))),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, CliError> {
        let w = self.word(what)?;
        w.parse()
            .map_err(|_| bad(format!("expected {what}, found `{w}`")))
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Token::Word(w)) if w == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Optional `?msd_<name>` (or `msd_<name>`).
    fn system(&mut self) -> Option<String> {
        if let Some(Token::Word(w)) = self.peek() {
            let w = w.strip_prefix('?').unwrap_or(w);
            if let Some(name) = w.strip_prefix("msd_") {
                let name = name.to_string();
                self.pos += 1;
                return Some(name);
            }
        }
        None
    }

    fn spec(&mut self) -> Result<[i64; 5], CliError> {
        let mut out = [0i64; 5];
        for (slot, label) in out.iter_mut().zip(["a", "b", "c", "d", "e"]) {
            *slot = self.number(label)?;
        }
        Ok(out)
    }

    fn rest_numbers<T: std::str::FromStr>(&mut self, what: &str) -> Result<Vec<T>, CliError> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            out.push(self.number(what)?);
        }
        Ok(out)
    }

    fn end(&self) -> Result<(), CliError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(bad(format!("unexpected {t:?}"))),
        }
    }
}

fn digits_list(body: &str) -> Result<Vec<u8>, CliError> {
    body.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| bad(format!("bad digit `{s}`"))))
        .collect()
}

/// Number of tracks implied by the first tuple letter of a pattern.
fn pattern_arity(pattern: &str) -> usize {
    match pattern.find('[') {
        Some(i) => {
            let end = pattern[i..].find(']').map_or(pattern.len(), |j| i + j);
            pattern[i..end].matches(',').count() + 1
        }
        None => 1,
    }
}

fn regex_tail(c: &mut Cursor, name: String) -> Result<Command, CliError> {
    let system = c.system();
    let mut alphabets = Vec::new();
    while let Some(Token::Brace(b)) = c.peek() {
        let b = b.clone();
        c.pos += 1;
        alphabets.push(digits_list(&b)?);
    }
    let pattern = c.quoted("a regular expression")?;
    c.end()?;
    let (arity, alphabets) = if alphabets.is_empty() {
        (pattern_arity(&pattern), None)
    } else {
        (alphabets.len(), Some(alphabets))
    };
    Ok(Command::Regex {
        name,
        system,
        alphabets,
        arity,
        pattern,
    })
}

pub fn parse(text: &str) -> Result<Command, CliError> {
    let mut c = Cursor {
        toks: tokenize(text)?,
        pos: 0,
    };
    let verb = c.word("a command")?;
    let name = c.word("a name")?;
    let cmd = match verb.as_str() {
        "ost" => {
            let mut groups = Vec::new();
            while let Some(Token::Bracket(b)) = c.peek() {
                groups.push(b.clone());
                c.pos += 1;
            }
            c.end()?;
            let numbers = |s: &str| -> Result<Vec<u64>, CliError> {
                s.split_whitespace()
                    .map(|w| w.parse().map_err(|_| bad(format!("bad quotient `{w}`"))))
                    .collect()
            };
            let (prefix, period) = match groups.as_slice() {
                [p] => (Vec::new(), numbers(p)?),
                [pre, p] => (numbers(pre)?, numbers(p)?),
                _ => return Err(bad("usage: ost <name> [0] [a_1 ... a_m]")),
            };
            if !(prefix.is_empty() || prefix == [0]) {
                return Err(bad(
                    "only purely periodic expansions [0; a_1, ..., a_m, ...] are supported",
                ));
            }
            Command::Ost { name, period }
        }
        "def" => match c.peek() {
            Some(Token::Quoted(_)) => {
                let formula = c.quoted("a formula")?;
                c.end()?;
                Command::Def { name, formula }
            }
            _ => regex_tail(&mut c, name)?,
        },
        "reg" => regex_tail(&mut c, name)?,
        "eval" => {
            let formula = c.quoted("a sentence")?;
            c.end()?;
            Command::Eval { name, formula }
        }
        "combine" => {
            let mut parts = Vec::new();
            while c.peek().is_some() {
                let w = c.word("a predicate")?;
                let part = match w.split_once('=') {
                    Some((p, v)) => (
                        p.to_string(),
                        v.parse().map_err(|_| bad(format!("bad output `{v}`")))?,
                    ),
                    None => (w, parts.len() as i64 + 1),
                };
                parts.push(part);
            }
            if parts.is_empty() {
                return Err(bad("combine needs at least one predicate"));
            }
            Command::Combine { name, parts }
        }
        "shift" => {
            let system = c.system();
            c.end()?;
            Command::Shift { name, system }
        }
        "beatty" => {
            let system = c.system();
            let spec = c.spec()?;
            let first_index = if c.keyword("from") {
                c.number("a first index")?
            } else {
                1
            };
            c.end()?;
            Command::Beatty {
                name,
                system,
                spec,
                first_index,
            }
        }
        "basis" => {
            let system = c.system();
            let spec = c.spec()?;
            if !c.keyword("cap") {
                return Err(bad("usage: basis <name> [?msd_<sys>] a b c d e cap <h> [from <k>]"));
            }
            let cap = c.number("a cap")?;
            let first_index = if c.keyword("from") {
                c.number("a first index")?
            } else {
                1
            };
            c.end()?;
            Command::Basis {
                name,
                system,
                spec,
                cap,
                first_index,
            }
        }
        "info" => {
            c.end()?;
            Command::Info { name }
        }
        "enum" => {
            let count = c.number("a count")?;
            c.end()?;
            Command::Enum { name, count }
        }
        "export-dot" => {
            let path = match c.next() {
                None => None,
                Some(Token::Word(w)) | Some(Token::Quoted(w)) => Some(w),
                Some(t) => return Err(bad(format!("unexpected {t:?}"))),
            };
            c.end()?;
            Command::ExportDot { name, path }
        }
        "expect" => Command::Expect {
            name,
            what: expectation(&mut c)?,
        },
        other => return Err(bad(format!("unknown command `{other}`"))),
    };
    Ok(cmd)
}

fn expectation(c: &mut Cursor) -> Result<Expectation, CliError> {
    let kind = c.word("an expectation")?;
    let what = match kind.as_str() {
        "TRUE" => Expectation::Truth(true),
        "FALSE" => Expectation::Truth(false),
        "states" => Expectation::States(c.number("a state count")?),
        "values" => Expectation::Values(c.rest_numbers("a value")?),
        "outputs" => Expectation::Outputs(c.rest_numbers("an output")?),
        "outputs-in" => Expectation::OutputsIn(c.rest_numbers("an output")?),
        "beatty" => {
            let spec = c.spec()?;
            let first_index = if c.keyword("from") {
                c.number("a first index")?
            } else {
                1
            };
            let upto = if c.keyword("upto") {
                c.number("a bound")?
            } else {
                10_000
            };
            Expectation::Beatty {
                spec,
                first_index,
                upto,
            }
        }
        "order" => {
            let order = c.number("an order")?;
            let exceptional = if c.keyword("except") {
                c.rest_numbers("an exceptional value")?
            } else {
                Vec::new()
            };
            Expectation::Order { order, exceptional }
        }
        other => return Err(bad(format!("unknown expectation `{other}`"))),
    };
    c.end()?;
    Ok(what)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ost_forms() {
        assert_eq!(
            parse("ost s13 [0] [3 1]").unwrap(),
            Command::Ost {
                name: "s13".into(),
                period: vec![3, 1]
            }
        );
        assert!(parse("ost bad [1] [3 1]").is_err());
    }

    #[test]
    fn regex_definitions() {
        match parse("reg shift {0,1} {0,1} \"([0,0]|[0,1][1,1]*[1,0])*\"").unwrap() {
            Command::Regex {
                arity, alphabets, ..
            } => {
                assert_eq!(arity, 2);
                assert_eq!(alphabets, Some(vec![vec![0, 1], vec![0, 1]]));
            }
            other => panic!("{other:?}"),
        }
        match parse("def has11 {0,1} \"(0+1)*11(0+1)*\"").unwrap() {
            Command::Regex { arity, .. } => assert_eq!(arity, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn combine_values() {
        assert_eq!(
            parse("combine diff has11=-1 diff1=1 diff2=2").unwrap(),
            Command::Combine {
                name: "diff".into(),
                parts: vec![
                    ("has11".into(), -1),
                    ("diff1".into(), 1),
                    ("diff2".into(), 2)
                ]
            }
        );
        assert_eq!(
            parse("combine F one").unwrap(),
            Command::Combine {
                name: "F".into(),
                parts: vec![("one".into(), 1)]
            }
        );
    }

    #[test]
    fn expectations() {
        assert_eq!(
            parse("expect e order 2 except 1").unwrap(),
            Command::Expect {
                name: "e".into(),
                what: Expectation::Order {
                    order: 2,
                    exceptional: vec![1]
                }
            }
        );
        assert!(parse("expect e maybe").is_err());
    }
}
