//! Recursive-descent parser for the formula language.
//!
//! ```text
//! statement := ["?msd_" name] formula
//! formula   := iff
//! iff       := implies ("<=>" implies)*
//! implies   := xor ["=>" implies]
//! xor       := or ("^" or)*
//! or        := and ("|" and)*
//! and       := unary ("&" unary)*
//! unary     := "~" unary | quant | primary
//! quant     := ("E" | "A") var ("," var)* formula
//! primary   := "(" formula ")" | "$" name "(" term ("," term)* ")"
//!            | Name "[" term "]" "=" "@" ["-"] number
//!            | term cmp term
//! cmp       := "=" | "!=" | "<" | "<=" | ">" | ">="
//! term      := product (("+" | "-") product)*
//! product   := factor (("*" | "/") factor)*     (one side constant)
//! factor    := number | var | "(" term ")"
//! ```
//!
//! A quantifier's scope extends as far right as possible. `Ex` and `E x`
//! both quantify `x`.

use super::ast::{CmpOp, Formula, Statement, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Pred(String),
    System(String),
    Num(i64),
    At,
    Op(&'static str),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const OPS: [&str; 21] = [
    "<=>", "=>", "!=", "<=", ">=", "&", "|", "^", "~", "=", "<", ">", "+", "-", "*", "/", "(",
    ")", ",", "[", "]",
];

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| Error::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (l0, c0, start) = (line, col, i);
        let ident_len = |from: usize| {
            chars[from..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .count()
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let n = ident_len(i);
            let s: String = chars[i..i + n].iter().collect();
            i += n;
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let n = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            let s: String = chars[i..i + n].iter().collect();
            i += n;
            Tok::Num(
                s.parse()
                    .map_err(|_| err(l0, c0, format!("number {s} is too large")))?,
            )
        } else if c == '$' {
            let n = ident_len(i + 1);
            if n == 0 {
                return Err(err(l0, c0, "expected a predicate name after '$'".into()));
            }
            let s: String = chars[i + 1..i + 1 + n].iter().collect();
            i += 1 + n;
            Tok::Pred(s)
        } else if c == '?' {
            let n = ident_len(i + 1);
            let s: String = chars[i + 1..i + 1 + n].iter().collect();
            let Some(name) = s.strip_prefix("msd_").filter(|n| !n.is_empty()) else {
                return Err(err(l0, c0, "expected '?msd_<name>'".into()));
            };
            i += 1 + n;
            Tok::System(name.to_string())
        } else if c == '@' {
            i += 1;
            Tok::At
        } else {
            let rest: String = chars[i..(i + 3).min(chars.len())].iter().collect();
            match OPS.iter().find(|op| rest.starts_with(**op)) {
                Some(op) => {
                    i += op.len();
                    Tok::Op(op)
                }
                None => return Err(err(l0, c0, format!("unexpected character '{c}'"))),
            }
        };
        col = c0 + (i - start);
        out.push(Token {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

fn is_var_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase())
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let t = &self.toks[self.pos];
        Error::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn expect_op(&mut self, op: &str) -> Result<()> {
        if self.is_op(op) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected '{op}'")))
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        let system = match self.peek() {
            Tok::System(s) => {
                let s = s.clone();
                self.bump();
                Some(s)
            }
            _ => None,
        };
        let formula = self.formula()?;
        if *self.peek() != Tok::End {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(Statement { system, formula })
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.implies()?;
        while self.is_op("<=>") {
            self.bump();
            let right = self.implies()?;
            left = Formula::Iff(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula> {
        let left = self.xor()?;
        if self.is_op("=>") {
            self.bump();
            let right = self.implies()?;
            return Ok(Formula::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn xor(&mut self) -> Result<Formula> {
        let mut left = self.or()?;
        while self.is_op("^") {
            self.bump();
            let right = self.or()?;
            left = Formula::Xor(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while self.is_op("|") {
            self.bump();
            let right = self.and()?;
            left = Formula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.is_op("&") {
            self.bump();
            let right = self.unary()?;
            left = Formula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.is_op("~") {
            self.bump();
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if let Some((forall, first)) = self.quantifier_head() {
            self.bump();
            let mut vars = Vec::new();
            match first {
                Some(v) => vars.push(v),
                None => vars.push(self.var_name()?),
            }
            while self.is_op(",") {
                self.bump();
                vars.push(self.var_name()?);
            }
            let body = Box::new(self.formula()?);
            return Ok(if forall {
                Formula::Forall(vars, body)
            } else {
                Formula::Exists(vars, body)
            });
        }
        self.primary()
    }

    /// `Some((is_forall, first variable if glued to the letter))`.
    fn quantifier_head(&self) -> Option<(bool, Option<String>)> {
        let Tok::Ident(s) = self.peek() else {
            return None;
        };
        let forall = match s.chars().next() {
            Some('E') => false,
            Some('A') => true,
            _ => return None,
        };
        let rest = &s[1..];
        if rest.is_empty() {
            return matches!(self.peek_at(1), Tok::Ident(v) if is_var_name(v))
                .then_some((forall, None));
        }
        is_var_name(rest).then(|| (forall, Some(rest.to_string())))
    }

    fn var_name(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(v) if is_var_name(&v) => {
                self.bump();
                Ok(v)
            }
            _ => Err(self.error("expected a variable name")),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Op("(") => {
                if self.paren_starts_term() {
                    return self.comparison();
                }
                self.bump();
                let f = self.formula()?;
                self.expect_op(")")?;
                Ok(f)
            }
            Tok::Pred(name) => {
                self.bump();
                self.expect_op("(")?;
                let mut args = vec![self.term()?];
                while self.is_op(",") {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect_op(")")?;
                Ok(Formula::Pred(name, args))
            }
            Tok::Ident(name) if matches!(self.peek_at(1), Tok::Op("[")) => {
                self.bump();
                self.bump();
                let index = self.term()?;
                self.expect_op("]")?;
                self.expect_op("=")?;
                if *self.peek() != Tok::At {
                    return Err(self.error("expected '@' before an output value"));
                }
                self.bump();
                let negative = self.is_op("-");
                if negative {
                    self.bump();
                }
                match self.bump() {
                    Tok::Num(v) => Ok(Formula::Index(name, index, if negative { -v } else { v })),
                    _ => Err(self.error("expected an output value")),
                }
            }
            Tok::Ident(name) if name == "true" || name == "false" => {
                self.bump();
                Ok(Formula::Const(name == "true"))
            }
            Tok::Ident(_) | Tok::Num(_) => self.comparison(),
            Tok::End => Err(self.error("unexpected end of formula")),
            _ => Err(self.error("expected a formula")),
        }
    }

    /// At a '(': does the matching ')' continue as a term?
    fn paren_starts_term(&self) -> bool {
        let mut depth = 0usize;
        let mut i = self.pos;
        while i < self.toks.len() {
            match &self.toks[i].tok {
                Tok::Op("(") => depth += 1,
                Tok::Op(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return matches!(
                            self.toks.get(i + 1).map(|t| &t.tok),
                            Some(Tok::Op("=" | "!=" | "<" | "<=" | ">" | ">=" | "+" | "-" | "*" | "/"))
                        );
                    }
                }
                Tok::End => return false,
                _ => {}
            }
            i += 1;
        }
        false
    }

    fn comparison(&mut self) -> Result<Formula> {
        let left = self.term()?;
        let op = match self.peek() {
            Tok::Op("=") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::Ne,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::Ge,
            _ => return Err(self.error("expected a comparison operator")),
        };
        self.bump();
        let right = self.term()?;
        Ok(Formula::Cmp(op, left, right))
    }

    fn term(&mut self) -> Result<Term> {
        let mut left = self.product()?;
        loop {
            if self.is_op("+") {
                self.bump();
                left = Term::Add(Box::new(left), Box::new(self.product()?));
            } else if self.is_op("-") {
                self.bump();
                left = Term::Sub(Box::new(left), Box::new(self.product()?));
            } else {
                return Ok(left);
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut left = self.factor()?;
        loop {
            if self.is_op("*") {
                self.bump();
                let at = self.pos;
                let right = self.factor()?;
                left = match (left, right) {
                    (Term::Const(c), t) | (t, Term::Const(c)) => Term::Mul(c, Box::new(t)),
                    _ => {
                        self.pos = at;
                        return Err(self.error(
                            "multiplication is only allowed by a natural number constant",
                        ));
                    }
                };
            } else if self.is_op("/") {
                self.bump();
                match self.factor()? {
                    Term::Const(c) if c >= 1 => left = Term::Div(Box::new(left), c),
                    _ => {
                        return Err(self.error("division is only allowed by a positive constant"))
                    }
                }
            } else {
                return Ok(left);
            }
        }
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Term::Const(n))
            }
            Tok::Ident(v) if is_var_name(&v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Op("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_op(")")?;
                Ok(t)
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

pub fn parse(text: &str) -> Result<Statement> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.statement()
}
