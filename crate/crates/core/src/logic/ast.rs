use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(i64),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    /// Multiplication by a constant.
    Mul(i64, Box<Term>),
    /// Floor division by a positive constant.
    Div(Box<Term>, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Cmp(CmpOp, Term, Term),
    Pred(String, Vec<Term>),
    /// `W[i] = @v` on an output automaton.
    Index(String, Term, i64),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

/// A formula with its optional `?msd_<name>` annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub system: Option<String>,
    pub formula: Formula,
}

impl Term {
    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Mul(_, t) | Term::Div(t, _) => t.collect_vars(out),
        }
    }
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Pred(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Index(_, t, _) => t.collect_vars(out),
            Formula::Not(f) => f.collect_free(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Xor(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                for v in vs {
                    inner.remove(v);
                }
                out.extend(inner);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Add(a, b) => write!(f, "({a}+{b})"),
            Term::Sub(a, b) => write!(f, "({a}-{b})"),
            Term::Mul(c, t) => write!(f, "{c}*{t}"),
            Term::Div(t, c) => write!(f, "{t}/{c}"),
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(b) => write!(f, "{}", if *b { "true" } else { "false" }),
            Formula::Cmp(op, a, b) => write!(f, "{a}{op}{b}"),
            Formula::Pred(name, args) => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "${name}({})", args.join(","))
            }
            Formula::Index(name, t, v) => write!(f, "{name}[{t}]=@{v}"),
            Formula::Not(x) => write!(f, "~{x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Xor(a, b) => write!(f, "({a} ^ {b})"),
            Formula::Implies(a, b) => write!(f, "({a} => {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <=> {b})"),
            Formula::Exists(vs, x) => write!(f, "(E{} {x})", vs.join(",")),
            Formula::Forall(vs, x) => write!(f, "(A{} {x})", vs.join(",")),
        }
    }
}
