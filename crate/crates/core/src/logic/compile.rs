//! Formula to automaton compilation.
//!
//! Terms are flattened first: every subtraction is moved across its
//! comparison, and every floor division or compound predicate argument gets
//! a fresh existentially quantified variable. The resulting core formula is
//! compiled bottom-up. Existential blocks are compiled by variable
//! elimination: the conjuncts are built separately and a variable is
//! projected away as soon as every conjunct mentioning it has been joined,
//! which keeps the number of live tracks small.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use super::ast::{CmpOp, Formula, Term};
use super::Environment;
use crate::automaton::{Automaton, BoolOp};
use crate::builders::{linear_automaton, Comparison, LinearRelationSpec};
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;
use crate::tracked::Tracked;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Core {
    Const(bool),
    /// Canonical values for these variables, otherwise unconstrained.
    Domain(Vec<String>),
    /// `Σ coeffs[v]·v (= | ≤) c0`.
    Linear {
        terms: Vec<(String, i64)>,
        c0: i64,
        cmp: Comparison,
    },
    Pred(String, Vec<String>),
    Output(String, String, i64),
    Not(Box<Core>),
    And(Vec<Core>),
    Or(Vec<Core>),
    Binary(BoolOp, Box<Core>, Box<Core>),
    Exists(Vec<String>, Box<Core>),
}

impl Core {
    fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            Core::Const(_) => {}
            Core::Domain(vs) => out.extend(vs.iter().cloned()),
            Core::Linear { terms, .. } => out.extend(terms.iter().map(|t| t.0.clone())),
            Core::Pred(_, args) => out.extend(args.iter().cloned()),
            Core::Output(_, v, _) => {
                out.insert(v.clone());
            }
            Core::Not(x) => x.collect(out),
            Core::And(xs) | Core::Or(xs) => xs.iter().for_each(|x| x.collect(out)),
            Core::Binary(_, a, b) => {
                a.collect(out);
                b.collect(out);
            }
            Core::Exists(vs, x) => {
                let mut inner = BTreeSet::new();
                x.collect(&mut inner);
                for v in vs {
                    inner.remove(v);
                }
                out.extend(inner);
            }
        }
    }

    fn negate(self) -> Core {
        match self {
            Core::Const(b) => Core::Const(!b),
            Core::Not(x) => *x,
            Core::Or(xs) => Core::And(xs.into_iter().map(Core::negate).collect()),
            other => Core::Not(Box::new(other)),
        }
    }
}

/// Linear form `Σ c·v + k`.
#[derive(Default)]
struct Lin {
    coeffs: BTreeMap<String, i64>,
    constant: i64,
}

impl Lin {
    fn scale(mut self, c: i64) -> Result<Lin> {
        for v in self.coeffs.values_mut() {
            *v = v.checked_mul(c).ok_or_else(overflow)?;
        }
        self.constant = self.constant.checked_mul(c).ok_or_else(overflow)?;
        Ok(self)
    }

    fn add(mut self, other: Lin, sign: i64) -> Result<Lin> {
        for (v, c) in other.coeffs {
            let e = self.coeffs.entry(v).or_insert(0);
            *e = e.checked_add(sign * c).ok_or_else(overflow)?;
        }
        self.constant = self
            .constant
            .checked_add(sign * other.constant)
            .ok_or_else(overflow)?;
        Ok(self)
    }
}

fn overflow() -> Error {
    Error::Arithmetic("coefficient overflow".into())
}

/// Flattens terms and renames bound variables apart.
struct Desugar {
    fresh: usize,
}

impl Desugar {
    fn fresh(&mut self, hint: &str) -> String {
        self.fresh += 1;
        format!("{hint}#{}", self.fresh)
    }

    /// Linear form of `t`; side conditions and their fresh variables are
    /// appended to `aux` / `bound`.
    fn linearize(
        &mut self,
        t: &Term,
        scope: &HashMap<String, String>,
        aux: &mut Vec<Core>,
        bound: &mut Vec<String>,
    ) -> Result<Lin> {
        Ok(match t {
            Term::Var(v) => {
                let name = scope.get(v).cloned().unwrap_or_else(|| v.clone());
                let mut l = Lin::default();
                l.coeffs.insert(name, 1);
                l
            }
            Term::Const(c) => Lin {
                coeffs: BTreeMap::new(),
                constant: *c,
            },
            Term::Add(a, b) => {
                let la = self.linearize(a, scope, aux, bound)?;
                let lb = self.linearize(b, scope, aux, bound)?;
                la.add(lb, 1)?
            }
            Term::Sub(a, b) => {
                let la = self.linearize(a, scope, aux, bound)?;
                let lb = self.linearize(b, scope, aux, bound)?;
                la.add(lb, -1)?
            }
            Term::Mul(c, x) => self.linearize(x, scope, aux, bound)?.scale(*c)?,
            Term::Div(x, c) => {
                // q = ⌊X/c⌋  ⇔  c·q ≤ X ≤ c·q + c - 1
                let lx = self.linearize(x, scope, aux, bound)?;
                let q = self.fresh("q");
                let mut cq = Lin::default();
                cq.coeffs.insert(q.clone(), *c);
                let below = cq.add(Lin { coeffs: lx.coeffs.clone(), constant: lx.constant }, -1)?;
                aux.push(linear_atom(below, Comparison::Le, 0));
                let mut cq = Lin::default();
                cq.coeffs.insert(q.clone(), *c);
                let above = lx.add(cq, -1)?;
                aux.push(linear_atom(above, Comparison::Le, c - 1));
                bound.push(q.clone());
                let mut l = Lin::default();
                l.coeffs.insert(q, 1);
                l
            }
        })
    }

    /// A variable holding the value of `t`.
    fn as_var(
        &mut self,
        t: &Term,
        scope: &HashMap<String, String>,
        aux: &mut Vec<Core>,
        bound: &mut Vec<String>,
    ) -> Result<String> {
        if let Term::Var(v) = t {
            return Ok(scope.get(v).cloned().unwrap_or_else(|| v.clone()));
        }
        let l = self.linearize(t, scope, aux, bound)?;
        let w = self.fresh("t");
        let mut lw = Lin::default();
        lw.coeffs.insert(w.clone(), 1);
        aux.push(linear_atom(lw.add(l, -1)?, Comparison::Eq, 0));
        bound.push(w.clone());
        Ok(w)
    }

    fn formula(&mut self, f: &Formula, scope: &HashMap<String, String>) -> Result<Core> {
        Ok(match f {
            Formula::Const(b) => Core::Const(*b),
            Formula::Cmp(op, a, b) => {
                let (mut aux, mut bound) = (Vec::new(), Vec::new());
                let la = self.linearize(a, scope, &mut aux, &mut bound)?;
                let lb = self.linearize(b, scope, &mut aux, &mut bound)?;
                let diff = la.add(lb, -1)?;
                let atom = match op {
                    CmpOp::Eq => linear_atom(diff, Comparison::Eq, 0),
                    CmpOp::Ne => linear_atom(diff, Comparison::Eq, 0).negate(),
                    CmpOp::Le => linear_atom(diff, Comparison::Le, 0),
                    CmpOp::Lt => linear_atom(diff, Comparison::Le, -1),
                    CmpOp::Ge => linear_atom(diff.scale(-1)?, Comparison::Le, 0),
                    CmpOp::Gt => linear_atom(diff.scale(-1)?, Comparison::Le, -1),
                };
                wrap(atom, aux, bound)
            }
            Formula::Pred(name, args) => {
                let (mut aux, mut bound) = (Vec::new(), Vec::new());
                let vars = args
                    .iter()
                    .map(|t| self.as_var(t, scope, &mut aux, &mut bound))
                    .collect::<Result<Vec<_>>>()?;
                wrap(Core::Pred(name.clone(), vars), aux, bound)
            }
            Formula::Index(name, t, value) => {
                let (mut aux, mut bound) = (Vec::new(), Vec::new());
                let v = self.as_var(t, scope, &mut aux, &mut bound)?;
                wrap(Core::Output(name.clone(), v, *value), aux, bound)
            }
            Formula::Not(x) => self.formula(x, scope)?.negate(),
            Formula::And(a, b) => {
                let mut items = Vec::new();
                for x in [a, b] {
                    match self.formula(x, scope)? {
                        Core::And(xs) => items.extend(xs),
                        other => items.push(other),
                    }
                }
                Core::And(items)
            }
            Formula::Or(a, b) => {
                let mut items = Vec::new();
                for x in [a, b] {
                    match self.formula(x, scope)? {
                        Core::Or(xs) => items.extend(xs),
                        other => items.push(other),
                    }
                }
                Core::Or(items)
            }
            Formula::Implies(a, b) => {
                let na = self.formula(a, scope)?.negate();
                let cb = self.formula(b, scope)?;
                let mut items = Vec::new();
                for x in [na, cb] {
                    match x {
                        Core::Or(xs) => items.extend(xs),
                        other => items.push(other),
                    }
                }
                Core::Or(items)
            }
            Formula::Iff(a, b) => Core::Binary(
                BoolOp::Iff,
                Box::new(self.formula(a, scope)?),
                Box::new(self.formula(b, scope)?),
            ),
            Formula::Xor(a, b) => Core::Binary(
                BoolOp::Xor,
                Box::new(self.formula(a, scope)?),
                Box::new(self.formula(b, scope)?),
            ),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let mut inner = scope.clone();
                let mut renamed = Vec::new();
                for v in vs {
                    let r = self.fresh(v);
                    inner.insert(v.clone(), r.clone());
                    renamed.push(r);
                }
                let body = self.formula(body, &inner)?;
                if matches!(f, Formula::Exists(..)) {
                    Core::Exists(renamed, Box::new(body))
                } else {
                    Core::Exists(renamed, Box::new(body.negate())).negate()
                }
            }
        })
    }
}

fn linear_atom(l: Lin, cmp: Comparison, rhs: i64) -> Core {
    let c0 = rhs - l.constant;
    let mentioned: Vec<String> = l.coeffs.keys().cloned().collect();
    let terms: Vec<(String, i64)> = l.coeffs.into_iter().filter(|(_, c)| *c != 0).collect();
    if terms.is_empty() {
        let truth = match cmp {
            Comparison::Eq => c0 == 0,
            Comparison::Le => 0 <= c0,
        };
        if mentioned.is_empty() || !truth {
            return Core::Const(truth);
        }
        return Core::Domain(mentioned);
    }
    let atom = Core::Linear { terms, c0, cmp };
    let vars = atom.vars();
    let dropped: Vec<String> = mentioned.into_iter().filter(|v| !vars.contains(v)).collect();
    if dropped.is_empty() {
        atom
    } else {
        Core::And(vec![atom, Core::Domain(dropped)])
    }
}

fn wrap(atom: Core, mut aux: Vec<Core>, bound: Vec<String>) -> Core {
    if bound.is_empty() {
        return atom;
    }
    aux.insert(0, atom);
    Core::Exists(bound, Box::new(Core::And(aux)))
}

/// Progress information for verbose output.
#[derive(Clone, Debug, Default)]
pub struct CompileStats {
    pub largest_intermediate: usize,
    pub operations: usize,
    pub log: Vec<String>,
}

pub(crate) struct Compiler<'a> {
    pub env: &'a Environment,
    pub system: Arc<NumerationSystem>,
    pub stats: CompileStats,
    pub verbose: bool,
    linear_cache: HashMap<(Vec<i64>, i64, Comparison), Automaton>,
}

/// Lower the statement into the core language.
pub(crate) fn desugar(f: &Formula) -> Result<Core> {
    Desugar { fresh: 0 }.formula(f, &HashMap::new())
}

impl<'a> Compiler<'a> {
    pub fn new(env: &'a Environment, system: Arc<NumerationSystem>, verbose: bool) -> Self {
        Compiler {
            env,
            system,
            stats: CompileStats::default(),
            verbose,
            linear_cache: HashMap::new(),
        }
    }

    fn note(&mut self, what: &str, t: &Tracked, started: Instant) {
        let n = t.state_count();
        self.stats.operations += 1;
        self.stats.largest_intermediate = self.stats.largest_intermediate.max(n);
        if self.verbose {
            let line = format!(
                "{what}: {n} states, {} tracks, {}ms",
                t.vars().len(),
                started.elapsed().as_millis()
            );
            self.stats.log.push(line);
        }
    }

    pub fn compile(&mut self, c: &Core) -> Result<Tracked> {
        let started = Instant::now();
        let out = match c {
            Core::Const(b) => Tracked::constant(&self.system, *b),
            Core::Domain(vs) => Tracked::universal(&self.system, vs),
            Core::Linear { terms, c0, cmp } => {
                let coeffs: Vec<i64> = terms.iter().map(|t| t.1).collect();
                let key = (coeffs.clone(), *c0, *cmp);
                let aut = match self.linear_cache.get(&key) {
                    Some(a) => a.clone(),
                    None => {
                        let spec = LinearRelationSpec::new(coeffs, *c0)?;
                        let a = linear_automaton(&self.system, &spec, *cmp);
                        self.linear_cache.insert(key, a.clone());
                        a
                    }
                };
                let names: Vec<String> = terms.iter().map(|t| t.0.clone()).collect();
                Tracked::new(&names, aut)?
            }
            Core::Pred(name, args) => {
                let pred = self.env.predicate(name)?;
                let aut = pred.automaton.without_outputs();
                if aut.system() != &self.system {
                    return Err(Error::SystemMismatch(
                        self.system.name().to_string(),
                        aut.system().name().to_string(),
                    ));
                }
                if aut.arity() != args.len() {
                    return Err(Error::Formula(format!(
                        "${name} takes {} arguments, {} given",
                        aut.arity(),
                        args.len()
                    )));
                }
                Tracked::new(args, aut)?
            }
            Core::Output(name, var, value) => {
                let pred = self.env.predicate(name)?;
                if pred.automaton.outputs().is_none() {
                    return Err(Error::Formula(format!("{name} is not an output automaton")));
                }
                if pred.automaton.arity() != 1 {
                    return Err(Error::Formula(format!("{name} must take one index")));
                }
                if pred.automaton.system() != &self.system {
                    return Err(Error::SystemMismatch(
                        self.system.name().to_string(),
                        pred.automaton.system().name().to_string(),
                    ));
                }
                Tracked::new(std::slice::from_ref(var), pred.automaton.output_preimage(*value)?)?
            }
            Core::Not(x) => self.compile(x)?.not(),
            Core::And(xs) => self.conjunction(xs.clone(), BTreeSet::new())?,
            Core::Or(xs) => {
                let parts = xs
                    .iter()
                    .map(|x| self.compile(x))
                    .collect::<Result<Vec<_>>>()?;
                self.fold(parts, BoolOp::Or)?
            }
            Core::Binary(op, a, b) => {
                let ta = self.compile(a)?;
                let tb = self.compile(b)?;
                ta.combine(&tb, *op)?
            }
            Core::Exists(vs, body) => self.exists(vs, body)?,
        };
        self.note(&describe(c), &out, started);
        Ok(out)
    }

    fn fold(&mut self, mut parts: Vec<Tracked>, op: BoolOp) -> Result<Tracked> {
        if parts.is_empty() {
            return Ok(Tracked::constant(&self.system, op == BoolOp::And));
        }
        // Smallest first keeps intermediate products small.
        parts.sort_by_key(|t| (t.vars().len(), t.state_count()));
        let mut acc = parts.remove(0);
        for p in parts {
            acc = acc.combine(&p, op)?;
        }
        Ok(acc)
    }

    fn exists(&mut self, vs: &[String], body: &Core) -> Result<Tracked> {
        let elim: BTreeSet<String> = vs.iter().cloned().collect();
        match body {
            Core::Or(xs) => {
                // ∃ distributes over ∨.
                let parts = xs
                    .iter()
                    .map(|x| self.exists(vs, x))
                    .collect::<Result<Vec<_>>>()?;
                self.fold(parts, BoolOp::Or)
            }
            Core::And(xs) => self.conjunction(xs.clone(), elim),
            other => self.conjunction(vec![other.clone()], elim),
        }
    }

    /// `∃ elim (∧ items)` by variable elimination.
    fn conjunction(&mut self, items: Vec<Core>, mut elim: BTreeSet<String>) -> Result<Tracked> {
        // Flatten nested conjunctions and existentials (bound names are
        // unique after desugaring, so lifting them is safe).
        let mut flat: Vec<Core> = Vec::new();
        let mut queue = items;
        while let Some(item) = queue.pop() {
            match item {
                Core::And(xs) => queue.extend(xs),
                Core::Exists(vs, body) => {
                    elim.extend(vs);
                    queue.push(*body);
                }
                Core::Not(x) if matches!(*x, Core::Or(_)) => queue.push(x.negate()),
                Core::Const(true) => {}
                other => flat.push(other),
            }
        }
        if flat.contains(&Core::Const(false)) {
            let free: Vec<String> = flat
                .iter()
                .flat_map(|c| c.vars())
                .filter(|v| !elim.contains(v))
                .collect();
            return Tracked::constant(&self.system, false)
                .and(&Tracked::universal(&self.system, &free));
        }
        flat.reverse();

        if let Some(split) = self.pick_distribution(&flat, &elim) {
            let Core::Or(branches) = flat.remove(split) else {
                unreachable!()
            };
            let mut parts = Vec::new();
            for b in branches {
                let mut items = flat.clone();
                items.push(b);
                parts.push(self.conjunction(items, elim.clone())?);
            }
            return self.fold(parts, BoolOp::Or);
        }

        // A variable pinned down by an equation `v = ...` is a substitution;
        // projecting it is cheap, while projecting a free generator (say the
        // index of a sequence) determinizes the whole range.
        let determined: BTreeSet<&String> = flat
            .iter()
            .flat_map(|c| match c {
                Core::Linear {
                    terms,
                    cmp: Comparison::Eq,
                    ..
                } => terms
                    .iter()
                    .filter(|(_, k)| k.abs() == 1)
                    .map(|(v, _)| v)
                    .collect(),
                _ => Vec::new(),
            })
            .collect();

        let mut parts: Vec<Tracked> = flat
            .iter()
            .map(|c| self.compile(c))
            .collect::<Result<Vec<_>>>()?;

        loop {
            let live: Vec<&String> = elim
                .iter()
                .filter(|v| parts.iter().any(|p| p.vars().contains(v)))
                .collect();
            let Some(var) = live
                .into_iter()
                .min_by_key(|v| {
                    let touching: Vec<&Tracked> =
                        parts.iter().filter(|p| p.vars().contains(v)).collect();
                    let union: BTreeSet<&String> =
                        touching.iter().flat_map(|p| p.vars().iter()).collect();
                    let size: usize = touching.iter().map(|p| p.state_count()).sum();
                    (!determined.contains(v), union.len(), touching.len(), size, (*v).clone())
                })
                .cloned()
            else {
                break;
            };
            let (touching, rest): (Vec<Tracked>, Vec<Tracked>) =
                parts.into_iter().partition(|p| p.vars().contains(&var));
            let started = Instant::now();
            let joined = self.fold(touching, BoolOp::And)?;
            let projected = joined.exists(&var)?;
            self.note(&format!("eliminate {var}"), &projected, started);
            parts = rest;
            parts.push(projected);
        }
        self.fold(parts, BoolOp::And)
    }

    /// Index of a disjunction worth splitting the conjunction on: one that
    /// ties together several of the variables being eliminated.
    fn pick_distribution(&self, flat: &[Core], elim: &BTreeSet<String>) -> Option<usize> {
        if flat.len() < 2 {
            return None;
        }
        flat.iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                Core::Or(bs) if bs.len() <= 8 => {
                    let shared = c.vars().intersection(elim).count();
                    (shared >= 3).then_some((shared, i))
                }
                _ => None,
            })
            .max()
            .map(|(_, i)| i)
    }
}

fn describe(c: &Core) -> String {
    match c {
        Core::Const(b) => format!("constant {b}"),
        Core::Domain(vs) => format!("domain {}", vs.join(",")),
        Core::Linear { terms, c0, cmp } => {
            let lhs: Vec<String> = terms.iter().map(|(v, c)| format!("{c}*{v}")).collect();
            let op = if *cmp == Comparison::Eq { "=" } else { "<=" };
            format!("{} {op} {c0}", lhs.join("+"))
        }
        Core::Pred(name, args) => format!("${name}({})", args.join(",")),
        Core::Output(name, v, value) => format!("{name}[{v}]=@{value}"),
        Core::Not(_) => "not".into(),
        Core::And(_) => "and".into(),
        Core::Or(_) => "or".into(),
        Core::Binary(op, _, _) => format!("{op:?}").to_lowercase(),
        Core::Exists(vs, _) => format!("exists {}", vs.join(",")),
    }
}
