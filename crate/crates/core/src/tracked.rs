//! Automata whose tracks are labelled by variable names.
//!
//! Tracks are always kept in sorted-name order, so two relations over the
//! same variables line up without bookkeeping.

use std::sync::Arc;

use crate::automaton::{Automaton, BoolOp};
use crate::builders::canonical_recognizer;
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tracked {
    vars: Vec<String>,
    aut: Automaton,
}

impl Tracked {
    /// Label the tracks of `aut` with `vars` (in track order). Repeated names
    /// are merged by requiring equal digits on those tracks.
    pub fn new(vars: &[String], aut: Automaton) -> Result<Self> {
        if vars.len() != aut.arity() {
            return Err(Error::Automaton(format!(
                "{} variable names for an arity-{} automaton",
                vars.len(),
                aut.arity()
            )));
        }
        let mut sorted: Vec<String> = vars.to_vec();
        sorted.sort();
        sorted.dedup();
        let position = |v: &String| sorted.binary_search(v).unwrap();

        let aut = if sorted.len() < vars.len() {
            // Diagonal: widen to one track per occurrence, then constrain
            // duplicates to agree, then project the copies away.
            let mut keep: Vec<usize> = Vec::new();
            let mut seen: Vec<Option<usize>> = vec![None; sorted.len()];
            let mut equal_pairs = Vec::new();
            for (j, v) in vars.iter().enumerate() {
                let p = position(v);
                match seen[p] {
                    None => {
                        seen[p] = Some(j);
                        keep.push(j);
                    }
                    Some(first) => equal_pairs.push((first, j)),
                }
            }
            let mut a = aut;
            for (x, y) in equal_pairs {
                let eq = crate::builders::equality(a.system());
                a = a.product_mapped(&(0..a.arity()).collect::<Vec<_>>(), &eq, &[x, y], a.arity(), BoolOp::And)?;
            }
            let mut drop: Vec<usize> = (0..vars.len()).filter(|j| !keep.contains(j)).collect();
            drop.sort_unstable_by(|a, b| b.cmp(a));
            for j in drop {
                a = a.project(j)?;
            }
            let kept_vars: Vec<&String> = keep.iter().map(|&j| &vars[j]).collect();
            let source: Vec<Option<usize>> = sorted
                .iter()
                .map(|v| kept_vars.iter().position(|k| *k == v))
                .collect();
            a.remap_tracks(&source)
        } else {
            let source: Vec<Option<usize>> = sorted
                .iter()
                .map(|v| vars.iter().position(|k| k == v))
                .collect();
            if source.iter().enumerate().all(|(i, s)| *s == Some(i)) {
                aut
            } else {
                aut.remap_tracks(&source)
            }
        };
        Ok(Tracked { vars: sorted, aut })
    }

    /// Canonical tuples over `vars` (any order).
    pub fn universal(system: &Arc<NumerationSystem>, vars: &[String]) -> Self {
        let mut sorted = vars.to_vec();
        sorted.sort();
        sorted.dedup();
        let aut = canonical_recognizer(system, sorted.len());
        Tracked { vars: sorted, aut }
    }

    pub fn constant(system: &Arc<NumerationSystem>, value: bool) -> Self {
        let aut = if value {
            Automaton::universal(system.clone(), 0)
        } else {
            Automaton::empty(system.clone(), 0)
        };
        Tracked { vars: vec![], aut }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn automaton(&self) -> &Automaton {
        &self.aut
    }

    pub fn into_automaton(self) -> Automaton {
        self.aut
    }

    pub fn state_count(&self) -> usize {
        self.aut.state_count()
    }

    pub fn combine(&self, other: &Tracked, op: BoolOp) -> Result<Tracked> {
        let mut vars: Vec<String> = self.vars.iter().chain(&other.vars).cloned().collect();
        vars.sort();
        vars.dedup();
        let place = |vs: &[String]| -> Vec<usize> {
            vs.iter().map(|v| vars.binary_search(v).unwrap()).collect()
        };
        let (mine, theirs) = (place(&self.vars), place(&other.vars));
        let mut aut = self
            .aut
            .product_mapped(&mine, &other.aut, &theirs, vars.len(), op)?;
        let same_vars = self.vars == other.vars;
        let stays_canonical = match op {
            BoolOp::And => true,
            BoolOp::Or | BoolOp::AndNot => same_vars,
            BoolOp::Xor | BoolOp::Iff => false,
        };
        if !stays_canonical {
            aut = aut.product(&canonical_recognizer(aut.system(), vars.len()), BoolOp::And)?;
        }
        Ok(Tracked { vars, aut })
    }

    pub fn and(&self, other: &Tracked) -> Result<Tracked> {
        self.combine(other, BoolOp::And)
    }

    pub fn or(&self, other: &Tracked) -> Result<Tracked> {
        self.combine(other, BoolOp::Or)
    }

    pub fn not(&self) -> Tracked {
        Tracked {
            vars: self.vars.clone(),
            aut: self.aut.complement(),
        }
    }

    /// Existentially quantify `var`; a no-op when it does not occur.
    pub fn exists(&self, var: &str) -> Result<Tracked> {
        match self.vars.iter().position(|v| v == var) {
            None => Ok(self.clone()),
            Some(track) => {
                let mut vars = self.vars.clone();
                vars.remove(track);
                Ok(Tracked {
                    vars,
                    aut: self.aut.project(track)?,
                })
            }
        }
    }

    /// Rename variables (the mapping must keep names distinct).
    pub fn rename(&self, f: impl Fn(&str) -> String) -> Result<Tracked> {
        let names: Vec<String> = self.vars.iter().map(|v| f(v)).collect();
        Tracked::new(&names, self.aut.clone())
    }
}
