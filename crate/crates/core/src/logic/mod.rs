//! First-order formulas over numeration systems.
//!
//! See [`parser`] for the grammar.
//!
//! Multiplication needs a constant on one side; division is floor division
//! by a positive constant. Subtraction is never truncated: `x = y - z`
//! means `x + z = y`.

pub mod ast;
mod compile;
pub mod parser;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;
use crate::quadratic::PeriodicCF;
use crate::tracked::Tracked;

pub use compile::CompileStats;
pub use parser::parse;

/// A named automaton together with the text that produced it.
#[derive(Clone, Debug)]
pub struct Predicate {
    pub automaton: Automaton,
    pub text: String,
}

/// Result of compiling one formula.
#[derive(Clone, Debug)]
pub struct Compiled {
    /// Free variables in track order.
    pub vars: Vec<String>,
    pub automaton: Automaton,
    pub stats: CompileStats,
}

#[derive(Clone, Debug)]
pub struct Environment {
    systems: BTreeMap<String, Arc<NumerationSystem>>,
    predicates: BTreeMap<String, Predicate>,
    default_system: String,
}

impl Default for Environment {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment {
    /// An environment knowing only `fib`, the Ostrowski system of the golden
    /// ratio (Zeckendorf representation).
    pub fn new() -> Self {
        let fib = NumerationSystem::new("fib", PeriodicCF::new(vec![1]).expect("valid period"))
            .expect("valid system");
        let mut systems = BTreeMap::new();
        systems.insert("fib".to_string(), Arc::new(fib));
        Environment {
            systems,
            predicates: BTreeMap::new(),
            default_system: "fib".into(),
        }
    }

    /// Register a system; it becomes the default for unannotated formulas.
    pub fn add_system(&mut self, system: NumerationSystem) -> Arc<NumerationSystem> {
        let name = system.name().to_string();
        let system = Arc::new(system);
        self.systems.insert(name.clone(), system.clone());
        self.default_system = name;
        system
    }

    pub fn system(&self, name: &str) -> Result<Arc<NumerationSystem>> {
        self.systems
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownSystem(name.to_string()))
    }

    pub fn systems(&self) -> impl Iterator<Item = &Arc<NumerationSystem>> {
        self.systems.values()
    }

    pub fn default_system(&self) -> Arc<NumerationSystem> {
        self.systems[&self.default_system].clone()
    }

    pub fn set_predicate(&mut self, name: &str, automaton: Automaton, text: impl Into<String>) {
        self.predicates.insert(
            name.to_string(),
            Predicate {
                automaton,
                text: text.into(),
            },
        );
    }

    pub fn predicate(&self, name: &str) -> Result<&Predicate> {
        self.predicates
            .get(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&String, &Predicate)> {
        self.predicates.iter()
    }

    pub fn remove_predicate(&mut self, name: &str) -> Option<Predicate> {
        self.predicates.remove(name)
    }

    pub fn compile_text(&self, text: &str, verbose: bool) -> Result<Compiled> {
        let statement = parse(text)?;
        let system = match &statement.system {
            Some(name) => self.system(name)?,
            None => self.default_system(),
        };
        let free: Vec<String> = statement.formula.free_vars().into_iter().collect();
        let core = compile::desugar(&statement.formula)?;
        let mut compiler = compile::Compiler::new(self, system.clone(), verbose);
        let mut result = compiler.compile(&core)?;
        if result.vars() != free.as_slice() {
            // Variables whose constraints vanished still become tracks.
            result = result.and(&Tracked::universal(&system, &free))?;
        }
        debug_assert_eq!(result.vars(), free.as_slice());
        Ok(Compiled {
            vars: free,
            automaton: result.into_automaton(),
            stats: compiler.stats,
        })
    }

    pub fn eval_sentence(&self, text: &str) -> Result<bool> {
        let statement = parse(text)?;
        let free = statement.formula.free_vars();
        if !free.is_empty() {
            return Err(Error::FreeVariables(free.into_iter().collect()));
        }
        Ok(self.compile_text(text, false)?.automaton.truth())
    }

    /// Compile `text` and store it as `name`; returns the state count.
    pub fn def_predicate(&mut self, name: &str, text: &str) -> Result<usize> {
        let compiled = self.compile_text(text, false)?;
        let states = compiled.automaton.state_count();
        self.set_predicate(name, compiled.automaton, text);
        Ok(states)
    }
}
