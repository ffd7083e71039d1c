//! Output automata from disjoint predicates.

use std::collections::HashMap;

use super::{Automaton, BoolOp, Emptiness, RawDfa};
use crate::builders::canonical_recognizer;
use crate::error::{Error, Result};

/// Build an output automaton: a canonical input accepted by part `i` maps to
/// that part's value, any other canonical input to `default`.
///
/// Parts must share a system and arity and be pairwise disjoint on canonical
/// inputs.
pub fn combine(parts: &[(String, Automaton, i64)], default: i64) -> Result<Automaton> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Automaton("combine needs at least one part".into()))?;
    let system = first.1.system().clone();
    let arity = first.1.arity();
    let canon = canonical_recognizer(&system, arity);
    let mut restricted = Vec::with_capacity(parts.len());
    for (name, aut, _) in parts {
        if aut.arity() != arity {
            return Err(Error::Automaton(format!(
                "combine part {name} has arity {}, expected {arity}",
                aut.arity()
            )));
        }
        restricted.push(aut.without_outputs().product(&canon, BoolOp::And)?);
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let both = restricted[i].product(&restricted[j], BoolOp::And)?;
            if let Emptiness::NonEmpty(w) = both.decide() {
                let witness: Vec<String> = w
                    .iter()
                    .map(|t| system.format_digits(t))
                    .collect();
                return Err(Error::Overlap {
                    first: parts[i].0.clone(),
                    second: parts[j].0.clone(),
                    witness: witness.join(","),
                });
            }
        }
    }

    // Product over the canonical recognizer and every part.
    let mut members: Vec<&Automaton> = vec![&canon];
    members.extend(restricted.iter());
    let k = canon.alphabet_size();
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut states: Vec<Vec<u32>> = Vec::new();
    let start: Vec<u32> = members.iter().map(|a| a.initial()).collect();
    ids.insert(start.clone(), 0);
    states.push(start);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        for l in 0..k {
            let next: Vec<u32> = states[i]
                .iter()
                .zip(&members)
                .map(|(&s, a)| a.next(s, l))
                .collect();
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    ids.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            trans.push(id);
        }
        i += 1;
    }
    let mut accepting = Vec::with_capacity(states.len());
    let mut outputs = Vec::with_capacity(states.len());
    for st in &states {
        let valid = canon.is_accepting(st[0]);
        accepting.push(valid);
        let value = parts
            .iter()
            .enumerate()
            .find(|(p, _)| restricted[*p].is_accepting(st[p + 1]))
            .map_or(default, |(_, part)| part.2);
        outputs.push(if valid { value } else { 0 });
    }
    Ok(Automaton::from_raw(
        system,
        arity,
        RawDfa {
            initial: 0,
            trans,
            accepting,
            outputs: Some(outputs),
        },
    ))
}
