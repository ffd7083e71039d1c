//! Deterministic automata over k-track Ostrowski digit alphabets.
//!
//! A letter is a k-tuple of digits in `0..=dmax`, stored flattened as
//! `Σ d_j · radix^(k-1-j)` so that track 0 is the most significant and the
//! numeric order of letters is the lexicographic order of tuples.
//!
//! Every automaton handed out by this module is total, trimmed to reachable
//! states, minimal, and numbered canonically (breadth-first from the initial
//! state in letter order, with the rejecting sink, if any, last). Two
//! automata accept the same language iff they compare equal.

mod combine;
mod io;
mod minimize;
mod ops;
mod query;
pub mod regex;

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeration::{pad_parallel, DigitString, NumerationSystem};

pub use combine::combine;
pub use ops::BoolOp;
pub use query::Emptiness;

#[derive(Clone, Debug)]
pub struct Automaton {
    system: Arc<NumerationSystem>,
    arity: usize,
    radix: usize,
    alphabet: usize,
    initial: u32,
    trans: Vec<u32>,
    accepting: Vec<bool>,
    outputs: Option<Vec<i64>>,
    sink: Option<u32>,
}

impl PartialEq for Automaton {
    fn eq(&self, other: &Self) -> bool {
        self.system == other.system
            && self.arity == other.arity
            && self.initial == other.initial
            && self.trans == other.trans
            && self.accepting == other.accepting
            && self.outputs == other.outputs
    }
}

impl Eq for Automaton {}

/// Unminimized automaton under construction.
pub(crate) struct RawDfa {
    pub initial: u32,
    pub trans: Vec<u32>,
    pub accepting: Vec<bool>,
    pub outputs: Option<Vec<i64>>,
}

impl Automaton {
    /// Build from raw parts and minimize.
    pub(crate) fn from_raw(system: Arc<NumerationSystem>, arity: usize, raw: RawDfa) -> Self {
        let radix = system.radix();
        let alphabet = alphabet_size(radix, arity);
        debug_assert_eq!(raw.trans.len(), raw.accepting.len() * alphabet);
        let unmin = Automaton {
            system,
            arity,
            radix,
            alphabet,
            initial: raw.initial,
            trans: raw.trans,
            accepting: raw.accepting,
            outputs: raw.outputs,
            sink: None,
        };
        unmin.minimize()
    }

    /// The language of all k-tuples of digit strings (not only canonical ones).
    pub fn universal(system: Arc<NumerationSystem>, arity: usize) -> Self {
        let alphabet = alphabet_size(system.radix(), arity);
        Self::from_raw(
            system,
            arity,
            RawDfa {
                initial: 0,
                trans: vec![0; alphabet],
                accepting: vec![true],
                outputs: None,
            },
        )
    }

    pub fn empty(system: Arc<NumerationSystem>, arity: usize) -> Self {
        let alphabet = alphabet_size(system.radix(), arity);
        Self::from_raw(
            system,
            arity,
            RawDfa {
                initial: 0,
                trans: vec![0; alphabet],
                accepting: vec![false],
                outputs: None,
            },
        )
    }

    pub fn system(&self) -> &Arc<NumerationSystem> {
        &self.system
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    /// Total number of states, including the sink.
    pub fn total_states(&self) -> usize {
        self.accepting.len()
    }

    /// Number of states excluding the rejecting sink.
    pub fn state_count(&self) -> usize {
        self.total_states() - usize::from(self.sink.is_some())
    }

    pub fn sink(&self) -> Option<u32> {
        self.sink
    }

    pub fn is_accepting(&self, state: u32) -> bool {
        self.accepting[state as usize]
    }

    pub fn outputs(&self) -> Option<&[i64]> {
        self.outputs.as_deref()
    }

    pub fn output(&self, state: u32) -> Option<i64> {
        self.outputs.as_ref().map(|o| o[state as usize])
    }

    #[inline]
    pub fn next(&self, state: u32, letter: usize) -> u32 {
        self.trans[state as usize * self.alphabet + letter]
    }

    pub(crate) fn row(&self, state: u32) -> &[u32] {
        let base = state as usize * self.alphabet;
        &self.trans[base..base + self.alphabet]
    }

    pub fn encode_letter(&self, digits: &[u8]) -> usize {
        encode_letter(self.radix, digits)
    }

    pub fn decode_letter(&self, letter: usize) -> Vec<u8> {
        decode_letter(self.radix, self.arity, letter)
    }

    /// The all-zero tuple.
    pub const ZERO: usize = 0;

    fn check_same_system(&self, other: &Automaton) -> Result<()> {
        if self.system != other.system {
            return Err(Error::SystemMismatch(
                self.system.name().to_string(),
                other.system.name().to_string(),
            ));
        }
        Ok(())
    }

    /// Run on parallel digit strings (padded internally).
    pub fn run(&self, tracks: &[DigitString]) -> Result<u32> {
        if tracks.len() != self.arity {
            return Err(Error::Automaton(format!(
                "expected {} tracks, got {}",
                self.arity,
                tracks.len()
            )));
        }
        let padded = pad_parallel(tracks);
        let len = padded.first().map_or(0, |t| t.len());
        let mut state = self.initial;
        let mut digits = vec![0u8; self.arity];
        for pos in 0..len {
            for (j, t) in padded.iter().enumerate() {
                let d = t.digits()[pos];
                if d as usize >= self.radix {
                    return Err(Error::DigitOutOfRange {
                        digit: d as u64,
                        dmax: self.radix as u64 - 1,
                    });
                }
                digits[j] = d;
            }
            state = self.next(state, self.encode_letter(&digits));
        }
        Ok(state)
    }

    pub fn accepts(&self, tracks: &[DigitString]) -> Result<bool> {
        Ok(self.is_accepting(self.run(tracks)?))
    }

    /// Accept test on natural-number arguments (canonically encoded).
    pub fn accepts_values(&self, values: &[u64]) -> Result<bool> {
        let tracks: Vec<DigitString> = values.iter().map(|&v| self.system.encode(v)).collect();
        self.accepts(&tracks)
    }

    /// Output of an output automaton on natural-number arguments.
    pub fn output_on(&self, values: &[u64]) -> Result<Option<i64>> {
        let tracks: Vec<DigitString> = values.iter().map(|&v| self.system.encode(v)).collect();
        let s = self.run(&tracks)?;
        Ok(if self.is_accepting(s) {
            self.output(s)
        } else {
            None
        })
    }

    /// Drop outputs, keeping the accepting set.
    pub fn without_outputs(&self) -> Automaton {
        let mut raw = self.to_raw();
        raw.outputs = None;
        Self::from_raw(self.system.clone(), self.arity, raw)
    }

    /// For an output automaton: the relation "input maps to `value`".
    pub fn output_preimage(&self, value: i64) -> Result<Automaton> {
        let outputs = self
            .outputs
            .as_ref()
            .ok_or_else(|| Error::Automaton("not an output automaton".into()))?;
        let accepting = self
            .accepting
            .iter()
            .zip(outputs)
            .map(|(&acc, &o)| acc && o == value)
            .collect();
        Ok(Self::from_raw(
            self.system.clone(),
            self.arity,
            RawDfa {
                initial: self.initial,
                trans: self.trans.clone(),
                accepting,
                outputs: None,
            },
        ))
    }

    /// Distinct outputs over reachable accepting states.
    pub fn output_values(&self) -> Vec<i64> {
        let mut vals: Vec<i64> = match &self.outputs {
            Some(o) => (0..self.total_states())
                .filter(|&s| self.accepting[s])
                .map(|s| o[s])
                .collect(),
            None => vec![],
        };
        vals.sort_unstable();
        vals.dedup();
        vals
    }

    pub(crate) fn to_raw(&self) -> RawDfa {
        RawDfa {
            initial: self.initial,
            trans: self.trans.clone(),
            accepting: self.accepting.clone(),
            outputs: self.outputs.clone(),
        }
    }

    /// Structural hash, invariant under state renaming because numbering is
    /// canonical.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.arity.hash(&mut h);
        self.radix.hash(&mut h);
        self.initial.hash(&mut h);
        self.trans.hash(&mut h);
        self.accepting.hash(&mut h);
        self.outputs.hash(&mut h);
        h.finish()
    }

    /// Renumber breadth-first from the initial state (letters in order), sink
    /// last, dropping unreachable states.
    pub(crate) fn canonical_order(mut self) -> Self {
        let n = self.total_states();
        let k = self.alphabet;
        let sink = find_sink(&self);
        let mut order = vec![u32::MAX; n];
        let mut seq = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        let visit = |s: u32, order: &mut Vec<u32>, seq: &mut Vec<u32>, queue: &mut VecDeque<u32>| {
            if order[s as usize] == u32::MAX && Some(s) != sink {
                order[s as usize] = seq.len() as u32;
                seq.push(s);
                queue.push_back(s);
            }
        };
        let mut sink_reached = false;
        if Some(self.initial) == sink {
            sink_reached = true;
        } else {
            visit(self.initial, &mut order, &mut seq, &mut queue);
        }
        while let Some(s) = queue.pop_front() {
            for l in 0..k {
                let t = self.trans[s as usize * k + l];
                if Some(t) == sink {
                    sink_reached = true;
                } else {
                    visit(t, &mut order, &mut seq, &mut queue);
                }
            }
        }
        if sink_reached {
            let s = sink.unwrap();
            order[s as usize] = seq.len() as u32;
            seq.push(s);
        }
        let mut trans = Vec::with_capacity(seq.len() * k);
        for &s in &seq {
            for l in 0..k {
                trans.push(order[self.trans[s as usize * k + l] as usize]);
            }
        }
        let accepting = seq.iter().map(|&s| self.accepting[s as usize]).collect();
        let outputs = self
            .outputs
            .as_ref()
            .map(|o| seq.iter().map(|&s| o[s as usize]).collect());
        self.initial = order[self.initial as usize];
        self.trans = trans;
        self.accepting = accepting;
        self.outputs = outputs;
        self.sink = if sink_reached {
            Some(seq.len() as u32 - 1)
        } else {
            None
        };
        self
    }
}

/// A rejecting state with every transition looping back to itself.
fn find_sink(a: &Automaton) -> Option<u32> {
    (0..a.total_states() as u32).find(|&s| {
        !a.accepting[s as usize]
            && a.outputs.as_ref().is_none_or(|o| o[s as usize] == 0)
            && a.row(s).iter().all(|&t| t == s)
    })
}

pub(crate) fn alphabet_size(radix: usize, arity: usize) -> usize {
    radix.pow(arity as u32)
}

pub(crate) fn encode_letter(radix: usize, digits: &[u8]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * radix + d as usize)
}

pub(crate) fn decode_letter(radix: usize, arity: usize, mut letter: usize) -> Vec<u8> {
    let mut out = vec![0u8; arity];
    for j in (0..arity).rev() {
        out[j] = (letter % radix) as u8;
        letter /= radix;
    }
    out
}

/// A synchronized relation: an automaton whose language is contained in the
/// canonical parallel representations of the tuples it relates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynchronizedRelation {
    pub automaton: Automaton,
    pub label: String,
}

impl SynchronizedRelation {
    /// Wrap an automaton, restricting it to canonical inputs.
    pub fn new(automaton: Automaton, label: impl Into<String>) -> Result<Self> {
        let canon = crate::builders::canonical_recognizer(automaton.system(), automaton.arity());
        let automaton = automaton.product(&canon, BoolOp::And)?;
        Ok(SynchronizedRelation {
            automaton,
            label: label.into(),
        })
    }

    pub fn state_count(&self) -> usize {
        self.automaton.state_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_round_trip_in_lexicographic_order() {
        let radix = 4;
        let mut prev: Option<Vec<u8>> = None;
        for l in 0..alphabet_size(radix, 3) {
            let d = decode_letter(radix, 3, l);
            assert_eq!(encode_letter(radix, &d), l);
            if let Some(p) = prev {
                assert!(p < d);
            }
            prev = Some(d);
        }
    }
}
