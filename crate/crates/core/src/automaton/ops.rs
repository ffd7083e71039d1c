//! Boolean products, complement, projection and leading-zero saturation.

use std::collections::HashMap;

use super::{alphabet_size, decode_letter, encode_letter, Automaton, RawDfa};
use crate::builders::canonical_recognizer;
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    AndNot,
    Xor,
    Iff,
}

impl BoolOp {
    fn apply(self, x: bool, y: bool) -> bool {
        match self {
            BoolOp::And => x && y,
            BoolOp::Or => x || y,
            BoolOp::AndNot => x && !y,
            BoolOp::Xor => x != y,
            BoolOp::Iff => x == y,
        }
    }
}

/// Frontier states are expanded in batches of this many; each batch's
/// successor rows are computed in parallel and then interned in order.
const BATCH: usize = 512;

/// Letter map from a union alphabet onto an operand's alphabet: operand track
/// `j` reads union track `tracks[j]`.
pub(crate) fn letter_map(radix: usize, union_arity: usize, tracks: &[usize]) -> Vec<u32> {
    let size = alphabet_size(radix, union_arity);
    (0..size)
        .map(|l| {
            let digits = decode_letter(radix, union_arity, l);
            let sub: Vec<u8> = tracks.iter().map(|&t| digits[t]).collect();
            encode_letter(radix, &sub) as u32
        })
        .collect()
}

impl Automaton {
    /// Boolean combination of two automata with identical track layout.
    pub fn product(&self, other: &Automaton, op: BoolOp) -> Result<Automaton> {
        if self.arity != other.arity {
            return Err(Error::Automaton(format!(
                "arity mismatch: {} vs {}",
                self.arity, other.arity
            )));
        }
        let tracks: Vec<usize> = (0..self.arity).collect();
        self.product_mapped(&tracks, other, &tracks, self.arity, op)
    }

    /// Boolean combination over a union of tracks: track `j` of `self` is
    /// union track `mine[j]`, likewise `theirs` for `other`. Tracks that an
    /// operand does not read are unconstrained by it.
    pub fn product_mapped(
        &self,
        mine: &[usize],
        other: &Automaton,
        theirs: &[usize],
        arity: usize,
        op: BoolOp,
    ) -> Result<Automaton> {
        self.check_same_system(other)?;
        let radix = self.radix;
        let map_a = letter_map(radix, arity, mine);
        let map_b = letter_map(radix, arity, theirs);
        let k = map_a.len();
        let (sink_a, sink_b) = (self.sink, other.sink);

        // Pair (x, y) collapses to a dead state when the result can no
        // longer accept.
        let dead_pair = |x: u32, y: u32| -> bool {
            let dx = Some(x) == sink_a;
            let dy = Some(y) == sink_b;
            match op {
                BoolOp::And => dx || dy,
                BoolOp::AndNot => dx,
                BoolOp::Or | BoolOp::Xor | BoolOp::Iff => false,
            }
        };
        let key = |x: u32, y: u32| ((x as u64) << 32) | y as u64;
        const DEAD: u64 = u64::MAX;

        let mut ids: HashMap<u64, u32> = HashMap::new();
        let mut states: Vec<u64> = Vec::new();
        let mut trans: Vec<u32> = Vec::new();
        let intern = |kk: u64, ids: &mut HashMap<u64, u32>, states: &mut Vec<u64>| -> u32 {
            *ids.entry(kk).or_insert_with(|| {
                states.push(kk);
                states.len() as u32 - 1
            })
        };
        let start = if dead_pair(self.initial, other.initial) {
            DEAD
        } else {
            key(self.initial, other.initial)
        };
        intern(start, &mut ids, &mut states);
        let mut done = 0;
        while done < states.len() {
            let hi = (done + BATCH).min(states.len());
            let batch: Vec<u64> = states[done..hi].to_vec();
            let rows: Vec<Vec<u64>> = par::map(&batch, |&st| {
                if st == DEAD {
                    return vec![DEAD; k];
                }
                let (x, y) = ((st >> 32) as u32, st as u32);
                let (ra, rb) = (self.row(x), other.row(y));
                (0..k)
                    .map(|l| {
                        let (nx, ny) = (ra[map_a[l] as usize], rb[map_b[l] as usize]);
                        if dead_pair(nx, ny) {
                            DEAD
                        } else {
                            key(nx, ny)
                        }
                    })
                    .collect()
            });
            for row in rows {
                for kk in row {
                    let id = intern(kk, &mut ids, &mut states);
                    trans.push(id);
                }
            }
            done = hi;
        }
        let accepting = states
            .iter()
            .map(|&st| {
                if st == DEAD {
                    return false;
                }
                let (x, y) = ((st >> 32) as u32, st as u32);
                op.apply(self.accepting[x as usize], other.accepting[y as usize])
            })
            .collect();
        Ok(Automaton::from_raw(
            self.system.clone(),
            arity,
            RawDfa {
                initial: 0,
                trans,
                accepting,
                outputs: None,
            },
        ))
    }

    /// Complement relative to canonical representations.
    pub fn complement(&self) -> Automaton {
        let mut raw = self.to_raw();
        raw.outputs = None;
        for acc in raw.accepting.iter_mut() {
            *acc = !*acc;
        }
        let flipped = Automaton::from_raw(self.system.clone(), self.arity, raw);
        let canon = canonical_recognizer(&self.system, self.arity);
        flipped
            .product(&canon, BoolOp::And)
            .expect("same system and arity")
    }

    /// Existentially quantify away one track.
    pub fn project(&self, track: usize) -> Result<Automaton> {
        if track >= self.arity {
            return Err(Error::Automaton(format!(
                "cannot project track {track} of an arity-{} automaton",
                self.arity
            )));
        }
        Ok(self.subset_construction(Some(track)))
    }

    /// Close the language under adding and removing leading zero letters:
    /// the result accepts `w` iff some `0^i w'` with `w = 0^j w'` is accepted.
    pub fn normalize_zeros(&self) -> Automaton {
        self.subset_construction(None)
    }

    /// Determinize after erasing `erased` (if any), starting from the set of
    /// states reachable by zero letters, and keep accepting words that differ
    /// only in leading zeros.
    fn subset_construction(&self, erased: Option<usize>) -> Automaton {
        let radix = self.radix;
        let out_arity = self.arity - usize::from(erased.is_some());
        let out_k = alphabet_size(radix, out_arity);
        // expand[l'] lists the input letters that map onto output letter l'.
        let expand: Vec<Vec<u32>> = (0..out_k)
            .map(|l| {
                let digits = decode_letter(radix, out_arity, l);
                match erased {
                    Some(track) => (0..radix as u8)
                        .map(|d| {
                            let mut full = digits.clone();
                            full.insert(track, d);
                            encode_letter(radix, &full) as u32
                        })
                        .collect(),
                    None => vec![l as u32],
                }
            })
            .collect();
        let sink = self.sink;

        let step = |set: &[u32], l: usize| -> Vec<u32> {
            let mut next: Vec<u32> = Vec::with_capacity(set.len() * expand[l].len());
            for &s in set {
                let row = self.row(s);
                for &full in &expand[l] {
                    let t = row[full as usize];
                    if Some(t) != sink {
                        next.push(t);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            next
        };

        // Zero closure of the initial state.
        let mut zc: Vec<u32> = if Some(self.initial) == sink {
            vec![]
        } else {
            vec![self.initial]
        };
        loop {
            let mut grown = zc.clone();
            grown.extend(step(&zc, 0));
            grown.sort_unstable();
            grown.dedup();
            if grown == zc {
                break;
            }
            zc = grown;
        }

        // States are (set, only-zeros-so-far). The flagged state always holds
        // the zero closure.
        let mut ids: HashMap<(Vec<u32>, bool), u32> = HashMap::new();
        let mut states: Vec<(Vec<u32>, bool)> = Vec::new();
        let mut trans: Vec<u32> = Vec::new();
        let intern = |key: (Vec<u32>, bool),
                      ids: &mut HashMap<(Vec<u32>, bool), u32>,
                      states: &mut Vec<(Vec<u32>, bool)>|
         -> u32 {
            if let Some(&id) = ids.get(&key) {
                return id;
            }
            let id = states.len() as u32;
            states.push(key.clone());
            ids.insert(key, id);
            id
        };
        intern((zc.clone(), true), &mut ids, &mut states);
        let mut done = 0;
        while done < states.len() {
            let hi = (done + BATCH).min(states.len());
            let batch: Vec<(Vec<u32>, bool)> = states[done..hi].to_vec();
            let rows: Vec<Vec<(Vec<u32>, bool)>> = par::map(&batch, |(set, flag)| {
                (0..out_k)
                    .map(|l| {
                        if *flag && l == 0 {
                            (zc.clone(), true)
                        } else {
                            (step(set, l), false)
                        }
                    })
                    .collect()
            });
            for row in rows {
                for key in row {
                    let id = intern(key, &mut ids, &mut states);
                    trans.push(id);
                }
            }
            done = hi;
        }
        let accepting = states
            .iter()
            .map(|(set, _)| set.iter().any(|&s| self.accepting[s as usize]))
            .collect();
        Automaton::from_raw(
            self.system.clone(),
            out_arity,
            RawDfa {
                initial: 0,
                trans,
                accepting,
                outputs: None,
            },
        )
    }

    /// Reorder and widen tracks: track `j` of the result reads old track
    /// `source[j]`, or is unconstrained when `source[j]` is `None`.
    pub fn remap_tracks(&self, source: &[Option<usize>]) -> Automaton {
        let radix = self.radix;
        let arity = source.len();
        let k = alphabet_size(radix, arity);
        let map: Vec<u32> = (0..k)
            .map(|l| {
                let digits = decode_letter(radix, arity, l);
                let mut old = vec![0u8; self.arity];
                for (j, src) in source.iter().enumerate() {
                    if let Some(i) = src {
                        old[*i] = digits[j];
                    }
                }
                encode_letter(radix, &old) as u32
            })
            .collect();
        let n = self.total_states();
        let mut trans = Vec::with_capacity(n * k);
        for s in 0..n as u32 {
            let row = self.row(s);
            trans.extend(map.iter().map(|&l| row[l as usize]));
        }
        Automaton::from_raw(
            self.system.clone(),
            arity,
            RawDfa {
                initial: self.initial,
                trans,
                accepting: self.accepting.clone(),
                outputs: self.outputs.clone(),
            },
        )
    }
}
