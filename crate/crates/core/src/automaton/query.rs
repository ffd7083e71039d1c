//! Emptiness, finiteness and enumeration.

use std::collections::VecDeque;

use super::Automaton;
use crate::error::{Error, Result};
use crate::numeration::DigitString;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// A shortest accepted word, one digit string per track.
    NonEmpty(Vec<DigitString>),
}

impl Automaton {
    /// Emptiness test with a shortest witness.
    pub fn decide(&self) -> Emptiness {
        let n = self.total_states();
        let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial as usize] = true;
        while let Some(s) = queue.pop_front() {
            if self.accepting[s as usize] {
                let mut letters = Vec::new();
                let mut cur = s;
                while let Some((p, l)) = parent[cur as usize] {
                    letters.push(l as usize);
                    cur = p;
                }
                letters.reverse();
                return Emptiness::NonEmpty(self.letters_to_tracks(&letters));
            }
            for l in 0..self.alphabet {
                let t = self.next(s, l);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some((s, l as u32));
                    queue.push_back(t);
                }
            }
        }
        Emptiness::Empty
    }

    pub fn is_empty(&self) -> bool {
        self.decide() == Emptiness::Empty
    }

    /// Truth value of an arity-0 automaton (a compiled sentence).
    pub fn truth(&self) -> bool {
        self.is_accepting(self.initial)
    }

    /// Whether finitely many tuples are accepted. Leading zero letters are
    /// not counted as distinct words.
    pub fn is_finite(&self) -> bool {
        let live = self.co_reachable();
        let started = self.started_states(&live);
        // Cycle detection among live states reachable after a nonzero letter.
        let n = self.total_states();
        let mut color = vec![0u8; n];
        for root in 0..n {
            if !started[root] || color[root] != 0 {
                continue;
            }
            let mut stack: Vec<(u32, usize)> = vec![(root as u32, 0)];
            color[root] = 1;
            while let Some(&(s, l)) = stack.last() {
                if l == self.alphabet {
                    color[s as usize] = 2;
                    stack.pop();
                    continue;
                }
                stack.last_mut().unwrap().1 += 1;
                let t = self.next(s, l);
                if !started[t as usize] {
                    continue;
                }
                match color[t as usize] {
                    0 => {
                        color[t as usize] = 1;
                        stack.push((t, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Accepted tuples, shortest representations first and lexicographic
    /// within a length. `limit = None` requires a finite language.
    pub fn enumerate(&self, limit: Option<usize>) -> Result<Vec<Vec<u64>>> {
        if limit.is_none() && !self.is_finite() {
            return Err(Error::Automaton(
                "cannot enumerate an infinite language without a limit".into(),
            ));
        }
        let cap = limit.unwrap_or(usize::MAX);
        let mut out = Vec::new();
        let mut lengths = self.by_length();
        while out.len() < cap {
            let Some(batch) = lengths.next_batch(self)? else {
                break;
            };
            out.extend(batch.into_iter().take(cap - out.len()));
        }
        Ok(out)
    }

    /// The `k` accepted tuples with the smallest largest component (ties
    /// broken lexicographically). For the graph of an increasing sequence
    /// these are its first `k` terms.
    pub fn smallest(&self, k: usize) -> Result<Vec<Vec<u64>>> {
        let key = |t: &Vec<u64>| (t.iter().copied().max().unwrap_or(0), t.clone());
        let mut pending: Vec<Vec<u64>> = Vec::new();
        let mut out = Vec::new();
        let mut lengths = self.by_length();
        while out.len() < k {
            let done = match lengths.next_batch(self)? {
                Some(batch) => {
                    pending.extend(batch);
                    false
                }
                None => true,
            };
            // Everything below q_len has been seen once words of length
            // `len` are exhausted.
            let limit = if done {
                u64::MAX
            } else {
                self.system.try_q(lengths.len - 1).unwrap_or(u64::MAX)
            };
            pending.sort_by_key(key);
            let ready = pending
                .iter()
                .take_while(|t| done || t.iter().all(|&v| v < limit))
                .count();
            out.extend(pending.drain(..ready).take(k - out.len()));
            if done {
                break;
            }
        }
        Ok(out)
    }

    fn by_length(&self) -> Lengths {
        Lengths {
            len: 0,
            accept_in: vec![self.accepting.clone()],
            max_len: if self.is_finite() {
                self.total_states() + 1
            } else {
                usize::MAX
            },
            exhausted: false,
        }
    }

    /// Accepted words of exactly `len` letters with a nonzero first letter.
    fn words_of_length(&self, len: usize, accept_in: &[Vec<bool>]) -> Result<Vec<Vec<u64>>> {
        let mut out = Vec::new();
        let mut word: Vec<usize> = Vec::with_capacity(len);
        let mut stack: Vec<(u32, usize)> = vec![(self.initial, 1)];
        while let Some(&(s, l)) = stack.last() {
            let depth = stack.len() - 1;
            if depth == len {
                if self.accepting[s as usize] {
                    out.push(self.decode_word(&word)?);
                }
                stack.pop();
                word.pop();
                continue;
            }
            if l >= self.alphabet {
                stack.pop();
                word.pop();
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let t = self.next(s, l);
            if accept_in[len - depth - 1][t as usize] {
                word.push(l);
                stack.push((t, 0));
            }
        }
        Ok(out)
    }

    fn decode_word(&self, letters: &[usize]) -> Result<Vec<u64>> {
        self.letters_to_tracks(letters)
            .iter()
            .map(|t| self.system.decode(t))
            .collect()
    }

    pub(crate) fn letters_to_tracks(&self, letters: &[usize]) -> Vec<DigitString> {
        let mut tracks = vec![Vec::with_capacity(letters.len()); self.arity];
        for &l in letters {
            for (j, d) in self.decode_letter(l).into_iter().enumerate() {
                tracks[j].push(d);
            }
        }
        tracks.into_iter().map(DigitString::from).collect()
    }

    /// States from which an accepting state is reachable.
    fn co_reachable(&self) -> Vec<bool> {
        let n = self.total_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for s in 0..n as u32 {
            for &t in self.row(s) {
                rev[t as usize].push(s);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&s| live[s as usize]).collect();
        while let Some(t) = stack.pop() {
            for &s in &rev[t as usize] {
                if !live[s as usize] {
                    live[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        live
    }

    /// Live states reachable by a word whose first letter is nonzero.
    fn started_states(&self, live: &[bool]) -> Vec<bool> {
        let n = self.total_states();
        let mut mark = vec![false; n];
        let mut stack = Vec::new();
        for l in 1..self.alphabet {
            let t = self.next(self.initial, l);
            if live[t as usize] && !mark[t as usize] {
                mark[t as usize] = true;
                stack.push(t);
            }
        }
        while let Some(s) = stack.pop() {
            for &t in self.row(s) {
                if live[t as usize] && !mark[t as usize] {
                    mark[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        mark
    }
}

/// Iterates over representation lengths 0, 1, 2, ...
struct Lengths {
    len: usize,
    /// `accept_in[r][s]`: some word of length exactly `r` leads `s` to
    /// acceptance.
    accept_in: Vec<Vec<bool>>,
    max_len: usize,
    exhausted: bool,
}

impl Lengths {
    fn next_batch(&mut self, aut: &Automaton) -> Result<Option<Vec<Vec<u64>>>> {
        if self.exhausted || self.len > self.max_len || (aut.arity == 0 && self.len > 0) {
            self.exhausted = true;
            return Ok(None);
        }
        let len = self.len;
        self.len += 1;
        if len == 0 {
            let mut out = Vec::new();
            if aut.accepting[aut.initial as usize] {
                out.push(vec![0; aut.arity]);
            }
            return Ok(Some(out));
        }
        while self.accept_in.len() < len {
            let prev = self.accept_in.last().unwrap();
            let row: Vec<bool> = (0..aut.total_states() as u32)
                .map(|s| aut.row(s).iter().any(|&t| prev[t as usize]))
                .collect();
            self.accept_in.push(row);
        }
        aut.words_of_length(len, &self.accept_in).map(Some)
    }
}
