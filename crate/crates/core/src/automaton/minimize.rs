//! Hopcroft partition refinement.

use std::collections::{HashMap, VecDeque};

use super::Automaton;

impl Automaton {
    /// Minimal equivalent automaton in canonical numbering.
    pub fn minimize(&self) -> Automaton {
        let trimmed = self.reachable_part();
        let n = trimmed.total_states();
        let k = trimmed.alphabet;
        if n == 0 {
            return trimmed;
        }

        // Outputs only matter on accepting states.
        let key = |s: usize| -> (bool, i64) {
            let acc = trimmed.accepting[s];
            let out = match &trimmed.outputs {
                Some(o) if acc => o[s],
                _ => 0,
            };
            (acc, out)
        };
        let mut class_ids: HashMap<(bool, i64), u32> = HashMap::new();
        let mut initial_class = vec![0u32; n];
        for (s, c) in initial_class.iter_mut().enumerate() {
            let next = class_ids.len() as u32;
            *c = *class_ids.entry(key(s)).or_insert(next);
        }
        let mut part = Partition::new(n, &initial_class, class_ids.len());

        // Predecessors grouped by target: (source, letter).
        let mut count = vec![0u32; n + 1];
        for &t in &trimmed.trans {
            count[t as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let offsets = count.clone();
        let mut fill = count;
        let mut preds = vec![(0u32, 0u32); trimmed.trans.len()];
        for s in 0..n {
            for l in 0..k {
                let t = trimmed.trans[s * k + l] as usize;
                preds[fill[t] as usize] = (s as u32, l as u32);
                fill[t] += 1;
            }
        }

        let mut work: VecDeque<u32> = VecDeque::new();
        let mut in_work = vec![false; part.block_count()];
        if part.block_count() > 1 {
            let largest = (0..part.block_count())
                .max_by_key(|&b| (part.size(b), std::cmp::Reverse(b)))
                .unwrap();
            for (b, flag) in in_work.iter_mut().enumerate() {
                if b != largest {
                    work.push_back(b as u32);
                    *flag = true;
                }
            }
        }

        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut used_letters: Vec<u32> = Vec::new();
        let mut splitter: Vec<u32> = Vec::new();
        while let Some(b) = work.pop_front() {
            in_work[b as usize] = false;
            splitter.clear();
            splitter.extend_from_slice(part.members(b as usize));
            for &t in &splitter {
                let (lo, hi) = (offsets[t as usize] as usize, offsets[t as usize + 1] as usize);
                for &(src, letter) in &preds[lo..hi] {
                    let bucket = &mut buckets[letter as usize];
                    if bucket.is_empty() {
                        used_letters.push(letter);
                    }
                    bucket.push(src);
                }
            }
            used_letters.sort_unstable();
            for &letter in &used_letters {
                let bucket = std::mem::take(&mut buckets[letter as usize]);
                for &src in &bucket {
                    part.mark(src);
                }
                for new_block in part.split_marked() {
                    in_work.push(false);
                    work.push_back(new_block as u32);
                    in_work[new_block] = true;
                }
                let mut bucket = bucket;
                bucket.clear();
                buckets[letter as usize] = bucket;
            }
            used_letters.clear();
        }

        // Quotient automaton.
        let blocks = part.block_count();
        let mut rep = vec![u32::MAX; blocks];
        for s in 0..n {
            let b = part.block_of(s);
            if rep[b] == u32::MAX {
                rep[b] = s as u32;
            }
        }
        let mut trans = Vec::with_capacity(blocks * k);
        for &r in &rep {
            for l in 0..k {
                let t = trimmed.trans[r as usize * k + l];
                trans.push(part.block_of(t as usize) as u32);
            }
        }
        let accepting = rep.iter().map(|&r| trimmed.accepting[r as usize]).collect();
        let outputs = trimmed.outputs.as_ref().map(|_| {
            rep.iter()
                .map(|&r| key(r as usize).1)
                .collect::<Vec<i64>>()
        });
        Automaton {
            system: trimmed.system.clone(),
            arity: trimmed.arity,
            radix: trimmed.radix,
            alphabet: k,
            initial: part.block_of(trimmed.initial as usize) as u32,
            trans,
            accepting,
            outputs,
            sink: None,
        }
        .canonical_order()
    }

    fn reachable_part(&self) -> Automaton {
        let n = self.total_states();
        let k = self.alphabet;
        let mut order = vec![u32::MAX; n];
        let mut seq = vec![self.initial];
        order[self.initial as usize] = 0;
        let mut i = 0;
        while i < seq.len() {
            let s = seq[i] as usize;
            for l in 0..k {
                let t = self.trans[s * k + l];
                if order[t as usize] == u32::MAX {
                    order[t as usize] = seq.len() as u32;
                    seq.push(t);
                }
            }
            i += 1;
        }
        let mut trans = Vec::with_capacity(seq.len() * k);
        for &s in &seq {
            for l in 0..k {
                trans.push(order[self.trans[s as usize * k + l] as usize]);
            }
        }
        Automaton {
            system: self.system.clone(),
            arity: self.arity,
            radix: self.radix,
            alphabet: k,
            initial: 0,
            trans,
            accepting: seq.iter().map(|&s| self.accepting[s as usize]).collect(),
            outputs: self
                .outputs
                .as_ref()
                .map(|o| seq.iter().map(|&s| o[s as usize]).collect()),
            sink: None,
        }
    }
}

/// Refinable partition of `0..n`; each block is a contiguous range of
/// `elems`, with its marked members at the front.
struct Partition {
    elems: Vec<u32>,
    loc: Vec<u32>,
    block: Vec<u32>,
    first: Vec<u32>,
    end: Vec<u32>,
    marked: Vec<u32>,
    touched: Vec<u32>,
}

impl Partition {
    fn new(n: usize, class: &[u32], classes: usize) -> Self {
        let mut size = vec![0u32; classes];
        for &c in class {
            size[c as usize] += 1;
        }
        let mut first = vec![0u32; classes];
        for c in 1..classes {
            first[c] = first[c - 1] + size[c - 1];
        }
        let end: Vec<u32> = (0..classes).map(|c| first[c] + size[c]).collect();
        let mut fill = first.clone();
        let mut elems = vec![0u32; n];
        let mut loc = vec![0u32; n];
        for (s, &c) in class.iter().enumerate() {
            let at = fill[c as usize];
            elems[at as usize] = s as u32;
            loc[s] = at;
            fill[c as usize] += 1;
        }
        Partition {
            elems,
            loc,
            block: class.to_vec(),
            first,
            end,
            marked: vec![0; classes],
            touched: Vec::new(),
        }
    }

    fn block_count(&self) -> usize {
        self.first.len()
    }

    fn size(&self, b: usize) -> u32 {
        self.end[b] - self.first[b]
    }

    fn block_of(&self, s: usize) -> usize {
        self.block[s] as usize
    }

    fn members(&self, b: usize) -> &[u32] {
        &self.elems[self.first[b] as usize..self.end[b] as usize]
    }

    fn mark(&mut self, s: u32) {
        let b = self.block[s as usize] as usize;
        let i = self.loc[s as usize];
        let j = self.first[b] + self.marked[b];
        if i < j {
            return; // already marked
        }
        let other = self.elems[j as usize];
        self.elems.swap(i as usize, j as usize);
        self.loc[other as usize] = i;
        self.loc[s as usize] = j;
        if self.marked[b] == 0 {
            self.touched.push(b as u32);
        }
        self.marked[b] += 1;
    }

    /// Split every touched block into marked/unmarked parts; the smaller part
    /// becomes the new block. Returns the new block ids.
    fn split_marked(&mut self) -> Vec<usize> {
        let mut created = Vec::new();
        let touched = std::mem::take(&mut self.touched);
        for b in touched {
            let b = b as usize;
            let m = self.marked[b];
            self.marked[b] = 0;
            if m == self.size(b) {
                continue;
            }
            let nb = self.first.len();
            let unmarked = self.size(b) - m;
            if m <= unmarked {
                // Marked prefix moves out.
                self.first.push(self.first[b]);
                self.end.push(self.first[b] + m);
                self.first[b] += m;
            } else {
                self.first.push(self.first[b] + m);
                self.end.push(self.end[b]);
                self.end[b] = self.first[b] + m;
            }
            self.marked.push(0);
            for i in self.first[nb]..self.end[nb] {
                let s = self.elems[i as usize];
                self.block[s as usize] = nb as u32;
            }
            created.push(nb);
        }
        created
    }
}
