#![allow(dead_code)]

use std::sync::Arc;

use num_integer::{Integer, Roots};
use obd_core::{NumerationSystem, PeriodicCF};

/// A system together with γ = (√d − r)/s, written out by hand.
pub struct Closed {
    pub period: &'static [u64],
    pub d: i128,
    pub r: i128,
    pub s: i128,
}

pub const SYSTEMS: &[Closed] = &[
    Closed { period: &[1], d: 5, r: 1, s: 2 },
    Closed { period: &[2], d: 2, r: 1, s: 1 },
    Closed { period: &[3, 1], d: 21, r: 3, s: 6 },
    Closed { period: &[4, 1, 1, 1], d: 7, r: 2, s: 3 },
];

pub fn system(name: &str, period: &[u64]) -> Arc<NumerationSystem> {
    Arc::new(NumerationSystem::new(name, PeriodicCF::new(period.to_vec()).unwrap()).unwrap())
}

impl Closed {
    pub fn system(&self) -> Arc<NumerationSystem> {
        let name: Vec<String> = self.period.iter().map(|a| a.to_string()).collect();
        system(&format!("p{}", name.join("_")), self.period)
    }

    /// ⌊y√d⌋ for any integer y (d is not a square).
    fn floor_sqrt_multiple(&self, y: i128) -> i128 {
        let root = Roots::sqrt(&((y * y * self.d) as u128)) as i128;
        if y >= 0 {
            root
        } else {
            -root - 1
        }
    }

    /// ⌊(x + y·γ)/c⌋.
    pub fn floor(&self, x: i128, y: i128, c: i128) -> i128 {
        // (x + y(√d − r)/s)/c = (sx − ry + y√d)/(sc)
        let num = self.s * x - self.r * y + self.floor_sqrt_multiple(y);
        Integer::div_floor(&num, &(self.s * c))
    }

    /// ⌊nγ⌋.
    pub fn floor_n_gamma(&self, n: u64) -> u64 {
        self.floor(0, n as i128, 1) as u64
    }

    /// ⌊n(a + bγ)/c + (d + eγ)/c⌋.
    pub fn beatty(&self, spec: [i64; 5], n: u64) -> i128 {
        let [a, b, c, d, e] = spec.map(|v| v as i128);
        let n = n as i128;
        self.floor(a * n + d, b * n + e, c)
    }
}

/// All digit strings of exactly `len` digits obeying the Ostrowski rules,
/// checked digit by digit from the rules themselves.
pub fn canonical_strings(period: &[u64], len: usize) -> Vec<Vec<u8>> {
    let bound = |pos: usize| period[pos % period.len()] as u8;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(
        len: usize,
        bound: &dyn Fn(usize) -> u8,
        cur: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let pos = len - 1 - cur.len();
        let forced_zero = cur
            .last()
            .is_some_and(|&prev| prev == bound(pos + 1));
        let top = if forced_zero {
            0
        } else if pos == 0 {
            bound(0) - 1
        } else {
            bound(pos)
        };
        for e in 0..=top {
            cur.push(e);
            go(len, bound, cur, out);
            cur.pop();
        }
    }
    go(len, &bound, &mut cur, &mut out);
    out
}

/// Value of a digit string from denominators built by the recurrence.
pub fn value(period: &[u64], digits: &[u8]) -> u64 {
    let mut q = vec![1u64, period[0]];
    while q.len() < digits.len() {
        let i = q.len();
        q.push(period[(i - 1) % period.len()] * q[i - 1] + q[i - 2]);
    }
    digits
        .iter()
        .rev()
        .enumerate()
        .map(|(i, &e)| e as u64 * q[i])
        .sum()
}
