//! Ostrowski numeration for a purely periodic quadratic irrational γ.
//!
//! A natural number is written `e_t … e_0` (most significant digit first) with
//! value `Σ e_i q_i`, where `q_i` are the convergent denominators of γ. The
//! canonical (greedy) digit strings are those obeying
//!
//! * `0 ≤ e_i ≤ a_{i+1}` for `i ≥ 1`,
//! * `e_i = a_{i+1}` implies `e_{i-1} = 0` for `i ≥ 1`,
//! * `0 ≤ e_0 < a_1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::quadratic::{cf_value, convergents, ConvergentTable, PeriodicCF, QuadraticReal};

#[derive(Clone, Debug)]
pub struct NumerationSystem {
    name: String,
    period: PeriodicCF,
    gamma: QuadraticReal,
    dmax: u8,
    /// `q_0, q_1, …` while they fit in a u64.
    q: Vec<u64>,
    /// `p_0, p_1, …` aligned with `q`.
    p: Vec<u64>,
}

impl PartialEq for NumerationSystem {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.period == other.period
    }
}

impl Eq for NumerationSystem {}

impl NumerationSystem {
    pub fn new(name: impl Into<String>, period: PeriodicCF) -> Result<Self> {
        let dmax = period.max_quotient();
        let dmax = u8::try_from(dmax)
            .map_err(|_| Error::InvalidPeriod(format!("partial quotient {dmax} is too large")))?;
        let gamma = cf_value(&period);
        let (mut q, mut p) = (vec![1u64], vec![0u64]);
        let (mut q_prev, mut p_prev) = (0u64, 1u64);
        for i in 1.. {
            let a = period.quotient(i);
            let last = q.len() - 1;
            let next_q = a
                .checked_mul(q[last])
                .and_then(|x| x.checked_add(q_prev));
            let next_p = a
                .checked_mul(p[last])
                .and_then(|x| x.checked_add(p_prev));
            match (next_q, next_p) {
                (Some(nq), Some(np)) => {
                    q_prev = q[last];
                    p_prev = p[last];
                    q.push(nq);
                    p.push(np);
                }
                _ => break,
            }
        }
        Ok(NumerationSystem {
            name: name.into(),
            period,
            gamma,
            dmax,
            q,
            p,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn period(&self) -> &PeriodicCF {
        &self.period
    }

    pub fn gamma(&self) -> &QuadraticReal {
        &self.gamma
    }

    pub fn dmax(&self) -> u8 {
        self.dmax
    }

    /// Number of digit values, `dmax + 1`.
    pub fn radix(&self) -> usize {
        self.dmax as usize + 1
    }

    /// Period length `m`.
    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Bound on the digit at position `i`, i.e. `a_{i+1}`, looked up by the
    /// phase `i mod m`.
    pub fn bound_at_phase(&self, phase: usize) -> u8 {
        self.period.period()[phase] as u8
    }

    /// `q_i` (panics past u64 range).
    pub fn q(&self, i: usize) -> u64 {
        self.q[i]
    }

    /// `q_i`, or `None` past the u64 range.
    pub fn try_q(&self, i: usize) -> Option<u64> {
        self.q.get(i).copied()
    }

    pub fn p(&self, i: usize) -> u64 {
        self.p[i]
    }

    pub fn convergents(&self, upto: usize) -> ConvergentTable {
        convergents(&self.period, upto)
    }

    pub fn encode(&self, mut n: u64) -> DigitString {
        if n == 0 {
            return DigitString::from(vec![0]);
        }
        let top = self.q.iter().rposition(|&q| q <= n).expect("q_0 = 1");
        let mut digits = Vec::with_capacity(top + 1);
        for i in (0..=top).rev() {
            let e = n / self.q[i];
            n -= e * self.q[i];
            digits.push(e as u8);
        }
        DigitString::from(digits)
    }

    pub fn decode(&self, x: &DigitString) -> Result<u64> {
        let len = x.len();
        let mut total: u64 = 0;
        for (j, &e) in x.digits().iter().enumerate() {
            if e > self.dmax {
                return Err(Error::DigitOutOfRange {
                    digit: e as u64,
                    dmax: self.dmax as u64,
                });
            }
            if e == 0 {
                continue;
            }
            let pos = len - 1 - j;
            let term = self
                .q
                .get(pos)
                .and_then(|&q| q.checked_mul(e as u64))
                .ok_or_else(|| Error::Arithmetic("value exceeds u64".into()))?;
            total = total
                .checked_add(term)
                .ok_or_else(|| Error::Arithmetic("value exceeds u64".into()))?;
        }
        Ok(total)
    }

    /// `Σ e_i p_i`, the companion sum over the numerators.
    pub fn decode_numerators(&self, x: &DigitString) -> u64 {
        let len = x.len();
        x.digits()
            .iter()
            .enumerate()
            .map(|(j, &e)| e as u64 * self.p[len - 1 - j])
            .sum()
    }

    pub fn is_canonical(&self, x: &DigitString) -> bool {
        let len = x.len();
        let m = self.period_len();
        let mut prev_saturated = false;
        for (j, &e) in x.digits().iter().enumerate() {
            let pos = len - 1 - j;
            let bound = self.bound_at_phase(pos % m);
            if prev_saturated && e != 0 {
                return false;
            }
            if pos == 0 {
                if e >= bound {
                    return false;
                }
            } else if e > bound {
                return false;
            }
            prev_saturated = e == bound;
        }
        true
    }

    /// Render digits: contiguous when every digit is a single decimal
    /// character, space separated otherwise.
    pub fn format_digits(&self, x: &DigitString) -> String {
        x.to_text(self.dmax)
    }
}

impl fmt::Display for NumerationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "msd_{} {}", self.name, self.period)
    }
}

/// Most-significant-first digit string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DigitString {
    digits: Vec<u8>,
}

impl DigitString {
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn to_text(&self, dmax: u8) -> String {
        let parts = self.digits.iter().map(|d| d.to_string());
        if dmax > 9 {
            parts.collect::<Vec<_>>().join(" ")
        } else {
            parts.collect()
        }
    }

    /// Parse either contiguous decimal digits or space-separated numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let digits: Option<Vec<u8>> = if text.contains(char::is_whitespace) {
            text.split_whitespace().map(|t| t.parse::<u8>().ok()).collect()
        } else {
            text.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        digits
            .map(DigitString::from)
            .ok_or_else(|| Error::Formula(format!("invalid digit string '{text}'")))
    }
}

impl From<Vec<u8>> for DigitString {
    fn from(digits: Vec<u8>) -> Self {
        DigitString { digits }
    }
}

/// Front-pad with zeros to a common length.
pub fn pad_parallel(xs: &[DigitString]) -> Vec<DigitString> {
    let width = xs.iter().map(|x| x.len()).max().unwrap_or(0);
    xs.iter()
        .map(|x| {
            let mut digits = vec![0u8; width - x.len()];
            digits.extend_from_slice(&x.digits);
            DigitString { digits }
        })
        .collect()
}
