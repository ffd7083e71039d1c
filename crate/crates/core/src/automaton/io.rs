//! Plain-text serialization and DOT export.
//!
//! ```text
//! system s13 arity 2 dmax 3
//! states 4 initial 0
//! accepting 0 2
//! outputs 0:0 1:1 2:-1 3:0
//! 0 [0,0] 0
//! 0 [1,1] 1
//! ```
//!
//! The rejecting sink is not written; missing transitions lead to it.

use std::fmt::Write as _;
use std::sync::Arc;

use super::{alphabet_size, decode_letter, encode_letter, Automaton, RawDfa};
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;

fn letter_text(digits: &[u8]) -> String {
    let parts: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
    format!("[{}]", parts.join(","))
}

impl Automaton {
    pub fn to_text(&self) -> String {
        let live = self.state_count();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "system {} arity {} dmax {}",
            self.system.name(),
            self.arity,
            self.radix - 1
        );
        if live == 0 {
            out.push_str("states 0 initial 0\naccepting\n");
            return out;
        }
        let _ = writeln!(out, "states {} initial {}", live, self.initial);
        out.push_str("accepting");
        for s in 0..live {
            if self.accepting[s] {
                let _ = write!(out, " {s}");
            }
        }
        out.push('\n');
        if let Some(outputs) = &self.outputs {
            out.push_str("outputs");
            for (s, v) in outputs.iter().enumerate().take(live) {
                let _ = write!(out, " {s}:{v}");
            }
            out.push('\n');
        }
        for s in 0..live as u32 {
            for l in 0..self.alphabet {
                let t = self.next(s, l);
                if Some(t) != self.sink {
                    let _ = writeln!(out, "{} {} {}", s, letter_text(&self.decode_letter(l)), t);
                }
            }
        }
        out
    }

    /// Parse the text format; `resolve` maps a system name to its definition.
    pub fn from_text(
        text: &str,
        resolve: impl Fn(&str) -> Option<Arc<NumerationSystem>>,
    ) -> Result<Automaton> {
        let err = |line: usize, msg: &str| Error::Format {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next_line = |what: &str| {
            lines
                .next()
                .ok_or_else(|| err(0, &format!("missing {what} line")))
        };

        let (ln, header) = next_line("system")?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "system" || h[2] != "arity" || h[4] != "dmax" {
            return Err(err(ln, "expected 'system <name> arity <k> dmax <d>'"));
        }
        let system = resolve(h[1]).ok_or_else(|| Error::UnknownSystem(h[1].to_string()))?;
        let arity: usize = h[3].parse().map_err(|_| err(ln, "bad arity"))?;
        let dmax: u8 = h[5].parse().map_err(|_| err(ln, "bad dmax"))?;
        if dmax != system.dmax() {
            return Err(err(ln, "dmax does not match the numeration system"));
        }

        let (ln, counts) = next_line("states")?;
        let c: Vec<&str> = counts.split_whitespace().collect();
        if c.len() != 4 || c[0] != "states" || c[2] != "initial" {
            return Err(err(ln, "expected 'states <n> initial <i>'"));
        }
        let n: usize = c[1].parse().map_err(|_| err(ln, "bad state count"))?;
        let initial: u32 = c[3].parse().map_err(|_| err(ln, "bad initial state"))?;
        if n == 0 {
            return Ok(Automaton::empty(system, arity));
        }
        if initial as usize >= n {
            return Err(err(ln, "initial state out of range"));
        }

        let radix = system.radix();
        let k = alphabet_size(radix, arity);
        let sink = n as u32;
        let mut trans = vec![sink; (n + 1) * k];
        let mut accepting = vec![false; n + 1];
        let mut outputs: Option<Vec<i64>> = None;

        let parse_state = |ln: usize, tok: &str| -> Result<usize> {
            let s: usize = tok.parse().map_err(|_| err(ln, "bad state number"))?;
            if s >= n {
                return Err(err(ln, "state out of range"));
            }
            Ok(s)
        };

        let (ln, acc) = next_line("accepting")?;
        let mut toks = acc.split_whitespace();
        if toks.next() != Some("accepting") {
            return Err(err(ln, "expected 'accepting ...'"));
        }
        for tok in toks {
            accepting[parse_state(ln, tok)?] = true;
        }

        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("outputs") {
                let o = outputs.get_or_insert_with(|| vec![0; n + 1]);
                for tok in rest.split_whitespace() {
                    let (s, v) = tok
                        .split_once(':')
                        .ok_or_else(|| err(ln, "expected state:value"))?;
                    o[parse_state(ln, s)?] = v.parse().map_err(|_| err(ln, "bad output value"))?;
                }
                continue;
            }
            let open = line.find('[').ok_or_else(|| err(ln, "missing letter"))?;
            let close = line.find(']').ok_or_else(|| err(ln, "unterminated letter"))?;
            let src = parse_state(ln, line[..open].trim())?;
            let dst = parse_state(ln, line[close + 1..].trim())?;
            let inner = line[open + 1..close].trim();
            let digits: Vec<u8> = if inner.is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|d| d.trim().parse::<u8>().map_err(|_| err(ln, "bad digit")))
                    .collect::<Result<_>>()?
            };
            if digits.len() != arity || digits.iter().any(|&d| d > dmax) {
                return Err(err(ln, "letter does not fit the alphabet"));
            }
            trans[src * k + encode_letter(radix, &digits)] = dst as u32;
        }
        for l in 0..k {
            trans[n * k + l] = sink;
        }
        Ok(Automaton::from_raw(
            system,
            arity,
            RawDfa {
                initial,
                trans,
                accepting,
                outputs,
            },
        ))
    }

    /// Graphviz rendering, one edge line per transition.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{name}\" {{");
        out.push_str("  rankdir = LR;\n  __start [shape = point];\n");
        for s in 0..self.state_count() {
            let shape = if self.accepting[s] { "doublecircle" } else { "circle" };
            let label = match &self.outputs {
                Some(o) => format!("{s}/{}", o[s]),
                None => s.to_string(),
            };
            let _ = writeln!(out, "  {s} [shape = {shape}, label = \"{label}\"];");
        }
        if self.state_count() > 0 {
            let _ = writeln!(out, "  __start -> {};", self.initial);
        }
        for s in 0..self.state_count() as u32 {
            for l in 0..self.alphabet {
                let t = self.next(s, l);
                if Some(t) != self.sink {
                    let letter = letter_text(&decode_letter(self.radix, self.arity, l));
                    let _ = writeln!(out, "  {s} -> {t} [label = \"{letter}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
