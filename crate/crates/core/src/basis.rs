//! Additive properties of Beatty sequences: the least order of an
//! (asymptotic) additive basis, and the sums-complement set.

use std::sync::Arc;

use crate::automaton::Automaton;
use crate::builders::{beatty_sync, BeattySpec, Comparison, LinearRelationSpec};
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;
use crate::quadratic::QuadraticReal;
use crate::tracked::Tracked;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every natural number is a sum of `order` terms.
    Basis,
    /// All but the listed numbers are.
    Asymptotic { exceptional: Vec<u64> },
    /// No order up to the cap works.
    NotBasisAtCap,
}

#[derive(Clone, Debug)]
pub struct BasisReport {
    pub alpha: QuadraticReal,
    pub beta: QuadraticReal,
    /// The order found, or the cap when none was.
    pub order: usize,
    pub verdict: Verdict,
}

fn names(vs: &[&str]) -> Vec<String> {
    vs.iter().map(|v| v.to_string()).collect()
}

fn linear(
    system: &Arc<NumerationSystem>,
    vars: &[&str],
    coeffs: &[i64],
    c0: i64,
    cmp: Comparison,
) -> Result<Tracked> {
    let spec = LinearRelationSpec::new(coeffs.to_vec(), c0)?;
    Tracked::new(
        &names(vars),
        crate::builders::linear_automaton(system, &spec, cmp),
    )
}

/// Pairs `(n, ⌊nα + β⌋)` for `n ≥ first_index`.
pub fn sequence_relation(
    system: &Arc<NumerationSystem>,
    spec: &BeattySpec,
    first_index: u64,
) -> Result<Tracked> {
    let mut rel = Tracked::new(&names(&["n", "z"]), beatty_sync(system, spec)?.automaton)?;
    match first_index {
        0 => {
            let z0 = spec.value(system, 0)?;
            let z0 = i64::try_from(z0)
                .ok()
                .filter(|z| *z >= 0)
                .ok_or_else(|| Error::BeattySpec("⌊β⌋ must be a natural number".into()))?;
            let point = linear(system, &["n"], &[1], 0, Comparison::Eq)?
                .and(&linear(system, &["z"], &[1], z0, Comparison::Eq)?)?;
            rel = rel.or(&point)?;
        }
        1 => {}
        k => {
            let k = i64::try_from(k).map_err(|_| Error::Arithmetic("index too large".into()))?;
            rel = rel.and(&linear(system, &["n"], &[-1], -k, Comparison::Le)?)?;
        }
    }
    Ok(rel)
}

/// Search h = 1..=cap for the least h such that the h-fold sums of
/// `{⌊nα + β⌋ : n ≥ first_index}` cover all, or all but finitely many,
/// natural numbers.
pub fn find_min_basis_order(
    system: &Arc<NumerationSystem>,
    spec: &BeattySpec,
    cap: usize,
    first_index: u64,
) -> Result<BasisReport> {
    if cap == 0 {
        return Err(Error::Formula("cap must be at least 1".into()));
    }
    let alpha = spec.alpha(system)?;
    let beta = spec.beta(system)?;
    let terms = sequence_relation(system, spec, first_index)?.exists("n")?;
    let as_w = terms.rename(|_| "w".into())?;
    let sum = linear(system, &["w", "y", "z"], &[1, 1, -1], 0, Comparison::Eq)?;

    let mut sums = terms.clone();
    for h in 1..=cap {
        if h > 1 {
            let prev = sums.rename(|_| "y".into())?;
            sums = prev
                .and(&sum)?
                .exists("y")?
                .and(&as_w)?
                .exists("w")?;
        }
        let missing = sums.not().into_automaton();
        if missing.is_empty() {
            return Ok(BasisReport {
                alpha,
                beta,
                order: h,
                verdict: Verdict::Basis,
            });
        }
        if missing.is_finite() {
            let exceptional = missing
                .enumerate(None)?
                .into_iter()
                .map(|t| t[0])
                .collect();
            return Ok(BasisReport {
                alpha,
                beta,
                order: h,
                verdict: Verdict::Asymptotic { exceptional },
            });
        }
    }
    Ok(BasisReport {
        alpha,
        beta,
        order: cap,
        verdict: Verdict::NotBasisAtCap,
    })
}

/// `{n ≥ 1 : n ≠ ⌊iα⌋ - ⌊jα⌋ for all i, j ≥ 1}` (β is taken from `spec`
/// and cancels only when it is 0).
pub fn sums_complement(system: &Arc<NumerationSystem>, spec: &BeattySpec) -> Result<Automaton> {
    let seq = sequence_relation(system, spec, 1)?;
    let left = seq.rename(|v| if v == "n" { "i".into() } else { "x".into() })?;
    let right = seq.rename(|v| if v == "n" { "j".into() } else { "y".into() })?;
    let diff = linear(system, &["n", "x", "y"], &[1, 1, -1], 0, Comparison::Eq)?;
    let differences = left
        .and(&diff)?
        .exists("x")?
        .and(&right)?
        .exists("y")?
        .exists("i")?
        .exists("j")?;
    let positive = linear(system, &["n"], &[-1], -1, Comparison::Le)?;
    Ok(positive.combine(&differences, crate::automaton::BoolOp::AndNot)?.into_automaton())
}
