//! Constructions of the basic synchronized relations.
//!
//! Every digit-level relation is driven by a [`PhaseMachine`]: a small
//! machine that reads digit tuples most significant first and needs to know
//! the position of each digit modulo the period length. The position is not
//! known while reading, so the driver runs one copy of the machine per
//! possible phase and lets the last digit decide which copy counts. The same
//! driver enforces the canonical digit rules on every track.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::automaton::{Automaton, RawDfa, SynchronizedRelation};
use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;
use crate::par;
use crate::quadratic::QuadraticReal;
use crate::tracked::Tracked;

pub(crate) trait PhaseMachine: Sync {
    type State: Clone + Eq + Hash + Send + Sync;

    fn start(&self) -> Self::State;

    /// Consume one digit tuple at a position `i` with `i mod m = phase`
    /// and digit bound `bound` (the partial quotient `a_{i+1}`). `None`
    /// means reject.
    fn step(&self, state: &Self::State, phase: usize, bound: u8, digits: &[u8])
        -> Option<Self::State>;

    fn accept(&self, state: &Self::State) -> bool;
}

/// Per phase hypothesis: saturation mask of the previous digit on each
/// track, plus the machine state. Index = phase of the next digit to read.
type Hypotheses<S> = Vec<Option<(u32, S)>>;

const BATCH: usize = 256;

pub(crate) fn drive<M: PhaseMachine>(
    system: &Arc<NumerationSystem>,
    arity: usize,
    machine: &M,
) -> Automaton {
    let radix = system.radix();
    let m = system.period_len();
    let k = radix.pow(arity as u32);
    let letters: Vec<Vec<u8>> = (0..k)
        .map(|l| {
            let mut out = vec![0u8; arity];
            let mut rest = l;
            for j in (0..arity).rev() {
                out[j] = (rest % radix) as u8;
                rest /= radix;
            }
            out
        })
        .collect();
    let bounds: Vec<u8> = (0..m).map(|h| system.bound_at_phase(h)).collect();

    let advance = |hyp: &Hypotheses<M::State>, digits: &[u8]| -> Hypotheses<M::State> {
        let mut next: Hypotheses<M::State> = vec![None; m];
        for (h, entry) in hyp.iter().enumerate() {
            let Some((mask, state)) = entry else { continue };
            let bound = bounds[h];
            let mut new_mask = 0u32;
            let mut ok = true;
            for (j, &d) in digits.iter().enumerate() {
                if d > bound || (mask >> j & 1 == 1 && d != 0) {
                    ok = false;
                    break;
                }
                if d == bound {
                    new_mask |= 1 << j;
                }
            }
            if !ok {
                continue;
            }
            if let Some(s) = machine.step(state, h, bound, digits) {
                next[(h + m - 1) % m] = Some((new_mask, s));
            }
        }
        next
    };

    let start: Hypotheses<M::State> = vec![Some((0, machine.start())); m];
    let mut ids: HashMap<Hypotheses<M::State>, u32> = HashMap::new();
    let mut states: Vec<Hypotheses<M::State>> = vec![start.clone()];
    ids.insert(start, 0);
    let mut trans: Vec<u32> = Vec::new();
    let mut done = 0;
    while done < states.len() {
        let hi = (done + BATCH).min(states.len());
        let rows: Vec<Vec<Hypotheses<M::State>>> = par::map(&states[done..hi], |hyp| {
            letters.iter().map(|d| advance(hyp, d)).collect()
        });
        for row in rows {
            for hyp in row {
                let id = match ids.get(&hyp) {
                    Some(&id) => id,
                    None => {
                        let id = states.len() as u32;
                        ids.insert(hyp.clone(), id);
                        states.push(hyp);
                        id
                    }
                };
                trans.push(id);
            }
        }
        done = hi;
    }
    // The last digit read sits at position 0: it must be below a_1, which
    // is exactly "not saturated" in the hypothesis now expecting phase m-1.
    let accepting = states
        .iter()
        .map(|hyp| match &hyp[m - 1] {
            Some((0, s)) => machine.accept(s),
            _ => false,
        })
        .collect();
    Automaton::from_raw(
        system.clone(),
        arity,
        RawDfa {
            initial: 0,
            trans,
            accepting,
            outputs: None,
        },
    )
}

struct Canonical;

impl PhaseMachine for Canonical {
    type State = ();
    fn start(&self) {}
    fn step(&self, _: &(), _: usize, _: u8, _: &[u8]) -> Option<()> {
        Some(())
    }
    fn accept(&self, _: &()) -> bool {
        true
    }
}

type CacheKey = (String, Vec<u64>, usize);

fn recognizer_cache() -> &'static Mutex<HashMap<CacheKey, Automaton>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Automaton>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Accepts exactly the k-tuples of (zero-padded) canonical digit strings.
pub fn canonical_recognizer(system: &Arc<NumerationSystem>, arity: usize) -> Automaton {
    let key = (
        system.name().to_string(),
        system.period().period().to_vec(),
        arity,
    );
    if let Some(a) = recognizer_cache().lock().unwrap().get(&key) {
        return a.clone();
    }
    let a = drive(system, arity, &Canonical);
    recognizer_cache().lock().unwrap().insert(key, a.clone());
    a
}

struct Equal;

impl PhaseMachine for Equal {
    type State = ();
    fn start(&self) {}
    fn step(&self, _: &(), _: usize, _: u8, d: &[u8]) -> Option<()> {
        (d[0] == d[1]).then_some(())
    }
    fn accept(&self, _: &()) -> bool {
        true
    }
}

/// The diagonal `x = y`.
pub fn equality(system: &Arc<NumerationSystem>) -> Automaton {
    drive(system, 2, &Equal)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Eq,
    Le,
}

/// `Σ c_j n_j = c_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRelationSpec {
    pub coeffs: Vec<i64>,
    pub c0: i64,
}

impl LinearRelationSpec {
    pub fn new(coeffs: Vec<i64>, c0: i64) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(|&c| c == 0) {
            return Err(Error::Formula(
                "linear relation needs a nonzero coefficient".into(),
            ));
        }
        Ok(LinearRelationSpec { coeffs, c0 })
    }

    /// Imbalances beyond this can no longer be cancelled by later digits.
    pub fn prune_bound(&self, system: &NumerationSystem) -> i64 {
        let weight: i64 = self.coeffs.iter().map(|c| c.abs()).sum();
        let dmax = system.dmax() as i64;
        let amax = system.period().max_quotient() as i64;
        weight * (dmax + 2) * (amax + 1) + self.c0.abs()
    }
}

/// Reads digits msd-first keeping the partial sum `Σ c_j n_j` as
/// `s·q_i + t·q_{i-1}`, where `i` is the position just read.
///
/// The digits still to come contribute between `-N·(q_i - 1)` and
/// `P·(q_i - 1)` (sums of the negative and positive coefficients), which
/// decides early whether the target is out of reach or, for `≤`, certain.
/// Only `i mod m` is known, so the test is run against every position of
/// that phase: exactly for the first few, through the range of
/// `q_{i-1}/q_i` for the rest.
struct Linear<'a> {
    coeffs: &'a [i64],
    c0: i64,
    bound: i64,
    cmp: Comparison,
    pos: i128,
    neg: i128,
    windows: Vec<Window>,
}

struct Window {
    /// `(q_i, q_{i-1})` for the early positions of this phase.
    early: Vec<(i128, i128)>,
    /// Hull of `q_{i-1}/q_i` over the remaining positions.
    ratio: (f64, f64),
    /// Least `q_i` among the remaining positions.
    least_q: f64,
}

#[derive(PartialEq)]
enum Reach {
    Dead,
    Open,
    Settled,
}

/// Marker for "already certainly ≤ c0".
const SETTLED: (i64, i64) = (i64::MIN, i64::MIN);

fn windows(system: &NumerationSystem) -> Vec<Window> {
    let m = system.period_len();
    let period = system.period().period();
    let a = |i: usize| period[(i - 1) % m] as i128;
    // q_i and q_{i-1} exactly until they are large; past that point the
    // ratio has converged to within far less than one unit of any state.
    let mut q: Vec<(i128, i128)> = vec![(1, 0)];
    while q.len() < 2 * m + 2 || q.last().unwrap().0 < 1 << 24 {
        let i = q.len();
        let (qi, qp) = q[i - 1];
        q.push((a(i) * qi + qp, qi));
    }
    let early_len = q.len();
    let mut rho = vec![0.0f64];
    for i in 1..early_len + 64 * m {
        rho.push(1.0 / (a(i) as f64 + rho[i - 1]));
    }
    (0..m)
        .map(|h| {
            let early = (h..early_len).step_by(m).map(|i| q[i]).collect();
            let first_tail = (early_len..).find(|i| i % m == h).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for r in rho[first_tail..].iter().step_by(m) {
                lo = lo.min(*r);
                hi = hi.max(*r);
            }
            Window {
                early,
                ratio: (lo - 1e-9, hi + 1e-9),
                least_q: q[early_len - 1].0 as f64,
            }
        })
        .collect()
}

impl Linear<'_> {
    fn reach(&self, phase: usize, x: i64, y: i64) -> Reach {
        let w = &self.windows[phase];
        let (c0, x, y) = (self.c0 as i128, x as i128, y as i128);
        let (mut possible, mut feasible, mut sure) = (false, false, true);
        for &(q, qp) in &w.early {
            let v = x * q + y * qp;
            let low = v - self.neg * (q - 1);
            let high = v + self.pos * (q - 1);
            possible |= low <= c0;
            feasible |= low <= c0 && c0 <= high;
            sure &= high <= c0;
        }
        // Scaled by 1/q_i: the partial sum lies in [vmin, vmax] and the
        // target c0/q_i between 0 and c0/least_q.
        let (fx, fy) = (x as f64, y as f64);
        let (v1, v2) = (fx + fy * w.ratio.0, fx + fy * w.ratio.1);
        let (vmin, vmax) = (v1.min(v2), v1.max(v2));
        let t = self.c0 as f64 / w.least_q;
        let (tlo, thi) = (t.min(0.0) - 1e-6, t.max(0.0) + 1e-6);
        let low_ok = vmin - self.neg as f64 <= thi;
        possible |= low_ok;
        feasible |= low_ok && vmax + self.pos as f64 >= tlo;
        sure &= vmax + self.pos as f64 <= tlo;
        match self.cmp {
            Comparison::Eq if feasible => Reach::Open,
            Comparison::Le if sure => Reach::Settled,
            Comparison::Le if possible => Reach::Open,
            _ => Reach::Dead,
        }
    }
}

impl PhaseMachine for Linear<'_> {
    type State = (i64, i64);

    fn start(&self) -> (i64, i64) {
        (0, 0)
    }

    fn step(
        &self,
        &(s, t): &(i64, i64),
        phase: usize,
        bound: u8,
        digits: &[u8],
    ) -> Option<(i64, i64)> {
        if (s, t) == SETTLED {
            return Some(SETTLED);
        }
        let delta: i64 = self
            .coeffs
            .iter()
            .zip(digits)
            .map(|(&c, &d)| c * d as i64)
            .sum();
        let s2 = s * bound as i64 + t + delta;
        if s2.abs() > self.bound {
            return match self.cmp {
                Comparison::Le if s2 < 0 => Some(SETTLED),
                _ => None,
            };
        }
        match self.reach(phase, s2, s) {
            Reach::Dead => None,
            Reach::Open => Some((s2, s)),
            Reach::Settled => Some(SETTLED),
        }
    }

    fn accept(&self, &(s, t): &(i64, i64)) -> bool {
        if (s, t) == SETTLED {
            return true;
        }
        match self.cmp {
            Comparison::Eq => s == self.c0,
            Comparison::Le => s <= self.c0,
        }
    }
}

/// `Σ c_j n_j = c_0` or `Σ c_j n_j ≤ c_0` over canonical tuples.
pub fn linear_automaton(
    system: &Arc<NumerationSystem>,
    spec: &LinearRelationSpec,
    cmp: Comparison,
) -> Automaton {
    let machine = Linear {
        coeffs: &spec.coeffs,
        c0: spec.c0,
        bound: spec.prune_bound(system),
        cmp,
        pos: spec.coeffs.iter().filter(|&&c| c > 0).sum::<i64>() as i128,
        neg: -spec.coeffs.iter().filter(|&&c| c < 0).sum::<i64>() as i128,
        windows: windows(system),
    };
    drive(system, spec.coeffs.len(), &machine)
}

pub fn linear_relation(
    system: &Arc<NumerationSystem>,
    spec: &LinearRelationSpec,
) -> Result<SynchronizedRelation> {
    let aut = linear_automaton(system, spec, Comparison::Eq);
    SynchronizedRelation::new(aut, format!("linear {:?} = {}", spec.coeffs, spec.c0))
}

/// Lexicographic comparison of two padded canonical strings.
struct Lex {
    strict: bool,
}

impl PhaseMachine for Lex {
    /// Ordering decided so far: -1 less, 0 equal, 1 greater.
    type State = i8;
    fn start(&self) -> i8 {
        0
    }
    fn step(&self, &o: &i8, _: usize, _: u8, d: &[u8]) -> Option<i8> {
        if o != 0 {
            return Some(o);
        }
        Some(d[0].cmp(&d[1]) as i8)
    }
    fn accept(&self, &o: &i8) -> bool {
        o < 0 || (!self.strict && o == 0)
    }
}

pub struct OrderRelations {
    pub eq: SynchronizedRelation,
    pub lt: SynchronizedRelation,
    pub leq: SynchronizedRelation,
}

pub fn order_relations(system: &Arc<NumerationSystem>) -> Result<OrderRelations> {
    Ok(OrderRelations {
        eq: SynchronizedRelation::new(equality(system), "eq")?,
        lt: SynchronizedRelation::new(drive(system, 2, &Lex { strict: true }), "lt")?,
        leq: SynchronizedRelation::new(drive(system, 2, &Lex { strict: false }), "leq")?,
    })
}

/// Tracks (u, v): the digits of u are those of v delayed by m positions.
struct Shift {
    m: usize,
}

impl PhaseMachine for Shift {
    /// The last m digits of v, oldest first.
    type State = Vec<u8>;
    fn start(&self) -> Vec<u8> {
        vec![0; self.m]
    }
    fn step(&self, window: &Vec<u8>, _: usize, _: u8, d: &[u8]) -> Option<Vec<u8>> {
        if d[0] != window[0] {
            return None;
        }
        let mut next = window[1..].to_vec();
        next.push(d[1]);
        Some(next)
    }
    fn accept(&self, window: &Vec<u8>) -> bool {
        window.iter().all(|&d| d == 0)
    }
}

/// Pairs (u, v) with `(v) = (u) 0^m`.
pub fn shift_relation(system: &Arc<NumerationSystem>) -> Result<SynchronizedRelation> {
    let aut = drive(
        system,
        2,
        &Shift {
            m: system.period_len(),
        },
    );
    SynchronizedRelation::new(aut, "shift")
}

fn names(vs: &[&str]) -> Vec<String> {
    vs.iter().map(|v| v.to_string()).collect()
}

fn lin(
    system: &Arc<NumerationSystem>,
    vars: &[&str],
    coeffs: &[i64],
    c0: i64,
    cmp: Comparison,
) -> Result<Tracked> {
    let spec = LinearRelationSpec::new(coeffs.to_vec(), c0)?;
    Tracked::new(&names(vars), linear_automaton(system, &spec, cmp))
}

fn u64_coeff(x: u64) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Arithmetic("coefficient exceeds i64".into()))
}

/// Pairs (n, ⌊nγ⌋) for all n ≥ 0, from
/// `(n=0 & z=0) | (Eu,v n=u+1 & shift(u,v) & v = q_{m-1}·z + q_m·u)`.
pub fn floor_gamma_sync(system: &Arc<NumerationSystem>) -> Result<SynchronizedRelation> {
    let m = system.period_len();
    let (qm, qm1) = (u64_coeff(system.q(m))?, u64_coeff(system.q(m - 1))?);
    let shift = Tracked::new(&names(&["u", "v"]), shift_relation(system)?.automaton)?;
    let basis = lin(system, &["u", "v", "z"], &[-qm, 1, -qm1], 0, Comparison::Eq)?;
    let succ = lin(system, &["n", "u"], &[1, -1], 1, Comparison::Eq)?;
    let body = succ.and(&shift.and(&basis)?.exists("v")?)?.exists("u")?;
    let zero = lin(system, &["n", "z"], &[1, 1], 0, Comparison::Eq)?;
    let rel = zero.or(&body)?;
    SynchronizedRelation::new(rel.into_automaton(), "floor_gamma")
}

/// α = (a + bγ)/c and β = (d + eγ)/c.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BeattySpec {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
}

impl BeattySpec {
    pub fn new(a: i64, b: i64, c: i64, d: i64, e: i64) -> Self {
        BeattySpec { a, b, c, d, e }
    }

    pub fn alpha(&self, system: &NumerationSystem) -> Result<QuadraticReal> {
        let g = system.gamma();
        QuadraticReal::integer(self.a)
            .add(&g.mul_rational(self.b, 1)?)?
            .mul_rational(1, self.c)
    }

    pub fn beta(&self, system: &NumerationSystem) -> Result<QuadraticReal> {
        let g = system.gamma();
        QuadraticReal::integer(self.d)
            .add(&g.mul_rational(self.e, 1)?)?
            .mul_rational(1, self.c)
    }

    /// Check `b ≥ 0`, `c ≥ 1`, `α ≥ 0` and `α + β ≥ 0`.
    pub fn validate(&self, system: &NumerationSystem) -> Result<()> {
        if self.b < 0 {
            return Err(Error::BeattySpec(format!("b = {} must be ≥ 0", self.b)));
        }
        if self.c < 1 {
            return Err(Error::BeattySpec(format!("c = {} must be ≥ 1", self.c)));
        }
        let alpha = self.alpha(system)?;
        if alpha.signum() < 0 {
            return Err(Error::BeattySpec(format!("α = {alpha} is negative")));
        }
        let sum = alpha.add(&self.beta(system)?)?;
        if sum.signum() < 0 {
            return Err(Error::BeattySpec(format!("α + β = {sum} is negative")));
        }
        Ok(())
    }

    /// ⌊nα + β⌋ by exact arithmetic.
    pub fn value(&self, system: &NumerationSystem, n: u64) -> Result<BigInt> {
        let n = BigInt::from(n);
        let g = system.gamma();
        let lin = QuadraticReal::integer(BigInt::from(self.a) * &n + self.d);
        let irr = g.mul_rational(BigInt::from(self.b) * &n + self.e, 1)?;
        Ok(lin.add(&irr)?.mul_rational(1, self.c)?.floor())
    }
}

/// The relation `(n, ⌊(f(bn+e) + an + d)/c⌋)` for a synchronized function
/// `f` given as pairs (argument, value). Defined for those n with
/// `bn + e ≥ 0`.
pub fn affine_compose(
    f: &SynchronizedRelation,
    b: i64,
    e: i64,
    a: i64,
    d: i64,
    c: i64,
) -> Result<SynchronizedRelation> {
    if c < 1 {
        return Err(Error::BeattySpec(format!("divisor {c} must be ≥ 1")));
    }
    let system = f.automaton.system().clone();
    let rel = compose_tracked(&system, f, b, e, a, d, c)?;
    SynchronizedRelation::new(rel.into_automaton(), format!("{} composed", f.label))
}

fn compose_tracked(
    system: &Arc<NumerationSystem>,
    f: &SynchronizedRelation,
    b: i64,
    e: i64,
    a: i64,
    d: i64,
    c: i64,
) -> Result<Tracked> {
    let fw = Tracked::new(&names(&["w", "u"]), f.automaton.clone())?;
    let arg = if b == 0 {
        lin(system, &["w"], &[1], e, Comparison::Eq)?
    } else {
        lin(system, &["n", "w"], &[-b, 1], e, Comparison::Eq)?
    };
    let lower = lin(system, &["n", "u", "z"], &[-a, -1, c], d, Comparison::Le)?;
    let upper = lin(system, &["n", "u", "z"], &[a, 1, -c], c - 1 - d, Comparison::Le)?;
    let inner = arg.and(&fw)?.exists("w")?;
    let body = inner.and(&lower)?.and(&upper)?.exists("u")?;
    // Keep n as a track even when b = a = 0.
    body.and(&Tracked::universal(system, &names(&["n", "z"])))
}

/// Pairs (n, ⌊nα + β⌋) for n ≥ 1.
pub fn beatty_sync(
    system: &Arc<NumerationSystem>,
    spec: &BeattySpec,
) -> Result<SynchronizedRelation> {
    spec.validate(system)?;
    let BeattySpec { a, b, c, d, e } = *spec;
    let positive = lin(system, &["n"], &[-1], -1, Comparison::Le)?;
    let rel = if b == 0 {
        // ⌊eγ⌋ is a constant K: z = ⌊(an + d + K)/c⌋.
        let k = system
            .gamma()
            .mul_rational(e, 1)?
            .floor();
        let k = i64::try_from(k).map_err(|_| Error::Arithmetic("⌊eγ⌋ exceeds i64".into()))?;
        let lower = lin(system, &["n", "z"], &[-a, c], d + k, Comparison::Le)?;
        let upper = lin(system, &["n", "z"], &[a, -c], c - 1 - d - k, Comparison::Le)?;
        lower
            .and(&upper)?
            .and(&positive)?
            .and(&Tracked::universal(system, &names(&["n", "z"])))?
    } else {
        // For n below n0 the argument bn + e is negative; those finitely
        // many values are added directly.
        let n0 = if e >= 0 { 1 } else { ((-e + b - 1) / b).max(1) };
        let f = floor_gamma_sync(system)?;
        let from_n0 = lin(system, &["n"], &[-1], -n0, Comparison::Le)?;
        let mut rel = compose_tracked(system, &f, b, e, a, d, c)?
            .and(&from_n0)?
            .and(&positive)?;
        for n in 1..n0 {
            let z = spec.value(system, n as u64)?;
            let z = i64::try_from(z).map_err(|_| Error::Arithmetic("value exceeds i64".into()))?;
            let point = lin(system, &["n"], &[1], n, Comparison::Eq)?
                .and(&lin(system, &["z"], &[1], z, Comparison::Eq)?)?;
            rel = rel.or(&point)?;
        }
        rel
    };
    SynchronizedRelation::new(
        rel.into_automaton(),
        format!("beatty ({a},{b},{c},{d},{e})"),
    )
}
