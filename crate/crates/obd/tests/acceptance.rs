//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line. Criterion 8 is slow and ignored by
//! default: `cargo test -p obd --test acceptance -- --ignored`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use obd::reproduce::{run_section, SectionResult, SECTIONS};
use obd_core::builders::{
    beatty_sync, canonical_recognizer, linear_automaton, order_relations, shift_relation,
    BeattySpec, Comparison, LinearRelationSpec,
};
use obd_core::{Automaton, BoolOp, DigitString, NumerationSystem, PeriodicCF};
use rand::{Rng, SeedableRng};

fn report(n: u32, what: &str, start: Instant, budget: Duration, problems: Vec<String>) {
    let took = start.elapsed();
    let mut problems = problems;
    if took > budget {
        problems.push(format!("took {took:.1?}, budget {budget:?}"));
    }
    if problems.is_empty() {
        println!("criterion {n}: PASS {what} ({took:.1?})");
    } else {
        println!("criterion {n}: FAIL {what}: {}", problems.join("; "));
        panic!("criterion {n} failed");
    }
}

fn section(id: &str) -> SectionResult {
    let s = SECTIONS.iter().find(|s| s.id == id).expect("bundled section");
    run_section(s)
}

/// Problems with a section run, plus any of `lines` missing from its output.
fn problems(r: &SectionResult, lines: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(e) = &r.error {
        out.push(format!("{}: {e}", r.id));
    }
    out.extend(r.failures.iter().map(|f| format!("{}: {f}", r.id)));
    for l in lines {
        if !r.output.lines().any(|o| o == *l) {
            out.push(format!("missing `{l}`"));
        }
    }
    out
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn criterion_1_s13_synchronizers() {
    let start = Instant::now();
    let r = section("s6");
    let p = problems(
        &r,
        &[
            "beattyg: 32 states",
            "ok: beattyg states 32",
            "ok: beattyg beatty 0 1 1 0 0 from 0 upto 10000",
            "beatty: 59 states",
            "ok: beatty states 59",
            "ok: beatty beatty 2 6 2 3 3 from 1 upto 10000",
        ],
    );
    report(1, "beattyg has 32 states, beatty 59", start, secs(30), p);
}

/// ⌊nα + β⌋ with α = (√21 − 1)/2, β = (√21 + 3)/4, i.e.
/// ⌊((2n + 1)√21 + 3 − 2n)/4⌋.
fn s13_term(n: u64) -> u64 {
    let k = 2 * n as u128 + 1;
    ((isqrt(k * k * 21) + 3 - 2 * n as u128) / 4) as u64
}

#[test]
fn criterion_2_s13_sums() {
    let start = Instant::now();
    let r = section("s6");
    let mut p = problems(&r, &["check2: TRUE", "check11: FALSE"]);
    let terms: Vec<u64> = (1..=20).map(s13_term).collect();
    if terms[..4] != [3, 5, 7, 9] {
        p.push(format!("oracle terms {:?}", &terms[..4]));
    }
    let sums = |x: u64| terms.iter().any(|&a| terms.iter().any(|&b| a + b == x));
    if sums(11) {
        p.push("11 is a sum of two terms".into());
    }
    if let Some(x) = (12..40).find(|&x| !sums(x)) {
        p.push(format!("{x} is not a sum of two terms"));
    }
    report(2, "check2 TRUE and 11 is not a sum of two terms", start, secs(60), p);
}

#[test]
fn criterion_3_phi_plus_half_basis() {
    let start = Instant::now();
    let r = section("s7");
    let p = problems(&r, &["test: TRUE", "ok: phihalf order 2 except 1"]);
    report(3, "basis sentence TRUE, order 2 with exceptions {1}", start, secs(30), p);
}

#[test]
fn criterion_4_reble() {
    let start = Instant::now();
    let r = section("s8");
    let p = problems(&r, &["rebleconj1: TRUE", "rebleconj2: TRUE", "rebleconj3: TRUE"]);
    report(4, "rebleconj1..3 TRUE", start, secs(60), p);
}

#[test]
fn criterion_5_hildebrand() {
    let start = Instant::now();
    let r = section("s9");
    let p = problems(
        &r,
        &[
            "no_inter: TRUE",
            "check4: TRUE",
            "check5: TRUE",
            "ok: diff outputs-in 0 1 2",
        ],
    );
    report(5, "no_inter, check4, check5 TRUE; diff outputs within {0,1,2}", start, secs(120), p);
}

#[test]
fn criterion_6_kimberling() {
    let start = Instant::now();
    let r = section("s10");
    let p = problems(&r, &["checkeven: TRUE", "checkodd: TRUE", "kimber: TRUE"]);
    report(6, "checkeven, checkodd, kimber TRUE", start, secs(120), p);
}

#[test]
fn criterion_7_sqrt2() {
    let start = Instant::now();
    let r = section("s12");
    let mut p = problems(
        &r,
        &[
            "dek: TRUE",
            "ok: check_equality TRUE",
            "check1: TRUE",
            "check2: TRUE",
            "check3: TRUE",
        ],
    );
    let rows = [
        "a097508", "a001951", "a003151", "a276862", "a097509", "a080754", "a082844",
    ];
    for row in rows {
        let prefix = format!("ok: {row} values ");
        match r.output.lines().find(|o| o.starts_with(&prefix)) {
            Some(h) if h.split_whitespace().count() == 3 + 17 => {}
            _ => p.push(format!("table row {row} not confirmed for 17 values")),
        }
    }
    report(7, "initial values of 7 sequences and dek, check_equality, check1..3", start, secs(60), p);
}

#[test]
#[ignore = "slow: runs the sqrt(7) sums-complement computation"]
fn criterion_8_sqrt7_sums_complement() {
    let start = Instant::now();
    let r = section("s11");
    let p = problems(
        &r,
        &[
            "beatty7: 65 states",
            "beat7: 96 states",
            "a276873: 6961 states",
            "ok: a276873 states 6961",
        ],
    );
    let largest = r
        .output
        .lines()
        .filter_map(|l| l.strip_prefix("# largest intermediate automaton has "))
        .filter_map(|l| l.split_whitespace().next()?.parse::<usize>().ok())
        .max();
    println!("largest intermediate automaton: {largest:?} states");
    report(8, "beatty7 65, beat7 96, a276873 6961 states", start, secs(30 * 60), p);
}

// Property suites.

/// γ = (√d − r)/s for each period.
const CLOSED: &[(&[u64], i128, i128, i128)] = &[
    (&[1], 5, 1, 2),
    (&[2], 2, 1, 1),
    (&[3, 1], 21, 3, 6),
    (&[4, 1, 1, 1], 7, 2, 3),
];

fn isqrt(t: u128) -> u128 {
    let mut r = (t as f64).sqrt() as u128;
    while r * r > t {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= t {
        r += 1;
    }
    r
}

fn floor_n_gamma(d: i128, r: i128, s: i128, n: u64) -> u64 {
    let n = n as i128;
    let root = isqrt((n * n * d) as u128) as i128;
    ((root - r * n) / s) as u64
}

fn system(period: &[u64]) -> Arc<NumerationSystem> {
    Arc::new(NumerationSystem::new("p", PeriodicCF::new(period.to_vec()).unwrap()).unwrap())
}

fn shift_identity(p: &mut Vec<String>) {
    for &(period, d, r, s) in CLOSED {
        let sys = system(period);
        let m = period.len();
        for n in 1..=10_000u64 {
            let mut digits = sys.encode(n - 1).digits().to_vec();
            digits.extend(std::iter::repeat_n(0, m));
            let lhs = sys.decode(&DigitString::from(digits)).unwrap();
            let rhs = sys.q(m) * (n - 1) + sys.q(m - 1) * floor_n_gamma(d, r, s, n);
            if lhs != rhs {
                p.push(format!("shift identity fails for {period:?} at n = {n}"));
                break;
            }
        }
    }
}

fn bijection(p: &mut Vec<String>) {
    for &(period, ..) in CLOSED {
        let sys = system(period);
        for n in 0..=100_000u64 {
            let x = sys.encode(n);
            if !sys.is_canonical(&x) || sys.decode(&x).unwrap() != n {
                p.push(format!("encode/decode fails for {period:?} at {n}"));
                break;
            }
        }
    }
}

/// Canonical strings of exactly `len` digits, from the digit rules.
fn canonical(period: &[u64], len: usize) -> Vec<Vec<u8>> {
    let bound = |pos: usize| period[pos % period.len()] as u8;
    let mut words: Vec<Vec<u8>> = vec![vec![]];
    for k in 0..len {
        let pos = len - 1 - k;
        words = words
            .into_iter()
            .flat_map(|w| {
                let top = match w.last() {
                    Some(&prev) if prev == bound(pos + 1) => 0,
                    _ if pos == 0 => bound(0) - 1,
                    _ => bound(pos),
                };
                (0..=top).map(move |e| {
                    let mut w = w.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    words
}

fn linear_vs_exhaustive(p: &mut Vec<String>) {
    let cases: &[(&[i64], i64, Comparison)] = &[
        (&[1, 1, -1], 0, Comparison::Eq),
        (&[2, -3], 1, Comparison::Eq),
        (&[3, -2], 4, Comparison::Le),
        (&[-9, 14, -1], 5, Comparison::Le),
    ];
    for &(period, ..) in CLOSED {
        let sys = system(period);
        let strings: Vec<(DigitString, i64)> = canonical(period, 6)
            .into_iter()
            .map(|w| {
                let d = DigitString::from(w);
                let v = sys.decode(&d).unwrap() as i64;
                (d, v)
            })
            .collect();
        for &(coeffs, c0, cmp) in cases {
            let spec = LinearRelationSpec::new(coeffs.to_vec(), c0).unwrap();
            let aut = linear_automaton(&sys, &spec, cmp);
            let k = coeffs.len();
            let total = strings.len().pow(k as u32);
            for mut i in 0..total {
                let mut tracks = Vec::with_capacity(k);
                let mut lhs = 0;
                for &c in coeffs {
                    let (d, v) = &strings[i % strings.len()];
                    i /= strings.len();
                    tracks.push(d.clone());
                    lhs += c * v;
                }
                let want = match cmp {
                    Comparison::Eq => lhs == c0,
                    Comparison::Le => lhs <= c0,
                };
                if aut.accepts(&tracks).unwrap() != want {
                    p.push(format!("{period:?} {coeffs:?} {cmp:?} {c0} wrong on {tracks:?}"));
                    return;
                }
            }
        }
    }
}

fn catalog(sys: &Arc<NumerationSystem>) -> Vec<Automaton> {
    let ord = order_relations(sys).unwrap();
    vec![
        ord.lt.automaton,
        ord.eq.automaton,
        shift_relation(sys).unwrap().automaton,
        beatty_sync(sys, &BeattySpec::new(1, 1, 1, 0, 0)).unwrap().automaton,
        linear_automaton(
            sys,
            &LinearRelationSpec::new(vec![1, 1], 9).unwrap(),
            Comparison::Le,
        ),
    ]
}

fn laws(p: &mut Vec<String>) {
    for &(period, ..) in CLOSED {
        let sys = system(period);
        let canon = canonical_recognizer(&sys, 2);
        let same = |a: &Automaton, b: &Automaton| {
            a.product(b, BoolOp::Xor)
                .and_then(|x| x.product(&canon, BoolOp::And))
                .map(|x| x.is_empty())
                .unwrap_or(false)
        };
        let cat = catalog(&sys);
        for (i, a) in cat.iter().enumerate() {
            for (j, b) in cat.iter().enumerate() {
                let and = a.product(b, BoolOp::And).unwrap();
                let or = a.product(b, BoolOp::Or).unwrap();
                let nor = a.complement().product(&b.complement(), BoolOp::Or).unwrap();
                if !same(&and.complement(), &nor) {
                    p.push(format!("De Morgan fails for {period:?} catalog {i},{j}"));
                }
                let proj = or.project(0).unwrap();
                let split = a
                    .project(0)
                    .unwrap()
                    .product(&b.project(0).unwrap(), BoolOp::Or)
                    .unwrap();
                let one = canonical_recognizer(&sys, 1);
                let diff = proj
                    .product(&split, BoolOp::Xor)
                    .and_then(|x| x.product(&one, BoolOp::And))
                    .unwrap();
                if !diff.is_empty() {
                    p.push(format!("projection law fails for {period:?} catalog {i},{j}"));
                }
            }
        }
    }
}

fn zero_padding(p: &mut Vec<String>) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    for &(period, ..) in CLOSED {
        let sys = system(period);
        let radix = sys.dmax() + 1;
        for a in catalog(&sys) {
            for _ in 0..300 {
                let len = rng.gen_range(0..12);
                let words: Vec<Vec<u8>> = (0..2)
                    .map(|_| (0..len).map(|_| rng.gen_range(0..radix)).collect())
                    .collect();
                let pad = rng.gen_range(1..4);
                let plain: Vec<DigitString> = words.iter().cloned().map(DigitString::from).collect();
                let padded: Vec<DigitString> = words
                    .iter()
                    .map(|w| {
                        let mut d = vec![0; pad];
                        d.extend(w);
                        DigitString::from(d)
                    })
                    .collect();
                if a.accepts(&plain).unwrap() != a.accepts(&padded).unwrap() {
                    p.push(format!("leading zeros change acceptance for {period:?} on {words:?}"));
                    return;
                }
            }
        }
    }
}

#[test]
fn criterion_9_property_suites() {
    let start = Instant::now();
    let mut p = Vec::new();
    shift_identity(&mut p);
    bijection(&mut p);
    linear_vs_exhaustive(&mut p);
    laws(&mut p);
    zero_padding(&mut p);
    report(
        9,
        "shift identity, encode/decode bijection, linear relations, Boolean laws, zero padding",
        start,
        secs(600),
        p,
    );
}
