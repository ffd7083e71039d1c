mod common;

use common::{canonical_strings, value, SYSTEMS};
use obd_core::builders::{
    beatty_sync, canonical_recognizer, floor_gamma_sync, linear_automaton, order_relations,
    shift_relation, BeattySpec, Comparison, LinearRelationSpec,
};
use obd_core::{Automaton, DigitString};

/// Calls `f` on every k-tuple of canonical strings of exactly `len` digits,
/// with their values.
fn for_tuples(period: &[u64], len: usize, k: usize, mut f: impl FnMut(&[DigitString], &[i64])) {
    let strings: Vec<DigitString> = canonical_strings(period, len)
        .into_iter()
        .map(DigitString::from)
        .collect();
    let values: Vec<i64> = strings.iter().map(|s| value(period, s.digits()) as i64).collect();
    let mut idx = vec![0usize; k];
    let mut tup: Vec<DigitString> = vec![strings[0].clone(); k];
    let mut vals = vec![values[0]; k];
    loop {
        for j in 0..k {
            tup[j] = strings[idx[j]].clone();
            vals[j] = values[idx[j]];
        }
        f(&tup, &vals);
        let mut j = 0;
        loop {
            if j == k {
                return;
            }
            idx[j] += 1;
            if idx[j] < strings.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn accepts(a: &Automaton, t: &[Vec<u8>]) -> bool {
    let tracks: Vec<DigitString> = t.iter().cloned().map(DigitString::from).collect();
    a.accepts(&tracks).unwrap()
}

#[test]
fn linear_relations_agree_with_arithmetic() {
    let cases: &[(&[i64], i64, Comparison)] = &[
        (&[1, 1, -1], 0, Comparison::Eq),
        (&[2, -3], 1, Comparison::Eq),
        (&[3, -2, 1], 4, Comparison::Le),
        (&[1, -1], 0, Comparison::Le),
        (&[-1], -1, Comparison::Le),
        (&[9, -14], 0, Comparison::Eq),
        (&[-9, 14, -1], 5, Comparison::Le),
        (&[1, 1], 7, Comparison::Eq),
    ];
    for c in SYSTEMS {
        let sys = c.system();
        for &(coeffs, c0, cmp) in cases {
            let spec = LinearRelationSpec::new(coeffs.to_vec(), c0).unwrap();
            let aut = linear_automaton(&sys, &spec, cmp);
            for len in 1..=6 {
                for_tuples(c.period, len, coeffs.len(), |t, v| {
                    let lhs: i64 = v.iter().zip(coeffs).map(|(x, k)| k * x).sum();
                    let want = match cmp {
                        Comparison::Eq => lhs == c0,
                        Comparison::Le => lhs <= c0,
                    };
                    assert_eq!(
                        aut.accepts(t).unwrap(),
                        want,
                        "{:?}: {coeffs:?} {cmp:?} {c0} on {t:?}",
                        c.period
                    );
                });
            }
        }
    }
}

#[test]
fn order_relations_agree_with_arithmetic() {
    for c in SYSTEMS {
        let rel = order_relations(&c.system()).unwrap();
        for len in 1..=6 {
            for_tuples(c.period, len, 2, |t, v| {
                let (x, y) = (v[0], v[1]);
                assert_eq!(rel.eq.automaton.accepts(t).unwrap(), x == y);
                assert_eq!(rel.lt.automaton.accepts(t).unwrap(), x < y);
                assert_eq!(rel.leq.automaton.accepts(t).unwrap(), x <= y);
            });
        }
    }
}

#[test]
fn canonical_recognizer_accepts_exactly_the_rules() {
    for c in SYSTEMS {
        let sys = c.system();
        let rec = canonical_recognizer(&sys, 1);
        let canon = |len| canonical_strings(c.period, len);
        for len in 1..=7 {
            let good = canon(len);
            let radix = sys.dmax() + 1;
            let mut all: Vec<Vec<u8>> = vec![vec![]];
            for _ in 0..len {
                all = all
                    .into_iter()
                    .flat_map(|p| {
                        (0..radix).map(move |d| {
                            let mut p = p.clone();
                            p.push(d);
                            p
                        })
                    })
                    .collect();
            }
            for w in all {
                assert_eq!(accepts(&rec, std::slice::from_ref(&w)), good.contains(&w), "{w:?}");
            }
        }
    }
}

#[test]
fn shift_appends_m_zeros() {
    for c in SYSTEMS {
        let sys = c.system();
        let m = c.period.len();
        let shift = shift_relation(&sys).unwrap().automaton;
        for u in 0..300u64 {
            let mut digits = sys.encode(u).digits().to_vec();
            digits.extend(std::iter::repeat_n(0, m));
            let v = value(c.period, &digits);
            assert!(shift.accepts_values(&[u, v]).unwrap());
            assert!(!shift.accepts_values(&[u, v + 1]).unwrap());
            if v > 0 {
                assert!(!shift.accepts_values(&[u, v - 1]).unwrap());
            }
        }
    }
}

/// The relation holds at (n, f(n)) and nowhere near it.
fn check_graph(aut: &Automaton, ns: std::ops::Range<u64>, f: impl Fn(u64) -> u64, what: &str) {
    for n in ns {
        let z = f(n);
        assert!(aut.accepts_values(&[n, z]).unwrap(), "{what}: ({n}, {z})");
        assert!(!aut.accepts_values(&[n, z + 1]).unwrap(), "{what}: ({n}, {})", z + 1);
        if z > 0 {
            assert!(!aut.accepts_values(&[n, z - 1]).unwrap(), "{what}: ({n}, {})", z - 1);
        }
    }
}

#[test]
fn floor_gamma_matches_the_closed_form() {
    for c in SYSTEMS {
        let rel = floor_gamma_sync(&c.system()).unwrap();
        check_graph(&rel.automaton, 0..10_000, |n| c.floor_n_gamma(n), "floor(n gamma)");
    }
}

#[test]
fn beatty_synchronizers_match_exact_values() {
    let cases: &[(usize, [i64; 5])] = &[
        (0, [2, 2, 2, 1, 0]),
        (0, [1, 2, 1, 0, -3]),
        (0, [2, 1, 2, 1, 0]),
        (1, [1, 1, 1, 0, 0]),
        (1, [3, 1, 1, 2, 1]),
        (2, [2, 6, 2, 3, 3]),
        (2, [0, 1, 1, 0, 0]),
        (3, [2, 3, 1, 0, 0]),
    ];
    for &(k, spec) in cases {
        let c = &SYSTEMS[k];
        let sys = c.system();
        let [a, b, cc, d, e] = spec;
        let rel = beatty_sync(&sys, &BeattySpec::new(a, b, cc, d, e)).unwrap();
        let what = format!("{:?} {spec:?}", c.period);
        check_graph(&rel.automaton, 1..10_000, |n| c.beatty(spec, n) as u64, &what);
        // n = 0 is outside the relation
        for z in 0..4 {
            assert!(!rel.automaton.accepts_values(&[0, z]).unwrap(), "{what}");
        }
        assert_eq!(
            BeattySpec::new(a, b, cc, d, e).value(&sys, 12_345).unwrap(),
            c.beatty(spec, 12_345).into()
        );
    }
}

#[test]
fn invalid_beatty_parameters_are_rejected() {
    let sys = SYSTEMS[0].system();
    assert!(beatty_sync(&sys, &BeattySpec::new(1, -1, 1, 0, 0)).is_err());
    assert!(beatty_sync(&sys, &BeattySpec::new(1, 1, 0, 0, 0)).is_err());
    assert!(beatty_sync(&sys, &BeattySpec::new(0, 1, 1, -5, 0)).is_err());
}
