mod common;

use std::collections::BTreeSet;

use common::SYSTEMS;
use obd_core::basis::{find_min_basis_order, sums_complement, Verdict};
use obd_core::builders::BeattySpec;

const TERMS: u64 = 1_000;

fn terms(k: usize, spec: [i64; 5], first: u64) -> Vec<u64> {
    (first..first + TERMS)
        .map(|n| SYSTEMS[k].beatty(spec, n) as u64)
        .collect()
}

/// Numbers ≤ limit that are not sums of `h` of the given terms.
fn missing(terms: &[u64], h: usize, limit: u64) -> Vec<u64> {
    let mut sums: BTreeSet<u64> = [0].into();
    for _ in 0..h {
        let mut next = BTreeSet::new();
        for &s in &sums {
            for &t in terms {
                if s + t > limit {
                    break;
                }
                next.insert(s + t);
            }
        }
        sums = next;
    }
    (0..=limit).filter(|n| !sums.contains(n)).collect()
}

fn check(k: usize, spec: [i64; 5], cap: usize, first: u64, order: usize, exceptional: &[u64]) {
    let sys = SYSTEMS[k].system();
    let [a, b, c, d, e] = spec;
    let report = find_min_basis_order(&sys, &BeattySpec::new(a, b, c, d, e), cap, first).unwrap();
    assert_eq!(report.order, order);
    let got: Vec<u64> = match &report.verdict {
        Verdict::Basis => vec![],
        Verdict::Asymptotic { exceptional } => exceptional.clone(),
        Verdict::NotBasisAtCap => panic!("no order found"),
    };
    assert_eq!(got, exceptional);
    let t = terms(k, spec, first);
    let limit = 300.min(*t.last().unwrap());
    assert_eq!(missing(&t, order, limit), exceptional);
    if order > 1 {
        assert!(missing(&t, order - 1, limit).len() > exceptional.len());
    }
}

#[test]
fn floor_n_phi_plus_half_from_zero() {
    check(0, [2, 2, 2, 1, 0], 3, 0, 2, &[1]);
}

#[test]
fn s13_sequence_is_an_asymptotic_basis_of_order_two() {
    check(2, [2, 6, 2, 3, 3], 3, 1, 2, &[0, 1, 2, 3, 4, 5, 7, 9, 11]);
}

#[test]
fn naturals_from_one() {
    check(0, [1, 0, 1, 0, 0], 1, 1, 1, &[0]);
}

#[test]
fn sqrt2_multiples() {
    let t = terms(1, [1, 1, 1, 0, 0], 1);
    let ex = missing(&t, 2, 300);
    assert!(ex.len() < 10);
    check(1, [1, 1, 1, 0, 0], 3, 1, 2, &ex);
}

#[test]
fn cap_too_small() {
    let sys = SYSTEMS[0].system();
    let r = find_min_basis_order(&sys, &BeattySpec::new(2, 2, 2, 1, 0), 1, 0).unwrap();
    assert_eq!(r.verdict, Verdict::NotBasisAtCap);
    assert!(find_min_basis_order(&sys, &BeattySpec::new(2, 2, 2, 1, 0), 0, 0).is_err());
}

#[test]
fn sums_complement_matches_differences() {
    for (k, spec) in [(0, [1, 1, 1, 0, 0]), (1, [1, 1, 1, 0, 0]), (2, [2, 6, 2, 0, 0])] {
        let sys = SYSTEMS[k].system();
        let [a, b, c, d, e] = spec;
        let aut = sums_complement(&sys, &BeattySpec::new(a, b, c, d, e)).unwrap();
        let t = terms(k, spec, 1);
        let diffs: BTreeSet<u64> = t
            .iter()
            .flat_map(|&x| t.iter().filter(move |&&y| y <= x).map(move |&y| x - y))
            .collect();
        for n in 0..300 {
            let want = n >= 1 && !diffs.contains(&n);
            assert_eq!(aut.accepts_values(&[n]).unwrap(), want, "{spec:?} n = {n}");
        }
    }
}
