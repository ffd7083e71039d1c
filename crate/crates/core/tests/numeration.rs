mod common;

use common::{canonical_strings, value, SYSTEMS};
use obd_core::DigitString;
use proptest::prelude::*;

/// [(n−1)_γ 0^m]_γ = q_m (n−1) + q_{m−1} ⌊nγ⌋.
#[test]
fn shifted_representation_identity() {
    for c in SYSTEMS {
        let sys = c.system();
        let m = c.period.len();
        let (qm, qm1) = (sys.q(m), sys.q(m - 1));
        for n in 1..=10_000u64 {
            let mut digits = sys.encode(n - 1).digits().to_vec();
            digits.extend(std::iter::repeat_n(0, m));
            let shifted = sys.decode(&DigitString::from(digits)).unwrap();
            assert_eq!(
                shifted,
                qm * (n - 1) + qm1 * c.floor_n_gamma(n),
                "period {:?}, n = {n}",
                c.period
            );
        }
    }
}

#[test]
fn encode_decode_round_trip() {
    for c in SYSTEMS {
        let sys = c.system();
        for n in 0..=100_000u64 {
            let x = sys.encode(n);
            assert!(sys.is_canonical(&x), "{n} -> {x:?}");
            assert_eq!(sys.decode(&x).unwrap(), n);
            assert!(x.len() == 1 || x.digits()[0] != 0);
        }
    }
}

/// The canonical strings of length L are exactly the encodings of 0..q_L.
#[test]
fn canonical_strings_enumerate_an_initial_segment() {
    for c in SYSTEMS {
        let sys = c.system();
        for len in 1..=10 {
            let strings = canonical_strings(c.period, len);
            assert_eq!(strings.len() as u64, sys.q(len), "{:?} length {len}", c.period);
            let mut values: Vec<u64> = strings.iter().map(|s| value(c.period, s)).collect();
            values.sort_unstable();
            assert!(values.iter().copied().eq(0..sys.q(len)));
            for s in &strings {
                let d = DigitString::from(s.clone());
                assert!(sys.is_canonical(&d));
                assert_eq!(sys.decode(&d).unwrap(), value(c.period, s));
            }
        }
    }
}

#[test]
fn convergents_match_the_closed_form() {
    // p_i/q_i alternate around γ and approach it.
    for c in SYSTEMS {
        let sys = c.system();
        for i in 1..20 {
            let (p, q) = (sys.p(i) as i128, sys.q(i) as i128);
            assert_eq!(c.floor_n_gamma(q as u64) as i128, p - i128::from(i % 2 == 1));
        }
    }
}

proptest! {
    #[test]
    fn non_canonical_strings_are_rejected(digits in prop::collection::vec(0u8..5, 1..12), k in 0usize..4) {
        let c = &SYSTEMS[k];
        let sys = c.system();
        let len = digits.len();
        let clipped: Vec<u8> = digits.iter().map(|&d| d.min(sys.dmax())).collect();
        let ok = canonical_strings(c.period, len).contains(&clipped);
        prop_assert_eq!(sys.is_canonical(&DigitString::from(clipped)), ok);
    }
}
