use obd_core::builders::shift_relation;
use obd_core::logic::Environment;
use obd_core::par;
use obd_core::{NumerationSystem, PeriodicCF};

fn build() -> Vec<String> {
    let mut env = Environment::new();
    let sys = env.add_system(NumerationSystem::new("s13", PeriodicCF::new(vec![3, 1]).unwrap()).unwrap());
    env.set_predicate("shift13", shift_relation(&sys).unwrap().automaton, "shift");
    env.def_predicate("g", "?msd_s13 (n=0 & z=0) | (Eu,v n=u+1 & $shift13(u,v) & v=3*z+4*u)")
        .unwrap();
    env.def_predicate("b", "?msd_s13 Eu $g(6*n+3,u) & z=(u+2*n+3)/2").unwrap();
    env.def_predicate("s", "?msd_s13 Ei,j,x,y i>=1 & j>=1 & $b(i,x) & $b(j,y) & n=x+y")
        .unwrap();
    ["g", "b", "s"]
        .iter()
        .map(|p| env.predicate(p).unwrap().automaton.to_text())
        .collect()
}

/// One test, since the mode switch is process-wide.
#[test]
fn sequential_and_parallel_agree() {
    par::set_parallel(true);
    let parallel = build();
    par::set_parallel(false);
    assert!(!par::parallel_enabled());
    let sequential = build();
    par::set_parallel(true);
    assert_eq!(parallel, sequential);

    for on in [true, false] {
        par::set_parallel(on);
        let v: Vec<u64> = (0..10_000).collect();
        assert_eq!(par::map(&v, |x| x * x), v.iter().map(|x| x * x).collect::<Vec<_>>());
        assert_eq!(par::map_range(0..100, |i| i + 1), (1..101).collect::<Vec<_>>());
        assert_eq!(par::find_first(0..10_000, |i| i > 0 && i % 977 == 0), Some(977));
    }
    par::set_parallel(true);
}
