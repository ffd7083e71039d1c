mod common;

use common::SYSTEMS;
use obd_core::automaton::regex;
use obd_core::builders::{canonical_recognizer, shift_relation};
use obd_core::logic::Environment;
use obd_core::{BoolOp, Error, NumerationSystem, PeriodicCF};

fn s13_env() -> Environment {
    let mut env = Environment::new();
    let sys = env.add_system(NumerationSystem::new("s13", PeriodicCF::new(vec![3, 1]).unwrap()).unwrap());
    env.set_predicate("shift13", shift_relation(&sys).unwrap().automaton, "shift");
    env
}

fn fib_env() -> Environment {
    let mut env = Environment::new();
    let fib = env.system("fib").unwrap();
    let alph = vec![vec![0, 1], vec![0, 1]];
    let shift = regex::compile(&fib, 2, Some(&alph), "([0,0]|[0,1][1,1]*[1,0])*")
        .unwrap()
        .normalize_zeros()
        .product(&canonical_recognizer(&fib, 2), BoolOp::And)
        .unwrap();
    env.set_predicate("shift", shift, "reg");
    env.def_predicate("phin", "?msd_fib (s=0&n=0) | Ex $shift(n-1,x) & s=x+1")
        .unwrap();
    env
}

#[test]
fn beatty_over_s13() {
    let mut env = s13_env();
    let states = env
        .def_predicate(
            "beattyg",
            "?msd_s13 (n=0 & z=0) | (Eu,v n=u+1 & $shift13(u,v) & v=3*z+4*u)",
        )
        .unwrap();
    assert_eq!(states, 32);
    let states = env
        .def_predicate("beatty", "?msd_s13 Eu $beattyg(6*n+3,u) & z=(u+2*n+3)/2")
        .unwrap();
    assert_eq!(states, 59);

    let c = &SYSTEMS[2];
    let g = &env.predicate("beattyg").unwrap().automaton;
    let b = &env.predicate("beatty").unwrap().automaton;
    for n in 0..10_000u64 {
        assert!(g.accepts_values(&[n, c.floor_n_gamma(n)]).unwrap());
        let z = c.beatty([2, 6, 2, 3, 3], n) as u64;
        assert!(b.accepts_values(&[n, z]).unwrap());
        assert!(!b.accepts_values(&[n, z + 1]).unwrap());
    }

    assert!(env
        .eval_sentence(
            "?msd_s13 An (n>=12) => Eu,v,n1,n2 u>=1 & v>=1 & $beatty(u,n1) & $beatty(v,n2) & n=n1+n2"
        )
        .unwrap());
    assert!(!env
        .eval_sentence("?msd_s13 Eu,v,n1,n2 u>=1 & v>=1 & $beatty(u,n1) & $beatty(v,n2) & n1+n2=11")
        .unwrap());
}

#[test]
fn trivial_sentences() {
    let env = s13_env();
    assert!(env.eval_sentence("Ax x=x").unwrap());
    assert!(!env.eval_sentence("Ex x<x").unwrap());
    assert!(env.eval_sentence("?msd_fib Ax Ey y=x+1").unwrap());
    assert!(!env.eval_sentence("?msd_fib Ex x+1=0").unwrap());
    let empty = env.compile_text("?msd_s13 x<x & y=y", false).unwrap();
    assert!(empty.automaton.is_empty());
    assert_eq!(empty.vars, vec!["x", "y"]);
}

#[test]
fn quantifier_duality() {
    let env = fib_env();
    let a = env.compile_text("?msd_fib Ex $phin(x,y) & x<n", false).unwrap();
    let b = env
        .compile_text("?msd_fib ~Ax ~($phin(x,y) & x<n)", false)
        .unwrap();
    assert_eq!(a.vars, b.vars);
    assert_eq!(a.automaton.to_text(), b.automaton.to_text());
    let c = env.compile_text("?msd_fib ~Ex $phin(x,y) & x<n", false).unwrap();
    let d = env
        .compile_text("?msd_fib Ax ~$phin(x,y) | x>=n", false)
        .unwrap();
    assert_eq!(c.automaton.to_text(), d.automaton.to_text());
}

#[test]
fn phi_relations_match_closed_forms() {
    let mut env = fib_env();
    let c = &SYSTEMS[0];
    env.def_predicate("eta", "?msd_fib Er $phin(2*n,r) & z=(r+1)/2").unwrap();
    assert_eq!(env.predicate("eta").unwrap().automaton.state_count(), 11);
    let phin = &env.predicate("phin").unwrap().automaton;
    let eta = &env.predicate("eta").unwrap().automaton;
    for n in 0..5_000u64 {
        assert!(phin.accepts_values(&[n, c.beatty([1, 1, 1, 0, 0], n) as u64]).unwrap());
        assert!(eta.accepts_values(&[n, c.beatty([2, 2, 2, 1, 0], n) as u64]).unwrap());
    }
}

#[test]
fn subtraction_below_zero_is_false() {
    let env = fib_env();
    // phin(n-1, x) requires n >= 1.
    let a = env.compile_text("?msd_fib $phin(n-1,x)", false).unwrap();
    assert!(!a.automaton.accepts_values(&[0, 0]).unwrap());
    assert!(a.automaton.accepts_values(&[1, 0]).unwrap());
    assert!(a.automaton.accepts_values(&[3, 3]).unwrap());
    assert!(env.eval_sentence("?msd_fib An (n>=1) <=> Ex $phin(n-1,x)").unwrap());
}

#[test]
fn word_indexing() {
    let mut env = fib_env();
    env.def_predicate("fone", "?msd_fib Ex,y $phin(i+2,x) & $phin(i+1,y) & x=y+1")
        .unwrap();
    let fone = env.predicate("fone").unwrap().automaton.clone();
    let f = obd_core::automaton::combine(&[("fone".into(), fone, 1)], 0).unwrap();
    env.set_predicate("F", f, "combine");
    // No 11 in the Fibonacci word and no 000.
    assert!(!env.eval_sentence("?msd_fib Ei F[i]=@1 & F[i+1]=@1").unwrap());
    assert!(!env
        .eval_sentence("?msd_fib Ei F[i]=@0 & F[i+1]=@0 & F[i+2]=@0")
        .unwrap());
    assert!(env.eval_sentence("?msd_fib F[1]=@1 & F[0]=@0").unwrap());
}

#[test]
fn errors() {
    let env = fib_env();
    assert!(matches!(
        env.eval_sentence("Ex $nope(x)"),
        Err(Error::UnknownPredicate(_))
    ));
    assert!(matches!(
        env.eval_sentence("?msd_fib x=1"),
        Err(Error::FreeVariables(_))
    ));
    assert!(matches!(
        env.compile_text("?msd_nowhere x=1", false),
        Err(Error::UnknownSystem(_))
    ));
    assert!(matches!(
        env.compile_text("?msd_fib x = = 1", false),
        Err(Error::Syntax { .. })
    ));
    assert!(env.compile_text("?msd_fib $phin(x)", false).is_err());
}

#[test]
fn verbose_compilation_reports_intermediates() {
    let env = fib_env();
    let c = env
        .compile_text("?msd_fib Ex,y $phin(n,x) & $phin(x,y) & z=x+y", true)
        .unwrap();
    assert!(c.stats.largest_intermediate >= c.automaton.state_count());
    assert!(!c.stats.log.is_empty());
    let quiet = env
        .compile_text("?msd_fib Ex,y $phin(n,x) & $phin(x,y) & z=x+y", false)
        .unwrap();
    assert!(quiet.stats.log.is_empty());
    assert_eq!(quiet.automaton.to_text(), c.automaton.to_text());
}
