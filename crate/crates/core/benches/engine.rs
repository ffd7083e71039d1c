//! Parallel versus sequential kernels on the same workloads.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use obd_core::builders::{
    beatty_sync, linear_automaton, order_relations, shift_relation, BeattySpec, Comparison,
    LinearRelationSpec,
};
use obd_core::logic::Environment;
use obd_core::{par, BoolOp, NumerationSystem, PeriodicCF};

const MODES: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn system(name: &str, period: &[u64]) -> Arc<NumerationSystem> {
    Arc::new(NumerationSystem::new(name, PeriodicCF::new(period.to_vec()).unwrap()).unwrap())
}

fn s13_env() -> Environment {
    let mut env = Environment::new();
    let sys = env.add_system(NumerationSystem::new("s13", PeriodicCF::new(vec![3, 1]).unwrap()).unwrap());
    env.set_predicate("shift13", shift_relation(&sys).unwrap().automaton, "shift");
    env.def_predicate("g", "?msd_s13 (n=0 & z=0) | (Eu,v n=u+1 & $shift13(u,v) & v=3*z+4*u)")
        .unwrap();
    env.def_predicate("b", "?msd_s13 Eu $g(6*n+3,u) & z=(u+2*n+3)/2").unwrap();
    env
}

fn products(c: &mut Criterion) {
    let sys = system("s13", &[3, 1]);
    let beatty = beatty_sync(&sys, &BeattySpec::new(2, 6, 2, 3, 3)).unwrap().automaton;
    let lt = order_relations(&sys).unwrap().lt.automaton;
    let wide = beatty.product(&lt, BoolOp::Or).unwrap();
    let mut group = c.benchmark_group("product");
    for (mode, on) in MODES {
        group.bench_function(BenchmarkId::new("beatty_xor_lt", mode), |b| {
            par::set_parallel(on);
            b.iter(|| wide.product(&beatty, BoolOp::Xor).unwrap())
        });
    }
    group.finish();
}

fn linear(c: &mut Criterion) {
    let sys = system("sqrt7", &[4, 1, 1, 1]);
    let spec = LinearRelationSpec::new(vec![-14, 1, -9], 0).unwrap();
    let mut group = c.benchmark_group("linear");
    group.sample_size(10);
    for (mode, on) in MODES {
        group.bench_function(BenchmarkId::new("sqrt7_9z_14u", mode), |b| {
            par::set_parallel(on);
            b.iter(|| linear_automaton(&sys, &spec, Comparison::Eq))
        });
    }
    group.finish();
}

fn compile(c: &mut Criterion) {
    let env = s13_env();
    let formula = "?msd_s13 Ei,j,x,y i>=1 & j>=1 & $b(i,x) & $b(j,y) & n=x+y";
    let mut group = c.benchmark_group("compile");
    group.sample_size(10);
    for (mode, on) in MODES {
        group.bench_function(BenchmarkId::new("s13_two_sums", mode), |b| {
            par::set_parallel(on);
            b.iter(|| env.compile_text(formula, false).unwrap())
        });
    }
    group.finish();
}

fn projection(c: &mut Criterion) {
    let env = s13_env();
    let body = env
        .compile_text("?msd_s13 $b(i,x) & $b(j,y) & n=x+y", false)
        .unwrap()
        .automaton;
    let mut group = c.benchmark_group("project");
    group.sample_size(10);
    for (mode, on) in MODES {
        group.bench_function(BenchmarkId::new("s13_sum_drop_i", mode), |b| {
            par::set_parallel(on);
            b.iter(|| body.project(0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, products, linear, compile, projection);
criterion_main!(benches);
