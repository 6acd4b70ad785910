use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pcw::{
    compute_q, Breakpoints, IteratedFunctionSystem, MapDescriptor, OrbitOptions, PiecewiseContraction, Rational, Scalar,
};

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn aff(a: Rational, b: Rational) -> MapDescriptor<Rational> {
    MapDescriptor::affine(a, b).unwrap()
}

fn cantor_like() -> IteratedFunctionSystem<Rational> {
    IteratedFunctionSystem::new(vec![aff(r(1, 4), r(1, 16)), aff(r(-1, 4), r(5, 8)), aff(r(1, 4), r(11, 16))]).unwrap()
}

fn period3() -> PiecewiseContraction<Rational> {
    let ifs = IteratedFunctionSystem::new(vec![aff(r(1, 2), r(1, 4)), aff(r(1, 2), r(1, 8))]).unwrap();
    PiecewiseContraction::new(ifs, Breakpoints::new(vec![r(3, 10)]).unwrap()).unwrap()
}

fn three_branch() -> PiecewiseContraction<Rational> {
    let ifs = IteratedFunctionSystem::new(vec![
        aff(r(-3, 8), r(13, 16)),
        aff(r(5, 16), r(1, 32)),
        aff(r(-7, 16), r(3, 4)),
    ])
    .unwrap();
    PiecewiseContraction::new(ifs, Breakpoints::new(vec![r(11, 32), r(43, 64)]).unwrap()).unwrap()
}

fn bench_attractor(c: &mut Criterion) {
    let ifs = cantor_like();
    c.bench_function("ak_sequence n=3 k=8", |b| b.iter(|| black_box(ifs.ak_sequence(black_box(8)))));
}

fn bench_q(c: &mut Criterion) {
    let f = period3();
    c.bench_function("compute_q period-3", |b| b.iter(|| black_box(compute_q(&f, 64, 10_000).unwrap())));
    let g = three_branch();
    c.bench_function("analyze three-branch", |b| b.iter(|| black_box(pcw::analyze(&g, 64, 10_000))));
}

fn bench_orbit(c: &mut Criterion) {
    let f = three_branch();
    let x = r(1, 7);
    let opts = OrbitOptions::default();
    c.bench_function("orbit three-branch", |b| b.iter(|| black_box(f.orbit(&x, &opts).unwrap())));
    c.bench_function("power k=3 three-branch", |b| b.iter(|| black_box(f.power(3, 100_000))));
}

criterion_group!(benches, bench_attractor, bench_q, bench_orbit);
criterion_main!(benches);
