use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use permcat::combinatorics::enumerate_symbolic_matrices;
use permcat::hsmod::{hs_scalar_on, Side};
use permcat::kron::{multiplicity_dim, MultiplicityParams, XSpec};
use permcat::schur::{oracle_coset_action, tensor_interpolated};
use permcat::{compose_interpolated, CosetMatrix, Morphism, ObjectLabel};

fn sum_of_basis(a: &ObjectLabel, b: &ObjectLabel, deg: i64) -> Morphism {
    let mut f = Morphism::zero(a.clone(), b.clone()).unwrap();
    for q in enumerate_symbolic_matrices(a, b, deg).unwrap() {
        f = f.add(&Morphism::basis(q).unwrap()).unwrap();
    }
    f
}

fn compose(c: &mut Criterion) {
    let a = ObjectLabel::parse_auto("L1-2,L2,1,1").unwrap();
    let f = sum_of_basis(&a, &a, 2);
    c.bench_function("compose_interpolated", |b| b.iter(|| compose_interpolated(black_box(&f), black_box(&f)).unwrap()));
    let g = ObjectLabel::parse(1, "L1-1,1").unwrap();
    let h = sum_of_basis(&g, &g, 1);
    c.bench_function("tensor_interpolated", |b| b.iter(|| tensor_interpolated(black_box(&h), black_box(&h)).unwrap()));
}

fn hs(c: &mut Criterion) {
    let alpha = ObjectLabel::generic(3);
    let q = CosetMatrix::parse("L1-1,1,0;1,L2-2,1;0,1,L3-1").unwrap();
    c.bench_function("hs_scalar", |b| b.iter(|| hs_scalar_on(black_box(&q), &alpha, Side::Left).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let q = vec![vec![2, 1, 0], vec![1, 0, 1], vec![0, 1, 1]];
    c.bench_function("oracle_coset_action", |b| b.iter(|| oracle_coset_action(black_box(&q), 7).unwrap()));
}

fn multiplicity(c: &mut Criterion) {
    let g = ObjectLabel::generic(2);
    let x = XSpec::parse("perm:|L|-1,1").unwrap();
    let params = MultiplicityParams::seeded(2, 1);
    c.bench_function("multiplicity_dim", |b| b.iter(|| multiplicity_dim(black_box(&g), &g, &x, &params).unwrap()));
}

criterion_group! {
    name = engine;
    config = Criterion::default().sample_size(10);
    targets = compose, hs, oracle, multiplicity
}
criterion_main!(engine);
