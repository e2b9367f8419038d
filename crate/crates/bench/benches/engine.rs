use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use kohn_bench::{family, induction_pair, polys, three_squares};
use kohn_core::groebner::{effective_type, local_colength};
use kohn_core::oracle::{member_linalg, validity_cap};
use kohn_core::{run_algorithm, Config, GroebnerBasis, Ideal, MonomialOrder};

fn algorithm(c: &mut Criterion) {
    let config = Config::default();
    let worked = family(2, 3, 5);
    c.bench_function("run/worked_example", |b| {
        b.iter(|| run_algorithm(black_box(&worked), &config).unwrap())
    });
    let far = family(2, 3, 50);
    c.bench_function("run/worked_example_k50", |b| {
        b.iter(|| run_algorithm(black_box(&far), &config).unwrap())
    });
    let induction = induction_pair();
    c.bench_function("run/induction_pair", |b| {
        b.iter(|| run_algorithm(black_box(&induction), &config).unwrap())
    });
    let squares = three_squares();
    c.bench_function("run/three_squares", |b| {
        b.iter(|| run_algorithm(black_box(&squares), &config).unwrap())
    });
}

fn ideals(c: &mut Criterion) {
    let (_, gens) = polys(&["z", "w"], &["z^3 + z*w", "z^4 + 2*w^2"]);
    c.bench_function("groebner/grevlex", |b| {
        b.iter(|| GroebnerBasis::compute(black_box(&gens), MonomialOrder::Grevlex).unwrap())
    });
    c.bench_function("groebner/effective_type", |b| {
        b.iter(|| {
            let ideal = Ideal::new(gens.clone()).unwrap();
            effective_type(&ideal, 64).unwrap()
        })
    });
    c.bench_function("groebner/local_colength", |b| {
        b.iter(|| {
            let ideal = Ideal::new(gens.clone()).unwrap();
            local_colength(&ideal, 64).unwrap()
        })
    });
}

fn oracle(c: &mut Criterion) {
    let (ring, gens) = polys(&["z", "w"], &["z^3", "w^4 + z*w"]);
    let target = kohn_core::poly::parse_poly("z^4*w - 2*w^5", &ring).unwrap();
    let cap = validity_cap(&gens, 5, 40).unwrap();
    c.bench_function("oracle/member_linalg", |b| {
        b.iter(|| member_linalg(black_box(&gens), &target, cap).unwrap())
    });
}

criterion_group!(benches, algorithm, ideals, oracle);
criterion_main!(benches);
