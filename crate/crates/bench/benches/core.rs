use criterion::{black_box, criterion_group, criterion_main, Criterion};
use liegeo_bench::{plane, setting, system};
use liegeo_core::freelie::lyndon_basis;
use liegeo_core::geometry::radical_of_points;
use liegeo_core::reduction::{classify_one_variable, lie_to_poly, poly_to_lie};
use liegeo_core::{phi_suite, solve, AlgebraKind, FieldSpec, FreeLie, Poly};

fn free_lie(c: &mut Criterion) {
    c.bench_function("lyndon basis rank 2 to degree 10", |b| b.iter(|| lyndon_basis(2, black_box(10)).unwrap()));
    let f = FreeLie::new(2, FieldSpec::Prime(3));
    let u = f.left_normed(&[0, 1, 1, 0, 1]);
    let v = f.left_normed(&[1, 0, 0, 1]);
    c.bench_function("bracket degree 5 x degree 4", |b| b.iter(|| black_box(&u).bracket(black_box(&v)).unwrap()));
}

fn geometry(c: &mut Criterion) {
    let s = setting(AlgebraKind::Free, 2, 3, 2);
    let sys = system("free", 2, "[x,a1] + [x,a2]");
    c.bench_function("solve in the free degree-3 window", |b| b.iter(|| solve(black_box(&sys), &s).unwrap()));
    let m = setting(AlgebraKind::Metabelian, 2, 3, 3);
    let y = solve(&system("metabelian", 2, "[x,a1]"), &m).unwrap();
    c.bench_function("radical on the metabelian degree-3 window", |b| {
        b.iter(|| radical_of_points(&m, 1, black_box(&y.points), 3).unwrap())
    });
}

fn logic(c: &mut Criterion) {
    let m = setting(AlgebraKind::Metabelian, 2, 3, 4);
    c.bench_function("Φ1-Φ4 on the metabelian GF(2) window", |b| b.iter(|| phi_suite(black_box(&m), 2, &[]).unwrap()));
}

fn reduction(c: &mut Criterion) {
    let pp = plane(3);
    let ring = pp.poly_ring();
    let g = Poly::parse(&ring, "y1^2 + y1*y2 - 1").unwrap();
    c.bench_function("f_g construction over GF(3)", |b| b.iter(|| poly_to_lie(black_box(&g), &pp, None).unwrap()));
    let fg = poly_to_lie(&g, &pp, None).unwrap();
    c.bench_function("S_f reduction of f_g", |b| b.iter(|| lie_to_poly(black_box(&fg.term), &pp).unwrap()));
    let sys = system("free", 2, "[x,a1]");
    c.bench_function("one-variable classifier at degree 4", |b| {
        b.iter(|| classify_one_variable(black_box(&sys), 4, 1_000_000).unwrap())
    });
}

criterion_group!(benches, free_lie, geometry, logic, reduction);
criterion_main!(benches);
