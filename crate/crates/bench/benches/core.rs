use criterion::{black_box, criterion_group, criterion_main, Criterion};

use uphocore::coloring::{realize_core, RealizeOptions};
use uphocore::constructions::{build_dn, build_fn, build_lf, build_mn, monoid_mf, FiberFunction};
use uphocore::poset::{char_series, lattice_certificate, upho_check};
use uphocore::presentation::build_element_table;
use uphocore::{canonical_form, IsoMode};

fn element_table(c: &mut Criterion) {
    let f: FiberFunction = "1,1,2".parse().unwrap();
    let m = monoid_mf(&f);
    c.bench_function("element table M(1,1,2) depth 7", |b| {
        b.iter(|| build_element_table(black_box(&m), 7).unwrap())
    });
}

fn order(c: &mut Criterion) {
    let d = build_dn(3, 6).unwrap();
    let l = build_lf(&"1,2,2".parse().unwrap(), 5).unwrap();
    c.bench_function("canonical form D_3 depth 6", |b| b.iter(|| canonical_form(black_box(&d), IsoMode::Plain)));
    c.bench_function("char series D_3 depth 6", |b| b.iter(|| char_series(black_box(&d))));
    c.bench_function("lattice certificate L(1,2,2) depth 5", |b| b.iter(|| lattice_certificate(black_box(&l))));
    let f = build_fn(3, 5).unwrap();
    c.bench_function("upho check F_3 depth 5 probe 2", |b| b.iter(|| upho_check(black_box(&f), 2)));
}

fn realize(c: &mut Criterion) {
    let m3 = build_mn(3).unwrap();
    let mut opts = RealizeOptions::new(4, 2);
    opts.workers = Some(1);
    let mut group = c.benchmark_group("realize");
    group.sample_size(10);
    group.bench_function("M_3 depth 4", |b| b.iter(|| realize_core(black_box(&m3), "M3", &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, element_table, order, realize);
criterion_main!(benches);
