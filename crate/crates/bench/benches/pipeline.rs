use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use canlift::dwork::{canonical_eta, hd_def, hd_mod};
use canlift::{FieldSpec, ResidueField};
use canlift_bench::{dwork, dwork_context, witt};

fn poly_power(c: &mut Criterion) {
    let mut group = c.benchmark_group("f_pow_2p_minus_1");
    for (p, n) in [(5u64, 2usize), (7, 3), (7, 4)] {
        let f = dwork(p, n, 3);
        let e = 2 * p as u32 - 1;
        group.bench_with_input(BenchmarkId::from_parameter(format!("p{p}_N{n}")), &f, |b, f| {
            b.iter(|| black_box(f.pow(e).unwrap()))
        });
    }
    group.finish();
}

fn hasse_dwork(c: &mut Criterion) {
    let w = witt(13);
    let x = w.from_int(5);
    c.bench_function("hd_mod_p13_N6_m2", |b| {
        b.iter(|| black_box(hd_mod(&w, 6, 2, &x).unwrap()))
    });
    c.bench_function("hd_def_eval_p13_N6_m2", |b| {
        b.iter(|| black_box(hd_def(7, 25).eval_witt(&w, &x)))
    });
}

fn canonicity(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_canonical");
    group.sample_size(10);
    for (p, n) in [(5u64, 2usize), (7, 3), (7, 4)] {
        group.bench_function(format!("p{p}_N{n}"), |b| {
            b.iter(|| black_box(dwork_context(p, n, 3).is_canonical().unwrap()))
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let spec = FieldSpec::prime(7).unwrap();
    let k = ResidueField::new(spec.clone());
    let lambda = k.from_int(3);
    c.bench_function("canonical_eta_p7_N4", |b| {
        b.iter(|| black_box(canonical_eta(spec.clone(), 4, &lambda).unwrap()))
    });
}

criterion_group!(benches, poly_power, hasse_dwork, canonicity, solver);
criterion_main!(benches);
