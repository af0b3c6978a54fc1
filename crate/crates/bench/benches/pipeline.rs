use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use specdecay::numerics::{compound_matrix, svd_singular_values};
use specdecay::operators::{approx_numbers, PowerTable};
use specdecay::spaces::{kernel_norm_sq, WeightFamily};
use specdecay::Symbol;
use specdecay_bench::{context, dense};

fn svd(c: &mut Criterion) {
    let mut g = c.benchmark_group("svd");
    g.sample_size(10);
    for (n, bits) in [(16, 256), (32, 256), (32, 512)] {
        let m = dense(n, bits);
        let ctx = context(bits);
        g.bench_with_input(BenchmarkId::new(format!("{bits}bit"), n), &m, |b, m| {
            b.iter(|| svd_singular_values(black_box(m), &ctx).unwrap())
        });
    }
    g.finish();
}

fn compound(c: &mut Criterion) {
    let m = dense(8, 256);
    c.bench_function("compound_8x8_order3", |b| b.iter(|| compound_matrix(black_box(&m), 3).unwrap()));
}

fn taylor(c: &mut Criterion) {
    let mut g = c.benchmark_group("taylor");
    g.sample_size(10);
    let ctx = context(256);
    for name in ["cusp", "lens:0.5"] {
        let sym: Symbol = name.parse().unwrap();
        g.bench_function(name, |b| b.iter(|| sym.taylor(black_box(64), &ctx).unwrap()));
    }
    g.finish();
}

fn section_spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("section_spectrum");
    g.sample_size(10);
    let ctx = context(256);
    let sym: Symbol = "lens:0.5".parse().unwrap();
    let table = PowerTable::new(&sym, 48, &ctx).unwrap();
    for space in ["hardy", "dirichlet:0"] {
        let fam: WeightFamily = space.parse().unwrap();
        g.bench_function(space, |b| {
            b.iter(|| approx_numbers(&table.operator(&fam, 48, &ctx).unwrap(), &ctx).unwrap())
        });
    }
    g.finish();
}

fn kernel_norms(c: &mut Criterion) {
    let ctx = context(128);
    let a = ctx.complex(0.99, 0.0);
    let fam = WeightFamily::exp_sqrt();
    c.bench_function("kernel_norm_expsqrt_0.99", |b| b.iter(|| kernel_norm_sq(black_box(&a), &fam, 1e-12, &ctx).unwrap()));
}

criterion_group!(benches, svd, compound, taylor, section_spectrum, kernel_norms);
criterion_main!(benches);
