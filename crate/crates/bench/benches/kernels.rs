use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sadic_bench::{cubic, lattice, rat, unit, veronese};
use sadic_core::lattice::{MinimaStrategy, DEFAULT_BUDGET};
use sadic_core::measure::{sublevel_measure_exact, MeasureOptions};
use sadic_core::ubiquity::{hensel_root, resonant_construct, strong_approx, UbiquityConfig};
use sadic_core::{PAdic, PAdicBall, Poly};

fn padic(c: &mut Criterion) {
    let mut g = c.benchmark_group("padic");
    for prec in [16u32, 64, 256] {
        let (a, b) = (unit(7, prec), unit(7, prec).add(&PAdic::from_int(3, 7, prec).unwrap()));
        g.bench_with_input(BenchmarkId::new("mul", prec), &prec, |bn, _| bn.iter(|| black_box(&a).mul(black_box(&b))));
        g.bench_with_input(BenchmarkId::new("inv", prec), &prec, |bn, _| bn.iter(|| black_box(&a).inv().unwrap()));
    }
    g.finish();
}

fn measure(c: &mut Criterion) {
    let mut g = c.benchmark_group("sublevel_measure");
    let opts = MeasureOptions::default();
    for p in [3u64, 5] {
        let f = cubic(p as i64);
        let ball = PAdicBall::unit(p, 1).unwrap();
        g.bench_with_input(BenchmarkId::new("cubic", p), &p, |bn, _| bn.iter(|| sublevel_measure_exact(&f, &ball, 8, &opts).unwrap()));
    }
    let xy = Poly::var(2, 0).mul(&Poly::var(2, 1));
    let ball = PAdicBall::unit(3, 2).unwrap();
    g.bench_function("xy_over_z3", |bn| bn.iter(|| sublevel_measure_exact(&xy, &ball, 6, &opts).unwrap()));
    g.finish();
}

fn minima(c: &mut Criterion) {
    let mut g = c.benchmark_group("successive_minima");
    for j in [6u32, 10, 14] {
        let l = lattice(3, j, 1_234_567);
        for (name, s) in [("plain", MinimaStrategy::Plain), ("reduced", MinimaStrategy::Reduced)] {
            g.bench_with_input(BenchmarkId::new(name, j), &j, |bn, _| {
                bn.iter(|| l.successive_minima(&rat(1, 1), s, DEFAULT_BUDGET).unwrap())
            });
        }
    }
    g.finish();
}

fn ubiquity(c: &mut Criterion) {
    let mut g = c.benchmark_group("ubiquity");
    let h = Poly::univariate_int(&[3 * 3 * 3 * 2, 3, 1, 5]);
    g.bench_function("hensel_n64", |bn| bn.iter(|| hensel_root(&h, 3, 64).unwrap()));
    let xi = unit(5, 40);
    g.bench_function("strong_approx", |bn| bn.iter(|| strong_approx(&rat(-7, 3), &xi, &rat(3125, 1), &rat(1, 625)).unwrap()));
    let f = veronese(2);
    let theta = Poly::zero(1);
    let cfg = UbiquityConfig::new(3, 2, rat(64, 1), rat(1, 3));
    let x = [rat(47_567_258_413_745, 1)];
    g.bench_function("resonant_construct", |bn| bn.iter(|| resonant_construct(&x, &f, &theta, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, padic, measure, minima, ubiquity);
criterion_main!(benches);
