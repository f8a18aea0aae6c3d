use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use thermal_renyi::oracle::oracle_trace;
use thermal_renyi::weyl::band_amplitudes;
use thermal_renyi::{
    d_alpha_displaced, d_alpha_thermal, fejer_default_constant, fejer_scan, Complex64,
    DisplacedThermalSpec, ModeVector, RenyiOrder, SeriesOptions,
};

fn spec(temps: &[f64], u: &[(f64, f64)]) -> DisplacedThermalSpec {
    let u = u.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    DisplacedThermalSpec::new(ModeVector::from_values(temps).unwrap(), u).unwrap()
}

fn thermal(c: &mut Criterion) {
    let r = ModeVector::from_values(&[1.0, 0.5, 3.0]).unwrap();
    let s = ModeVector::from_values(&[2.0, 1.5, 2.5]).unwrap();
    let a = RenyiOrder::new(1.3).unwrap();
    c.bench_function("thermal_closed_form_3_modes", |b| {
        b.iter(|| d_alpha_thermal(black_box(&r), black_box(&s), a).unwrap())
    });
}

fn displaced(c: &mut Criterion) {
    let sigma = spec(&[2.0], &[(0.0, 0.0)]);
    let rho = spec(&[1.0], &[(1.0, 0.0)]);
    let mut group = c.benchmark_group("displaced_series");
    // α near α* = 2 forces long k tails
    for alpha in [0.5, 1.5, 1.9] {
        let a = RenyiOrder::new(alpha).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(alpha), &a, |b, &a| {
            b.iter(|| d_alpha_displaced(&rho, &sigma, a, SeriesOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn weyl(c: &mut Criterion) {
    c.bench_function("weyl_band_m5_n10000", |b| {
        b.iter(|| band_amplitudes(5, 10_000, black_box(1.3)))
    });
    let u = Complex64::new(1.0, 0.0);
    let k = fejer_default_constant(u);
    c.bench_function("fejer_scan_10000", |b| {
        b.iter(|| fejer_scan(u, 10_000, k).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let sigma = spec(&[2.0], &[(0.0, 0.0)]);
    let rho = spec(&[1.0], &[(1.0, 0.0)]);
    let mut group = c.benchmark_group("oracle_single_mode");
    group.sample_size(10);
    for n in [32usize, 64] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| oracle_trace(&rho, &sigma, RenyiOrder::new(0.7).unwrap(), n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, thermal, displaced, weyl, oracle);
criterion_main!(benches);
