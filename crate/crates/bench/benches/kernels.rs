use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fastukf::numkit::{cholesky_sqrt, mat_exp, propagate};
use fastukf::reentry::{reentry_derivatives, ReentryState, VehicleParams};
use fastukf::{DMatrix, DVector, Result};

fn spd(n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.4);
    &a * a.transpose() + DMatrix::identity(n, n)
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("mat_exp");
    for n in [5, 10] {
        let a = DMatrix::from_fn(n, n, |i, j| ((i + 2 * j) % 5) as f64 * 0.3 - 0.5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| mat_exp(black_box(a), 1.0)));
    }
    group.finish();

    let mut group = c.benchmark_group("cholesky");
    for n in [5, 10] {
        let m = spd(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| cholesky_sqrt(black_box(m)).unwrap()));
    }
    group.finish();

    let params = VehicleParams::default();
    let field = |x: &DVector<f64>, _t: f64| -> Result<DVector<f64>> {
        let d = reentry_derivatives(&ReentryState::from_slice(x.as_slice()), &params)?;
        Ok(DVector::from_row_slice(&d))
    };
    let x0 = ReentryState::reference_initial().to_vector();
    c.bench_function("rk4_reentry_1s", |b| {
        b.iter(|| propagate(&field, black_box(&x0), 0.0, 1.0, 0.1).unwrap())
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);
