use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nsse_core::model::{kernel, Front, ModeGeometry, WavePacket};
use nsse_core::quad::{p_theta, q_t_omega, QuadSpec};
use nsse_core::special::faddeeva;
use nsse_core::units::{to_internal, AtomParams, UnitSystem};
use num_complex::Complex64;

fn setup() -> (UnitSystem, WavePacket, Front) {
    let p = AtomParams::hydrogen_lyman_alpha();
    let u = to_internal(&p, p.lambda0).unwrap();
    let pk = WavePacket::from_units(&u);
    let f = Front::new(u.velocity_to_internal(1.0)).unwrap();
    (u, pk, f)
}

fn special(c: &mut Criterion) {
    let pts: Vec<Complex64> = (0..64)
        .map(|i| {
            let s = i as f64 / 63.0;
            Complex64::new(-30.0 + 60.0 * s, -5.0 + 40.0 * s * s)
        })
        .collect();
    c.bench_function("faddeeva/64 points", |b| {
        b.iter(|| {
            for &z in &pts {
                black_box(faddeeva(black_box(z)).ok());
            }
        })
    });
}

fn model(c: &mut Criterion) {
    let (u, pk, f) = setup();
    let mode = ModeGeometry::new(&u, 0.5, 2.0).unwrap();
    c.bench_function("kernel/single point", |b| {
        b.iter(|| black_box(kernel(black_box(0.1), 0.3, 4.0, &mode, &f, &pk)))
    });
}

fn quadrature(c: &mut Criterion) {
    let (u, pk, f) = setup();
    let spec = QuadSpec::default();
    let mode = ModeGeometry::new(&u, 0.0, 2.0).unwrap();
    let mut g = c.benchmark_group("quadrature");
    g.sample_size(10);
    g.bench_function("q_t_omega", |b| {
        b.iter(|| black_box(q_t_omega(&mode, 4.0, &f, &pk, &spec).unwrap()))
    });
    g.bench_function("p_theta", |b| {
        b.iter(|| black_box(p_theta(&u, 2.0, 4.0, &f, &pk, &spec).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, special, model, quadrature);
criterion_main!(benches);
