use std::hint::black_box;

use cfinsler::classify::{classify_point, ToleranceConfig};
use cfinsler::identities::{run_suites, PointData, Suite};
use cfinsler::{Geometry, JetContext, Var};
use cfinsler_bench::{hartogs_point, metric};
use criterion::{criterion_group, criterion_main, Criterion};

fn jets(c: &mut Criterion) {
    let mut g = c.benchmark_group("jet");
    for order in [4, 6, 8] {
        let ctx = JetContext::new(order, hartogs_point()).unwrap();
        let s = ctx.seeds();
        let x = &(&s[Var::Z(0).index()] * &s[Var::Eta(1).index()]) + &s[Var::EtaBar(0).index()];
        g.bench_function(format!("mul order {order}"), |b| {
            b.iter(|| black_box(&x) * black_box(&x))
        });
        g.bench_function(format!("sqrt order {order}"), |b| {
            b.iter(|| black_box(&x).add_const(2.0.into()).sqrt())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let p = hartogs_point();
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(20);
    for name in ["hartogs-randers", "antonelli-shimada"] {
        let m = metric(name);
        g.bench_function(format!("{name} geometry"), |b| {
            b.iter(|| Geometry::new(&m, black_box(&p), 6).unwrap())
        });
        g.bench_function(format!("{name} point data"), |b| {
            b.iter(|| PointData::new(&m, black_box(&p), 6).unwrap())
        });
        let pd = PointData::new(&m, &p, 6).unwrap();
        g.bench_function(format!("{name} all suites"), |b| {
            b.iter(|| run_suites(&Suite::ALL, &m, &pd).unwrap())
        });
        let tol = ToleranceConfig::default();
        g.bench_function(format!("{name} classify"), |b| {
            b.iter(|| classify_point(&m, black_box(&p), 6, &tol).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, jets, pipeline);
criterion_main!(benches);
