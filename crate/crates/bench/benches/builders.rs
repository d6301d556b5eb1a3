use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fc_monodromy::classify::closure_dimension_at;
use fc_monodromy::monodromy::{self, Basis};
use fc_monodromy::series::{base_point, fc_series, pde_residual};
use fc_monodromy::verify::{run_suite, Backing, SuiteOptions};
use fc_monodromy::{BinaryIndex, ExactScalar, Generators, PairedScalar, ParameterPoint, DEFAULT_TOL};

fn point(m: usize) -> ParameterPoint {
    let c: Vec<String> = (0..m).map(|k| format!("{}/{}", k + 1, 2 * k + 5)).collect();
    let c: Vec<&str> = c.iter().map(String::as_str).collect();
    ParameterPoint::parse("1/3", "2/7", &c).unwrap()
}

fn builders(c: &mut Criterion) {
    let mut g = c.benchmark_group("generators");
    for m in 1..=3 {
        let gen = Generators::<ExactScalar>::symbolic(m).unwrap();
        g.bench_with_input(BenchmarkId::new("exact-tilde", m), &gen, |bch, gen| {
            bch.iter(|| monodromy::generators(black_box(gen), Basis::Tilde).unwrap())
        });
    }
    for m in 1..=5 {
        let gen = Generators::<PairedScalar>::numeric(&point(m), DEFAULT_TOL);
        g.bench_with_input(BenchmarkId::new("numeric-plain", m), &gen, |bch, gen| {
            bch.iter(|| monodromy::generators(black_box(gen), Basis::Plain).unwrap())
        });
    }
    g.finish();
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for m in 1..=3 {
        g.bench_with_input(BenchmarkId::new("exact", m), &m, |bch, &m| {
            bch.iter(|| run_suite(&SuiteOptions::new(m, Backing::Exact, 0)).unwrap())
        });
    }
    g.bench_function("numeric/5", |bch| {
        bch.iter(|| run_suite(&SuiteOptions::new(5, Backing::Numeric, 0)).unwrap())
    });
    g.finish();
}

fn closure(c: &mut Criterion) {
    let mut g = c.benchmark_group("closure");
    for m in 1..=3 {
        let p = point(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &p, |bch, p| {
            bch.iter(|| closure_dimension_at(black_box(p), DEFAULT_TOL).unwrap())
        });
    }
    g.finish();
}

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    for m in 1..=3 {
        let p = point(m);
        let x = base_point(m);
        g.bench_with_input(BenchmarkId::new("fc-order-20", m), &p, |bch, p| {
            bch.iter(|| fc_series(&p.a, &p.b, &p.c, black_box(&x), 20).unwrap())
        });
        let top = BinaryIndex::all(m).last().unwrap();
        g.bench_with_input(BenchmarkId::new("residual-exact", m), &p, |bch, p| {
            bch.iter(|| pde_residual(p, &top, 12, false).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("residual-numeric", m), &p, |bch, p| {
            bch.iter(|| pde_residual(p, &top, 12, true).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, builders, suites, closure, series);
criterion_main!(benches);
