use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use sumprod::cayley::{spectrum, CayleyDigraph, SpectrumMethod};
use sumprod::charsums::{gap2_check, kloosterman_all, QuadraticForm};
use sumprod::{BiPoly, Elem, RingCtx};

fn level_graph(field: &str, poly: &str) -> CayleyDigraph {
    let ctx = RingCtx::parse_field(field).unwrap();
    let p = BiPoly::parse(poly, &ctx).unwrap();
    CayleyDigraph::from_level(&p, Elem::ONE).unwrap()
}

/// Runs `f` on the global pool and on a one-thread pool.
fn both_pools<F: Fn() + Sync>(c: &mut Criterion, group: &str, id: &str, f: F) {
    let single = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("parallel", id), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("single-thread", id), |b| b.iter(|| single.install(&f)));
    g.finish();
}

fn spectra(c: &mut Criterion) {
    for (field, method) in [
        ("101", SpectrumMethod::Transform),
        ("31", SpectrumMethod::Direct),
        ("5^2", SpectrumMethod::Transform),
    ] {
        let g = level_graph(field, "x1*x2");
        both_pools(c, "spectrum", &format!("F_{field}/{method:?}"), || {
            spectrum(&g, method).unwrap();
        });
    }
}

fn sums(c: &mut Criterion) {
    both_pools(c, "kloosterman_all", "m=99", || {
        kloosterman_all(99).unwrap();
    });
    both_pools(c, "gap2", "m=35", || {
        gap2_check(&QuadraticForm::sum_of_squares(35)).unwrap();
    });
}

criterion_group!(benches, spectra, sums);
criterion_main!(benches);
