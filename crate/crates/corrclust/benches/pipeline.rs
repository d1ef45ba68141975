use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use corrclust::generate::shuffled_stream;
use corrclust::{
    exact_decomposition, gen_planted, streaming_cluster, sublinear_time_cluster, AdjacencyOracle, LabeledGraph, Params,
    PlantedSpec, RecoveryConfig,
};

fn instance(n_cliques: usize) -> LabeledGraph {
    gen_planted(&PlantedSpec::new(vec![64; n_cliques], 0.001, 32, 1)).unwrap().graph
}

/// Runs `f` on the global pool and on a one-thread pool. Without the `parallel`
/// feature both rows take the plain-loop path.
fn both<F: Fn() + Sync>(c: &mut Criterion, group: &str, size: usize, f: F) {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let build = if corrclust::par::is_parallel() { "rayon" } else { "seq-build" };
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new(format!("{build}/pool"), size), &size, |b, _| b.iter(&f));
    g.bench_with_input(BenchmarkId::new(format!("{build}/1-thread"), size), &size, |b, _| b.iter(|| one.install(&f)));
    g.finish();
}

fn exact(c: &mut Criterion) {
    for k in [8, 32] {
        let g = instance(k);
        let p = Params::loose(0.07, 0.07).unwrap();
        both(c, "exact_decomposition", g.n(), || {
            black_box(exact_decomposition(&g, p));
        });
    }
}

fn query(c: &mut Criterion) {
    let cfg = RecoveryConfig::new(0.0145, 3).unwrap().with_c(0.05).unwrap();
    for k in [32, 128] {
        let g = instance(k);
        both(c, "sublinear_time_cluster", g.n(), || {
            black_box(sublinear_time_cluster(&AdjacencyOracle::new(&g), &cfg));
        });
    }
}

fn stream(c: &mut Criterion) {
    let cfg = RecoveryConfig::new(0.0145, 3).unwrap().with_c(0.05).unwrap().with_beta(1.0).unwrap();
    let g = instance(16);
    let s = shuffled_stream(&g, 3);
    both(c, "streaming_cluster", g.n(), || {
        black_box(streaming_cluster(&s, g.n(), &cfg).unwrap());
    });
}

criterion_group!(benches, exact, query, stream);
criterion_main!(benches);
