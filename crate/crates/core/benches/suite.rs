//! Full coherence suite, one worker against the rayon pool.
//!
//! Without the `parallel` feature both variants run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wbicat::coherence::{run_suite, SuiteConfig};
use wbicat::instance::{generate_suite_instance, Instance, Limits};

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for max_dim in [12, 24] {
        let limits = Limits { max_dim, ..Limits::default() };
        let inst = Instance::from_spec(generate_suite_instance(7, &limits).unwrap()).unwrap();
        for (label, jobs) in [("sequential", Some(1)), ("parallel", None)] {
            let cfg = SuiteConfig { jobs, ..SuiteConfig::default() };
            group.bench_with_input(BenchmarkId::new(label, max_dim), &cfg, |b, cfg| {
                b.iter(|| run_suite(&inst, cfg));
            });
        }
    }
    group.finish();
}

criterion_group!(benches, suite);
criterion_main!(benches);
