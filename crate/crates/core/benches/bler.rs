use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pcpolar::analysis::coset_spectrum_with;
use pcpolar::{CodeSpec, Executor, ExperimentConfig, Scheme, Simulator, StopRule};

fn executors() -> Vec<(&'static str, Executor)> {
    let mut v = vec![("sequential", Executor::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Executor::with_workers(0).unwrap()));
    }
    v
}

fn bler(c: &mut Criterion) {
    let mut g = c.benchmark_group("bler_2048_frames");
    g.sample_size(10);
    for (scheme, k, crc) in [(Scheme::PcPolar, 128, 0), (Scheme::CaPolarPwBrs, 128, 16)] {
        let cfg = ExperimentConfig::new(scheme, CodeSpec::new(k, 256).unwrap(), 8, crc, 1)
            .with_stop(StopRule::fixed(2048));
        for (name, exec) in executors() {
            let sim = Simulator::new(cfg.clone(), exec).unwrap();
            g.bench_with_input(BenchmarkId::new(scheme.name(), name), &sim, |b, sim| {
                b.iter(|| sim.simulate_bler(1.0).unwrap())
            });
        }
    }
    g.finish();
}

fn coset(c: &mut Criterion) {
    let mut g = c.benchmark_group("coset_spectrum_32_8");
    g.sample_size(10);
    for (name, exec) in executors() {
        g.bench_function(name, |b| {
            b.iter(|| coset_spectrum_with(32, 8, &exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bler, coset);
criterion_main!(benches);
