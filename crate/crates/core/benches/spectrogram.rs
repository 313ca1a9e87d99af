use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sgft::baseline::{baseline_spectrogram_with, HeatKernelWindow};
use sgft::datasets::{grid_graph, two_waveform_signal, GridSpec};
use sgft::{spectrogram_with, EigenBasis, Execution, LocalizationParams, OperatorKind};

fn strategies() -> Vec<(&'static str, Execution)> {
    #[cfg_attr(not(feature = "parallel"), allow(unused_mut))]
    let mut out = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    out.push(("parallel", Execution::Parallel));
    out
}

fn bench_spectrograms(c: &mut Criterion) {
    let size = 24;
    let g = grid_graph(GridSpec::new(size, size).with_boundary_weight(1e-5)).unwrap();
    let f = two_waveform_signal(size, size, 2.0, 10.0);
    let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
    let comb = EigenBasis::of_graph(&g, OperatorKind::CombinatorialLaplacian, g.n()).unwrap();
    let heat = HeatKernelWindow::new(&comb, 200.0).unwrap();
    let params = LocalizationParams::new(1e-4).unwrap();

    let mut group = c.benchmark_group("spectrogram_24x24_K200");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_with_input(BenchmarkId::new("ppr", name), &exec, |b, &exec| {
            b.iter(|| spectrogram_with(exec, &g, &basis, black_box(&f), &params, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("conv", name), &exec, |b, &exec| {
            b.iter(|| {
                baseline_spectrogram_with(exec, &comb, black_box(&f), &heat, 200, None).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_spectrograms);
criterion_main!(benches);
