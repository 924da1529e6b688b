use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fpme_core::{
    build_grid, HarmonicSolver, InitialData, PhiSpec, RunConfig, Scheme, SolverMethod,
    SolverOptions, TimeSpec,
};

fn random_bottom(i_steps: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bottom: Vec<f64> = (0..=i_steps).map(|_| rng.gen_range(0.0..1.0)).collect();
    bottom[0] = 0.0;
    bottom[i_steps] = 0.0;
    bottom
}

fn bench_harmonic_extension(c: &mut Criterion) {
    let mut group = c.benchmark_group("harmonic_extension");
    for (i_steps, k_steps) in [(128usize, 64usize), (512, 256)] {
        let grid = build_grid(i_steps as f64 / 2.0, k_steps as f64, i_steps, k_steps).unwrap();
        let bottom = random_bottom(i_steps);
        let direct = HarmonicSolver::new(grid, SolverOptions::default()).unwrap();
        group.bench_with_input(
            BenchmarkId::new("direct", format!("{i_steps}x{k_steps}")),
            &bottom,
            |b, bottom| b.iter(|| direct.solve(bottom, None).unwrap()),
        );
    }
    // iterative methods on the smaller grid, converged to the same residual
    let grid = build_grid(64.0, 64.0, 128, 64).unwrap();
    let bottom = random_bottom(128);
    for method in [SolverMethod::ConjugateDirection, SolverMethod::IterativeRelaxation] {
        let solver = HarmonicSolver::new(
            grid,
            SolverOptions {
                method,
                tolerance: 1e-8,
                max_iterations: 200_000,
                warm_start: false,
            },
        )
        .unwrap();
        group.bench_with_input(
            BenchmarkId::new(format!("{method:?}"), "128x64"),
            &bottom,
            |b, bottom| b.iter(|| solver.solve(bottom, None).unwrap()),
        );
    }
    group.finish();
}

fn bench_scheme_step(c: &mut Criterion) {
    // reference setup at dx = 0.5
    let grid = build_grid(100.0, 100.0, 400, 200).unwrap();
    let time = TimeSpec::new(1.0, 2).unwrap();
    let config = RunConfig::new(
        grid,
        time,
        PhiSpec::power_law(1.0).unwrap(),
        InitialData::CauchyKernel,
    );
    let scheme = Scheme::new(config).unwrap();
    let state = scheme.initialize().unwrap();
    c.bench_function("scheme_step_400x200", |b| {
        b.iter(|| scheme.step(&state).unwrap())
    });
}

criterion_group!(benches, bench_harmonic_extension, bench_scheme_step);
criterion_main!(benches);
