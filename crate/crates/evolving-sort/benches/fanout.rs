//! Parallel vs sequential fan-out on the two workloads the harness actually
//! runs in bulk: steady-state seed sweeps and balls-into-bins trials.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use evolving_sort::experiments::balls_bins::{run_trial, ForbiddenBinPolicy};
use evolving_sort::fanout;
use evolving_sort::{run_rounds, Budget, EvolvingState, InitPolicy, SorterKind, SorterMachine};

const N: usize = 96;
const STEPS: u64 = 20_000;

fn steady_state_job(seed: &u64) -> u64 {
    let mut state = EvolvingState::new(N, 1, InitPolicy::UniformRandom, *seed).unwrap();
    let mut machine = SorterMachine::new(SorterKind::RepeatedInsertion, N, *seed);
    run_rounds(&mut machine, &mut state, Budget::Steps(STEPS), None);
    state.inversions()
}

fn balls_job(seed: &u64) -> u64 {
    run_trial(1_000, 3.0, ForbiddenBinPolicy::AdversarialLowest, *seed).unwrap()
}

fn bench_fanout(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..16).collect();

    let mut group = c.benchmark_group("steady_state_sweep");
    group.sample_size(10);
    group.bench_with_input(
        BenchmarkId::new("sequential", seeds.len()),
        &seeds,
        |b, s| b.iter(|| fanout::map_keyed_sequential(s, steady_state_job)),
    );
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", seeds.len()), &seeds, |b, s| {
        b.iter(|| fanout::map_keyed_parallel(s, steady_state_job))
    });
    group.finish();

    let mut group = c.benchmark_group("balls_bins_trials");
    group.sample_size(10);
    group.bench_with_input(
        BenchmarkId::new("sequential", seeds.len()),
        &seeds,
        |b, s| b.iter(|| fanout::map_keyed_sequential(s, balls_job)),
    );
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", seeds.len()), &seeds, |b, s| {
        b.iter(|| fanout::map_keyed_parallel(s, balls_job))
    });
    group.finish();
}

criterion_group!(fanout_benches, bench_fanout);
criterion_main!(fanout_benches);
