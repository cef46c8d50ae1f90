//! Reproducibility guarantees: identical configs give byte-identical outputs,
//! frozen snapshots serialize to pinned golden strings, and parallel and
//! sequential fan-out agree.

use evolving_sort::experiments::output::{series_csv_string, summary_json_string, CSV_HEADER};
use evolving_sort::experiments::presets::{run_preset, run_simulate};
use evolving_sort::experiments::ExperimentConfig;
use evolving_sort::frozen::freeze;
use evolving_sort::sorters::{SorterKind, SorterMachine};
use evolving_sort::{EvolvingState, InitPolicy};

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        preset: "simulate".into(),
        n_list: vec![12, 16],
        seeds: 3,
        steps: Some(200),
        sample_every: Some(2),
        ..ExperimentConfig::default()
    }
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let config = small_config();
    let a = run_simulate(&config);
    let b = run_simulate(&config);
    assert_eq!(
        summary_json_string(&a.summary),
        summary_json_string(&b.summary)
    );
    assert_eq!(a.series.len(), b.series.len());
    for ((stem_a, rows_a), (stem_b, rows_b)) in a.series.iter().zip(b.series.iter()) {
        assert_eq!(stem_a, stem_b);
        assert_eq!(series_csv_string(rows_a), series_csv_string(rows_b));
    }
}

#[test]
fn csv_starts_with_the_documented_header() {
    let config = small_config();
    let out = run_simulate(&config);
    let csv = series_csv_string(&out.series[0].1);
    assert!(csv.starts_with(CSV_HEADER));
}

#[test]
fn instrumented_simulate_fills_s_and_b_columns() {
    let config = ExperimentConfig {
        preset: "simulate".into(),
        n_list: vec![10],
        seeds: 1,
        steps: Some(60),
        sample_every: Some(5),
        instrument: true,
        ..ExperimentConfig::default()
    };
    let out = run_preset(&config).unwrap();
    let rows = &out.series[0].1;
    assert!(!rows.is_empty());
    for row in rows {
        assert!(row.s_remaining.is_some());
        assert!(row.bad_inversions.is_some());
    }
}

#[test]
fn frozen_snapshot_dump_matches_golden() {
    let mut state = EvolvingState::new(8, 1, InitPolicy::UniformRandom, 5).unwrap();
    let mut machine = SorterMachine::new(SorterKind::RepeatedInsertion, 8, 5);
    for _ in 0..13 {
        machine.advance(&mut state);
    }
    let snap = freeze(&state, &machine).unwrap();
    let golden = concat!(
        "{\"clock\":13,\"n\":8,\"s_remaining\":9,",
        "\"hat_sigma\":[0,1,3,2,4,6,5,7],",
        "\"frozen_items\":[7,1,4,2,6,0,3,5],",
        "\"tree_parent\":[-1,0,1,4,2,4,7,5,7,8],",
        "\"minima_path\":[0,1,2,4,5,7,8,9],",
        "\"m_map\":[0,1,2,3,3,5,6,6,8,9],",
        "\"pairing\":[9,-1,-1,-1,3,-1,-1,6,-1,-1],",
        "\"inc\":null,\"dec\":null}"
    );
    assert_eq!(snap.dump_json(None), golden);
}

#[test]
fn state_snapshot_matches_golden() {
    let mut state = EvolvingState::new(8, 1, InitPolicy::UniformRandom, 5).unwrap();
    let mut machine = SorterMachine::new(SorterKind::RepeatedInsertion, 8, 5);
    for _ in 0..9 {
        machine.advance(&mut state);
    }
    let golden = concat!(
        "{\"n\":8,\"alpha\":1,\"seed\":5,\"clock\":9,\"inversions\":10,",
        "\"maintained\":[1,4,2,0,3,5,6,7],\"true_rank\":[5,1,3,6,2,7,4,0]}"
    );
    assert_eq!(state.snapshot_json(), golden);
}

#[cfg(feature = "parallel")]
#[test]
fn parallel_and_sequential_fanout_produce_identical_results() {
    use evolving_sort::fanout::{map_keyed_parallel, map_keyed_sequential};
    let seeds: Vec<u64> = (0..24).collect();
    let job = |&seed: &u64| {
        let mut state = EvolvingState::new(24, 1, InitPolicy::UniformRandom, seed).unwrap();
        let mut machine = SorterMachine::new(SorterKind::RepeatedInsertion, 24, seed);
        evolving_sort::run_rounds(
            &mut machine,
            &mut state,
            evolving_sort::Budget::Rounds(3),
            Some(4),
        );
        state.snapshot_json()
    };
    assert_eq!(
        map_keyed_parallel(&seeds, job),
        map_keyed_sequential(&seeds, job)
    );
}
