//! Instrumented runs: drive a repeated-insertion machine at alpha = 1 while
//! maintaining the counter ledger and checking, step by step, every claim the
//! frozen-state analysis makes. Violations are counted by name and the
//! offending snapshots dumped, so a failed claim is diagnosable rather than
//! silent.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::evolving::{EvolvingState, InitPolicy, StateError};
use crate::frozen::{
    bad_inversion_count, check_lemma6, classify_bad_inversions, freeze, s_replay_oracle,
    verify_blame_structure, verify_classification_against_replay,
};
use crate::ledger::{
    check_invariant1, check_invariant2, check_lemma7, check_pairing_covers_minima,
    triangle_corollary_holds, CounterLedger,
};
use crate::sorters::{RoundRecord, SorterKind, SorterMachine, StepOutcome};

/// Distinct stream for quicksort pivots and other machine-side draws.
pub(crate) const MACHINE_SEED_SALT: u64 = 0x517c_c1b7_2722_0a95;

#[derive(Clone, Debug)]
pub struct InstrumentOptions {
    /// Completed rounds to cover per run.
    pub rounds: u64,
    /// Cadence (in steps) of the Lemma-6 and S-oracle checks.
    pub lemma_check_every: u64,
    /// Cadence of the full classification, its replay oracle, and the blame
    /// structure checks.
    pub classify_every: u64,
    /// Cadence of the freeze purity (side-effect-free) check.
    pub freeze_purity_every: u64,
    /// Instrumented runs are capped; metrics-only runs are not.
    pub max_n: usize,
    /// Keep at most this many violation snapshot dumps.
    pub max_dumps: usize,
    pub init: InitPolicy,
}

impl Default for InstrumentOptions {
    fn default() -> Self {
        Self {
            rounds: 6,
            lemma_check_every: 5,
            classify_every: 1,
            freeze_purity_every: 64,
            max_n: 256,
            max_dumps: 3,
            init: InitPolicy::UniformRandom,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstrumentError {
    ExceedsInstrumentedCap { n: usize, cap: usize },
    State(StateError),
}

impl fmt::Display for InstrumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstrumentError::ExceedsInstrumentedCap { n, cap } => {
                write!(f, "instrumented runs are capped at n <= {cap}, got {n}")
            }
            InstrumentError::State(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for InstrumentError {}

impl From<StateError> for InstrumentError {
    fn from(e: StateError) -> Self {
        InstrumentError::State(e)
    }
}

/// Outcome of one instrumented run. `violations` is empty when every checked
/// claim held at every checked instant.
#[derive(Clone, Debug, Default, Serialize)]
pub struct InstrumentReport {
    pub n: usize,
    pub seed: u64,
    pub steps: u64,
    pub rounds_completed: u64,
    pub checks_performed: u64,
    pub violations: BTreeMap<String, u64>,
    pub max_bad_inversions: u64,
    pub round_records: Vec<RoundRecord>,
    /// Snapshot dumps captured at the first few violations.
    pub dumps: Vec<String>,
}

impl InstrumentReport {
    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }

    pub fn merge(&mut self, other: &InstrumentReport) {
        self.steps += other.steps;
        self.rounds_completed += other.rounds_completed;
        self.checks_performed += other.checks_performed;
        self.max_bad_inversions = self.max_bad_inversions.max(other.max_bad_inversions);
        for (key, count) in &other.violations {
            *self.violations.entry(key.clone()).or_insert(0) += count;
        }
        for dump in &other.dumps {
            if self.dumps.len() < 3 {
                self.dumps.push(dump.clone());
            }
        }
    }

    fn flag(&mut self, key: &str, dump: Option<String>, max_dumps: usize) {
        *self.violations.entry(key.to_string()).or_insert(0) += 1;
        if let Some(dump) = dump {
            if self.dumps.len() < max_dumps {
                self.dumps.push(dump);
            }
        }
    }
}

/// Run `rounds` instrumented insertion rounds at alpha = 1 and check the full
/// claim set. The ledger machinery is only defined for one swap per step, so
/// alpha is not configurable here.
pub fn run_instrumented(
    n: usize,
    seed: u64,
    opts: &InstrumentOptions,
) -> Result<InstrumentReport, InstrumentError> {
    if n > opts.max_n {
        return Err(InstrumentError::ExceedsInstrumentedCap { n, cap: opts.max_n });
    }
    let mut state = EvolvingState::new(n, 1, opts.init, seed)?;
    let mut machine =
        SorterMachine::new(SorterKind::RepeatedInsertion, n, seed ^ MACHINE_SEED_SALT);
    let mut ledger = CounterLedger::new(n);
    let mut report = InstrumentReport {
        n,
        seed,
        ..InstrumentReport::default()
    };
    let mut snapshot = freeze(&state, &machine).expect("insertion machine");
    check_round_start(&state, &snapshot, &ledger, &mut report, opts);

    while report.rounds_completed < opts.rounds {
        // The sort sub-step alone must not change B. An alpha-0 clone performs
        // exactly that sub-step; at a round boundary the new frame forces B to 0.
        let b_pre = bad_inversion_count(&state, &machine).expect("insertion phase");
        {
            let mut state_c = state.clone_with_alpha(0);
            let mut machine_c = machine.clone();
            let outcome_c = machine_c.advance(&mut state_c);
            let b_mid = bad_inversion_count(&state_c, &machine_c).expect("insertion phase");
            let expected = if matches!(outcome_c, StepOutcome::RoundCompleted(_)) {
                0
            } else {
                b_pre
            };
            report.checks_performed += 1;
            if b_mid != expected {
                report.flag(
                    "b_sort_substep_invariance",
                    Some(snapshot.dump_json(Some(ledger.counters()))),
                    opts.max_dumps,
                );
            }
        }

        let outcome = machine.advance(&mut state);
        report.steps += 1;
        let swap_ranks = state.last_step().random_swap_ranks.clone();
        debug_assert_eq!(swap_ranks.len(), 1, "instrumented runs use alpha = 1");

        // Charge the ledger for the swap and re-derive the frozen structures.
        let after = freeze(&state, &machine).expect("insertion machine");
        for &r in &swap_ranks {
            let lowered = state.item_with_rank(r);
            let raised = state.item_with_rank(r + 1);
            ledger.on_random_swap(raised, lowered, &snapshot, &after);
        }
        snapshot = after;

        // Invariants after every swap.
        let inv2 = check_invariant2(&snapshot, &ledger);
        let inv1 = check_invariant1(&snapshot, &ledger);
        report.checks_performed += 2;
        if !inv2.is_empty() {
            report.flag(
                "invariant2",
                Some(snapshot.dump_json(Some(ledger.counters()))),
                opts.max_dumps,
            );
        }
        if !inv1.is_empty() {
            report.flag(
                "invariant1",
                Some(snapshot.dump_json(Some(ledger.counters()))),
                opts.max_dumps,
            );
            if inv2.is_empty() {
                // Invariant 2 held but did not deliver Invariant 1.
                report.flag("inv2_implies_inv1", None, opts.max_dumps);
            }
        }
        if !check_pairing_covers_minima(&snapshot).is_empty() {
            report.flag(
                "pairing_covers_minima",
                Some(snapshot.dump_json(None)),
                opts.max_dumps,
            );
        }
        let bad = bad_inversion_count(&state, &machine).expect("insertion phase");
        report.max_bad_inversions = report.max_bad_inversions.max(bad);
        report.checks_performed += 3;
        if bad > snapshot.sigma_bound_sum() {
            report.flag(
                "b_bound_sigma_gaps",
                Some(snapshot.dump_json(None)),
                opts.max_dumps,
            );
        }
        if !check_lemma7(bad, &ledger) {
            report.flag(
                "lemma7",
                Some(snapshot.dump_json(Some(ledger.counters()))),
                opts.max_dumps,
            );
        }
        if !triangle_corollary_holds(&snapshot, &ledger) {
            report.flag("triangle_corollary", None, opts.max_dumps);
        }

        if let StepOutcome::RoundCompleted(record) = outcome {
            report.checks_performed += 3;
            if !record.identity_exact(n) {
                report.flag("lemma3_identity", None, opts.max_dumps);
            }
            if !record.drift_bound(n) {
                report.flag("lemma3_drift", None, opts.max_dumps);
            }
            if !record.length_bound_strict(n) {
                report.flag("lemma3_length_strict", None, opts.max_dumps);
            }
            report.round_records.push(record);
            report.rounds_completed += 1;
            ledger.reset();
            // `snapshot` already reflects the fresh round (the machine reset
            // before the freeze above).
            check_round_start(&state, &snapshot, &ledger, &mut report, opts);
            if report.rounds_completed >= opts.rounds {
                break;
            }
        }

        if report.steps.is_multiple_of(opts.lemma_check_every) {
            report.checks_performed += 2;
            let start = machine.round_start(&state);
            if !check_lemma6(&state, &machine, &snapshot, start).expect("fresh snapshot") {
                report.flag("lemma6", Some(snapshot.dump_json(None)), opts.max_dumps);
            }
            let oracle = s_replay_oracle(&state, &machine).expect("insertion phase");
            if oracle != snapshot.s_remaining {
                report.flag("s_oracle", Some(snapshot.dump_json(None)), opts.max_dumps);
            }
        }

        if report.steps.is_multiple_of(opts.classify_every) {
            report.checks_performed += 2;
            let class =
                classify_bad_inversions(&state, &machine, &snapshot).expect("fresh snapshot");
            if !verify_classification_against_replay(&state, &snapshot, &class).is_empty() {
                report.flag(
                    "classification_oracle",
                    Some(snapshot.dump_json(None)),
                    opts.max_dumps,
                );
            }
            if !verify_blame_structure(&state, &snapshot, &class).is_empty() {
                report.flag(
                    "blame_structure",
                    Some(snapshot.dump_json(None)),
                    opts.max_dumps,
                );
            }
        }

        if report.steps.is_multiple_of(opts.freeze_purity_every) {
            report.checks_performed += 1;
            let before_json = state.snapshot_json();
            let _ = freeze(&state, &machine).expect("insertion machine");
            if before_json != state.snapshot_json() {
                report.flag("freeze_purity", None, opts.max_dumps);
            }
        }
    }
    Ok(report)
}

/// Checks pinned to round-start instants: S sits in `[I, I + n - 1]`, no bad
/// inversions exist yet, and the counters are all zero.
fn check_round_start(
    state: &EvolvingState,
    snapshot: &crate::frozen::FrozenSnapshot,
    ledger: &CounterLedger,
    report: &mut InstrumentReport,
    opts: &InstrumentOptions,
) {
    report.checks_performed += 3;
    let inversions = state.inversions();
    let n = state.n() as u64;
    if snapshot.s_remaining < inversions || snapshot.s_remaining > inversions + n - 1 {
        report.flag(
            "s_band_at_round_start",
            Some(snapshot.dump_json(None)),
            opts.max_dumps,
        );
    }
    if snapshot.hat_inversions() != 0 {
        // A full frozen round sorts completely, so B must start at zero.
        report.flag(
            "b_zero_at_round_start",
            Some(snapshot.dump_json(None)),
            opts.max_dumps,
        );
    }
    if !ledger.all_zero() {
        report.flag("counters_reset_at_round_start", None, opts.max_dumps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_has_zero_violations() {
        let opts = InstrumentOptions {
            rounds: 3,
            ..InstrumentOptions::default()
        };
        for seed in 0..5 {
            let report = run_instrumented(12, seed, &opts).unwrap();
            assert_eq!(
                report.total_violations(),
                0,
                "seed {seed}: {:?}\ndumps: {:?}",
                report.violations,
                report.dumps
            );
            assert_eq!(report.rounds_completed, 3);
            assert!(report.steps > 0);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let opts = InstrumentOptions::default();
        assert!(matches!(
            run_instrumented(512, 0, &opts),
            Err(InstrumentError::ExceedsInstrumentedCap { n: 512, cap: 256 })
        ));
    }

    #[test]
    fn reports_merge_by_key() {
        let opts = InstrumentOptions {
            rounds: 2,
            ..InstrumentOptions::default()
        };
        let mut total = InstrumentReport::default();
        for seed in 0..3 {
            total.merge(&run_instrumented(8, seed, &opts).unwrap());
        }
        assert_eq!(total.rounds_completed, 6);
        assert_eq!(total.total_violations(), 0);
    }
}
