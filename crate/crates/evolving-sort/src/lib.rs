//! Simulation and verification toolkit for sorting a list whose hidden total
//! order drifts: every comparison the algorithm performs is followed by a
//! configurable number of random adjacent transpositions in the underlying
//! order. The crate provides the evolving state itself, resumable sorter
//! machines, frozen-state instrumentation (Cartesian-tree blame accounting
//! and per-element counters), statistical experiment presets, and an
//! acceptance suite that checks every claimed invariant at desk scale.

pub mod acceptance;
pub mod cartesian;
pub mod evolving;
pub mod experiments;
pub mod fanout;
pub mod frozen;
pub mod instrument;
pub mod kendall;
pub mod ledger;
pub mod sorters;

pub use evolving::{EvolvingState, InitPolicy, StateError, StateSnapshot, StepLog};
pub use kendall::{count_inversions, kendall_tau, KendallError};
pub use sorters::{
    run_rounds, Budget, PartialRound, Phase, Region, RoundRecord, RunOutput, SorterKind,
    SorterMachine, StepOutcome, TimeSeriesRecord,
};
