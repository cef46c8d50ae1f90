//! Core model: a maintained list `l`, a hidden total order `l'` that drifts by
//! one random adjacent transposition per comparison (times `alpha`), and the
//! permutation between them with an incrementally maintained inversion count.
//!
//! The hidden order is stored as a rank assignment (`true_rank`), so both swap
//! kinds and their inversion deltas are O(1). Items are identified by the ids
//! `0..n`; the maintained list starts as `[0, 1, .., n-1]` and the init policy
//! decides the initial rank assignment.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Initial rank assignment for a fresh state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    /// Maintained list already matches the hidden order (0 inversions).
    Identity,
    /// Hidden order is the exact reverse of the list (n(n-1)/2 inversions).
    Reversed,
    /// Uniformly random rank assignment from the seeded generator.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateError {
    /// `n < 2` leaves nothing to sort or swap.
    TooFewItems { n: usize },
    /// A position argument was outside `0..n`.
    PositionOutOfRange { pos: usize, n: usize },
    /// `compare_step` requires two distinct positions.
    SamePosition { pos: usize },
}

impl fmt::Display for StateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateError::TooFewItems { n } => write!(f, "need at least 2 items, got {n}"),
            StateError::PositionOutOfRange { pos, n } => {
                write!(f, "position {pos} out of range for n = {n}")
            }
            StateError::SamePosition { pos } => {
                write!(
                    f,
                    "compare_step needs two distinct positions, got {pos} twice"
                )
            }
        }
    }
}

impl std::error::Error for StateError {}

/// Record of one comparison step: the probe, the sorter's action, and the
/// random adjacent swaps that followed it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepLog {
    /// Clock value after the step (steps are 1-indexed by completion time).
    pub step_index: u64,
    /// Compared positions, or `None` for the short-circuit sentinel form.
    pub compare_positions: Option<(usize, usize)>,
    /// Whether the sorter swapped the probed adjacent pair.
    pub sort_swap_applied: bool,
    /// Inversion change from the sort action: -1 or 0.
    pub sort_delta_i: i64,
    /// Rank index `r` of each random swap (ranks `r` and `r+1` exchanged).
    pub random_swap_ranks: Vec<usize>,
    /// Inversion change (+1/-1) of each random swap, same order as the ranks.
    pub random_swap_deltas: Vec<i64>,
}

impl StepLog {
    /// Total inversion change contributed by the random swaps of this step.
    pub fn random_delta_i(&self) -> i64 {
        self.random_swap_deltas.iter().sum()
    }

    /// Number of random swaps in this step that removed an inversion.
    pub fn good_swaps(&self) -> u64 {
        self.random_swap_deltas.iter().filter(|&&d| d == -1).count() as u64
    }

    fn reset(&mut self, step_index: u64, compare: Option<(usize, usize)>) {
        self.step_index = step_index;
        self.compare_positions = compare;
        self.sort_swap_applied = false;
        self.sort_delta_i = 0;
        self.random_swap_ranks.clear();
        self.random_swap_deltas.clear();
    }
}

/// Serializable snapshot of a state for replay tests: everything needed to
/// recognize two states as equal, minus the generator internals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub n: usize,
    pub alpha: usize,
    pub seed: u64,
    pub clock: u64,
    pub inversions: u64,
    pub maintained: Vec<usize>,
    pub true_rank: Vec<usize>,
}

/// The evolving pair (maintained list, hidden order) plus clock and inversion
/// counter. Single-threaded by design; run independent seeds in parallel
/// instead of sharing one state.
#[derive(Clone, Debug)]
pub struct EvolvingState {
    n: usize,
    alpha: usize,
    seed: u64,
    /// Position -> item id (the list `l`).
    maintained: Vec<usize>,
    /// Item id -> rank in the hidden order (the order `l'`).
    true_rank: Vec<usize>,
    /// Position -> rank. Kept consistent with `maintained`/`true_rank`.
    sigma: Vec<usize>,
    /// Rank -> position. Inverse of `sigma`.
    sigma_inv: Vec<usize>,
    clock: u64,
    inversions: u64,
    rng: ChaCha8Rng,
    last_step: StepLog,
}

impl EvolvingState {
    pub fn new(n: usize, alpha: usize, init: InitPolicy, seed: u64) -> Result<Self, StateError> {
        if n < 2 {
            return Err(StateError::TooFewItems { n });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let true_rank: Vec<usize> = match init {
            InitPolicy::Identity => (0..n).collect(),
            InitPolicy::Reversed => (0..n).map(|i| n - 1 - i).collect(),
            InitPolicy::UniformRandom => {
                let mut ranks: Vec<usize> = (0..n).collect();
                // Fisher-Yates with the state's own generator.
                for i in (1..n).rev() {
                    let j = rng.random_range(0..=i);
                    ranks.swap(i, j);
                }
                ranks
            }
        };
        let maintained: Vec<usize> = (0..n).collect();
        let sigma: Vec<usize> = maintained.iter().map(|&item| true_rank[item]).collect();
        let mut sigma_inv = vec![0usize; n];
        for (pos, &rank) in sigma.iter().enumerate() {
            sigma_inv[rank] = pos;
        }
        let mut state = Self {
            n,
            alpha,
            seed,
            maintained,
            true_rank,
            sigma,
            sigma_inv,
            clock: 0,
            inversions: 0,
            rng,
            last_step: StepLog::default(),
        };
        state.inversions = state.brute_force_inversions();
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Incremental inversion count `I_t`. O(1).
    pub fn inversions(&self) -> u64 {
        self.inversions
    }

    /// Position -> rank view of the permutation between list and hidden order.
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// Item at a list position.
    pub fn item_at(&self, pos: usize) -> usize {
        self.maintained[pos]
    }

    /// Hidden-order rank of an item.
    pub fn rank_of_item(&self, item: usize) -> usize {
        self.true_rank[item]
    }

    /// Item currently holding a given rank.
    pub fn item_with_rank(&self, rank: usize) -> usize {
        self.maintained[self.sigma_inv[rank]]
    }

    /// Log of the most recent comparison step.
    pub fn last_step(&self) -> &StepLog {
        &self.last_step
    }

    /// Does the element at position `a` precede the element at position `b`
    /// in the hidden order? Pure query; not a model step.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.sigma[a] < self.sigma[b]
    }

    /// O(n^2) recount of inverted position pairs. The oracle the incremental
    /// counter is checked against.
    pub fn brute_force_inversions(&self) -> u64 {
        let mut count = 0u64;
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                if self.sigma[x] > self.sigma[y] {
                    count += 1;
                }
            }
        }
        count
    }

    /// One comparison step of the model: report whether the element at `a`
    /// precedes the element at `b` (as of before the step), then apply the
    /// `alpha` random adjacent swaps and advance the clock.
    pub fn compare_step(&mut self, a: usize, b: usize) -> Result<bool, StateError> {
        self.check_pos(a)?;
        self.check_pos(b)?;
        if a == b {
            return Err(StateError::SamePosition { pos: a });
        }
        let outcome = self.sigma[a] < self.sigma[b];
        self.last_step.reset(self.clock + 1, Some((a, b)));
        self.finish_step();
        Ok(outcome)
    }

    /// The short-circuit form: the inner-loop guard failed on `j = 0` without
    /// comparing elements, but it still costs a step and triggers the swaps.
    pub fn sentinel_step(&mut self) {
        self.last_step.reset(self.clock + 1, None);
        self.finish_step();
    }

    /// One evaluation of the insertion-sort inner guard at position `j >= 1`:
    /// compare positions `(j, j-1)`, swap them if inverted, then apply the
    /// random swaps and advance the clock. Returns whether the guard was true.
    pub fn insertion_guard_step(&mut self, j: usize) -> bool {
        assert!(j >= 1 && j < self.n, "guard position {j} out of range");
        let inverted = self.sigma[j] < self.sigma[j - 1];
        self.last_step.reset(self.clock + 1, Some((j, j - 1)));
        if inverted {
            self.apply_sorter_swap(j);
            self.last_step.sort_swap_applied = true;
            self.last_step.sort_delta_i = -1;
        }
        self.finish_step();
        inverted
    }

    /// Swap the adjacent pair `(j-1, j)` of the maintained list. The pair must
    /// be inverted; calling this on a non-inverted pair is a sorter bug and
    /// panics. Does not advance the clock.
    pub fn sorter_swap(&mut self, j: usize) {
        assert!(
            j >= 1 && j < self.n,
            "sorter_swap position {j} out of range"
        );
        assert!(
            self.sigma[j] < self.sigma[j - 1],
            "sorter_swap on non-inverted pair at positions ({}, {})",
            j - 1,
            j
        );
        self.apply_sorter_swap(j);
    }

    /// Rearrange the maintained list by swapping two positions. List edits are
    /// free in this model (only comparisons cost steps); the inversion counter
    /// is updated in O(|x - y|).
    pub fn swap_positions(&mut self, x: usize, y: usize) {
        if x == y {
            return;
        }
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        let ru = self.sigma[x];
        let rv = self.sigma[y];
        let mut delta: i64 = 0;
        for m in (x + 1)..y {
            let rm = self.sigma[m];
            delta += (rv > rm) as i64 - (ru > rm) as i64; // pair (x, m)
            delta += (rm > ru) as i64 - (rm > rv) as i64; // pair (m, y)
        }
        delta += if ru > rv { -1 } else { 1 }; // pair (x, y)
        self.maintained.swap(x, y);
        self.sigma.swap(x, y);
        self.sigma_inv[self.sigma[x]] = x;
        self.sigma_inv[self.sigma[y]] = y;
        self.inversions = (self.inversions as i64 + delta) as u64;
    }

    /// Clone this state with a different swap rate. Used by frozen-replay
    /// oracles that need the same configuration with drift disabled.
    pub fn clone_with_alpha(&self, alpha: usize) -> Self {
        let mut clone = self.clone();
        clone.alpha = alpha;
        clone
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            n: self.n,
            alpha: self.alpha,
            seed: self.seed,
            clock: self.clock,
            inversions: self.inversions,
            maintained: self.maintained.clone(),
            true_rank: self.true_rank.clone(),
        }
    }

    pub fn snapshot_json(&self) -> String {
        serde_json::to_string(&self.snapshot()).expect("state snapshot serializes")
    }

    fn check_pos(&self, pos: usize) -> Result<(), StateError> {
        if pos >= self.n {
            Err(StateError::PositionOutOfRange { pos, n: self.n })
        } else {
            Ok(())
        }
    }

    fn apply_sorter_swap(&mut self, j: usize) {
        debug_assert!(self.sigma[j] < self.sigma[j - 1]);
        self.maintained.swap(j - 1, j);
        self.sigma.swap(j - 1, j);
        self.sigma_inv[self.sigma[j - 1]] = j - 1;
        self.sigma_inv[self.sigma[j]] = j;
        self.inversions -= 1;
    }

    /// Apply the `alpha` random adjacent swaps of the current step and advance
    /// the clock. Swaps are drawn with replacement, uniformly over the n-1
    /// consecutive rank pairs.
    fn finish_step(&mut self) {
        for _ in 0..self.alpha {
            let r = self.rng.random_range(0..self.n - 1);
            let delta = self.apply_random_swap(r);
            self.last_step.random_swap_ranks.push(r);
            self.last_step.random_swap_deltas.push(delta);
        }
        self.clock += 1;
    }

    /// Exchange ranks `r` and `r+1` in the hidden order. The pair was
    /// concordant iff the rank-r element sits earlier in the list, in which
    /// case the swap creates an inversion (+1); otherwise it removes one (-1).
    fn apply_random_swap(&mut self, r: usize) -> i64 {
        let x = self.sigma_inv[r];
        let y = self.sigma_inv[r + 1];
        let delta = if x < y { 1 } else { -1 };
        let u = self.maintained[x];
        let v = self.maintained[y];
        self.true_rank[u] = r + 1;
        self.true_rank[v] = r;
        self.sigma[x] = r + 1;
        self.sigma[y] = r;
        self.sigma_inv[r] = y;
        self.sigma_inv[r + 1] = x;
        self.inversions = (self.inversions as i64 + delta) as u64;
        delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_consistent(state: &EvolvingState) {
        let n = state.n();
        let mut seen_rank = vec![false; n];
        for pos in 0..n {
            let item = state.item_at(pos);
            let rank = state.sigma()[pos];
            assert_eq!(state.rank_of_item(item), rank);
            assert_eq!(state.item_with_rank(rank), item);
            assert!(!seen_rank[rank], "sigma is not a bijection");
            seen_rank[rank] = true;
        }
        assert_eq!(state.inversions(), state.brute_force_inversions());
        assert!(state.inversions() <= (n * (n - 1) / 2) as u64);
    }

    #[test]
    fn new_state_identity_has_zero_inversions() {
        let state = EvolvingState::new(4, 1, InitPolicy::Identity, 0).unwrap();
        assert_eq!(state.inversions(), 0);
        assert_consistent(&state);
    }

    #[test]
    fn new_state_reversed_has_max_inversions() {
        let state = EvolvingState::new(4, 1, InitPolicy::Reversed, 0).unwrap();
        assert_eq!(state.inversions(), 6);
        assert_consistent(&state);
    }

    #[test]
    fn new_state_uniform_random_matches_brute_force() {
        let state = EvolvingState::new(6, 1, InitPolicy::UniformRandom, 7).unwrap();
        assert_eq!(state.inversions(), state.brute_force_inversions());
        assert_consistent(&state);
    }

    #[test]
    fn new_state_rejects_tiny_n() {
        assert!(matches!(
            EvolvingState::new(1, 1, InitPolicy::Identity, 0),
            Err(StateError::TooFewItems { n: 1 })
        ));
    }

    #[test]
    fn compare_step_reports_order_then_swaps() {
        let mut state = EvolvingState::new(3, 1, InitPolicy::Identity, 3).unwrap();
        let outcome = state.compare_step(0, 1).unwrap();
        assert!(outcome, "identity order: position 0 precedes position 1");
        assert_eq!(state.inversions(), 1, "one adjacent swap of a sorted order");
        assert_eq!(state.clock(), 1);
        assert_eq!(state.last_step().random_swap_ranks.len(), 1);
        assert_consistent(&state);
    }

    #[test]
    fn compare_step_on_inverted_pair() {
        let mut state = EvolvingState::new(2, 0, InitPolicy::Reversed, 0).unwrap();
        let outcome = state.compare_step(0, 1).unwrap();
        assert!(!outcome, "reversed order: position 1's element comes first");
    }

    #[test]
    fn compare_step_rejects_bad_positions() {
        let mut state = EvolvingState::new(4, 1, InitPolicy::Identity, 0).unwrap();
        assert!(matches!(
            state.compare_step(0, 4),
            Err(StateError::PositionOutOfRange { pos: 4, n: 4 })
        ));
        assert!(matches!(
            state.compare_step(2, 2),
            Err(StateError::SamePosition { pos: 2 })
        ));
        assert_eq!(state.clock(), 0, "failed compare is not a step");
    }

    #[test]
    fn sorter_swap_fixes_exactly_one_inversion() {
        let mut state = EvolvingState::new(2, 1, InitPolicy::Reversed, 0).unwrap();
        assert_eq!(state.inversions(), 1);
        state.sorter_swap(1);
        assert_eq!(state.inversions(), 0);
        assert_eq!(state.clock(), 0, "sorter swap does not advance the clock");
        assert_consistent(&state);
    }

    #[test]
    fn sorter_swap_on_sigma_2_0_1() {
        // sigma = (2, 0, 1): ranks reversed gives (2,1,0); swap items 1,2 ranks.
        let mut state = EvolvingState::new(3, 1, InitPolicy::Reversed, 0).unwrap();
        state.swap_positions(1, 2);
        assert_eq!(state.sigma(), &[2, 0, 1]);
        assert_eq!(state.inversions(), 2);
        state.sorter_swap(1);
        assert_eq!(state.inversions(), 1);
        assert_consistent(&state);
    }

    #[test]
    #[should_panic(expected = "non-inverted pair")]
    fn sorter_swap_non_inverted_is_a_hard_fault() {
        let mut state = EvolvingState::new(2, 1, InitPolicy::Identity, 0).unwrap();
        state.sorter_swap(1);
    }

    #[test]
    fn scripted_compare_steps_match_recount() {
        let mut state = EvolvingState::new(8, 1, InitPolicy::UniformRandom, 3).unwrap();
        for k in 0..20 {
            let a = k % 8;
            let b = (k + 3) % 8;
            state.compare_step(a, b).unwrap();
        }
        assert_eq!(state.clock(), 20);
        assert_eq!(state.inversions(), state.brute_force_inversions());
        assert_consistent(&state);
    }

    #[test]
    fn random_swaps_change_inversions_by_one() {
        let mut state = EvolvingState::new(16, 3, InitPolicy::UniformRandom, 11).unwrap();
        for _ in 0..200 {
            let before = state.inversions() as i64;
            state.sentinel_step();
            let log = state.last_step();
            assert_eq!(log.random_swap_ranks.len(), 3);
            for &d in &log.random_swap_deltas {
                assert!(d == 1 || d == -1);
            }
            assert_eq!(before + log.random_delta_i(), state.inversions() as i64);
        }
        assert_consistent(&state);
    }

    #[test]
    fn swap_positions_keeps_counter_exact() {
        let mut state = EvolvingState::new(10, 1, InitPolicy::UniformRandom, 5).unwrap();
        state.swap_positions(2, 9);
        state.swap_positions(0, 4);
        state.swap_positions(7, 3);
        assert_eq!(state.inversions(), state.brute_force_inversions());
        assert_consistent(&state);
    }

    #[test]
    fn replay_determinism_bit_for_bit() {
        let script = |state: &mut EvolvingState| {
            for k in 0..50 {
                if k % 7 == 0 {
                    state.sentinel_step();
                } else {
                    state.compare_step(k % 9, (k + 4) % 9).unwrap();
                }
            }
        };
        let mut a = EvolvingState::new(9, 2, InitPolicy::UniformRandom, 42).unwrap();
        let mut b = EvolvingState::new(9, 2, InitPolicy::UniformRandom, 42).unwrap();
        script(&mut a);
        script(&mut b);
        assert_eq!(a.snapshot_json(), b.snapshot_json());
    }
}
