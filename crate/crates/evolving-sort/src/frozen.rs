//! Frozen-state instrumentation: simulate the rest of the current insertion
//! round with drift disabled, build the Cartesian tree of the simulated final
//! permutation (with -1 and n sentinels), and classify the inversions the
//! round will fail to fix into stuck and blocked, with per-inversion blame on
//! the tree's minima path.

use std::fmt;

use serde::Serialize;

use crate::cartesian::{CartesianTree, NO_NODE};
use crate::evolving::EvolvingState;
use crate::sorters::{Region, SorterMachine, StepOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrozenError {
    /// S and the frozen permutation are defined only inside insertion rounds.
    DuringPrelude,
    /// The snapshot was built at a different clock than the state it is being
    /// used with.
    StaleSnapshot {
        snapshot_clock: u64,
        state_clock: u64,
    },
}

impl fmt::Display for FrozenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrozenError::DuringPrelude => {
                write!(
                    f,
                    "frozen-state analysis is undefined during a quicksort pass"
                )
            }
            FrozenError::StaleSnapshot {
                snapshot_clock,
                state_clock,
            } => write!(
                f,
                "stale snapshot: built at clock {snapshot_clock}, state is at {state_clock}"
            ),
        }
    }
}

impl std::error::Error for FrozenError {}

/// The simulated final state of the current round and everything derived
/// from it. Tree node indices are frozen positions shifted by one: node 0 is
/// the -1 sentinel, node `pos + 1` is frozen position `pos`, node `n + 1` is
/// the value-n sentinel.
#[derive(Clone, Debug)]
pub struct FrozenSnapshot {
    pub clock: u64,
    pub n: usize,
    /// Steps left in the current round if no more random swaps occur.
    pub s_remaining: u64,
    /// Frozen position -> rank.
    pub hat_sigma: Vec<usize>,
    /// Frozen position -> item.
    pub frozen_items: Vec<usize>,
    /// Item -> frozen position.
    pub item_frozen_pos: Vec<usize>,
    pub tree: CartesianTree,
    /// Root-to-rightmost-leaf path (tree indices).
    pub minima_path: Vec<usize>,
    on_minima_path: Vec<bool>,
    /// Tree index -> tree index of the largest element in the left subtree
    /// (identity where there is none).
    pub m_map: Vec<usize>,
    /// Tree index -> paired descendant leaf (NO_NODE where unpaired).
    pub pairing: Vec<usize>,
    /// Real position -> tree index of the minima-path node whose cell
    /// (left subtree plus the node itself) contains it.
    cell_of_pos: Vec<usize>,
}

impl FrozenSnapshot {
    pub fn tree_index(pos: usize) -> usize {
        pos + 1
    }

    /// Frozen position of a tree node, or `None` for the two sentinels.
    pub fn position_of_node(&self, node: usize) -> Option<usize> {
        (node >= 1 && node <= self.n).then(|| node - 1)
    }

    pub fn is_sentinel(&self, node: usize) -> bool {
        node == 0 || node == self.n + 1
    }

    pub fn item_at_node(&self, node: usize) -> Option<usize> {
        self.position_of_node(node)
            .map(|pos| self.frozen_items[pos])
    }

    pub fn is_on_minima_path(&self, node: usize) -> bool {
        self.on_minima_path[node]
    }

    /// Minima-path cell containing a frozen position (tree index of the cell's
    /// path node).
    pub fn cell_of_frozen_pos(&self, pos: usize) -> usize {
        self.cell_of_pos[pos]
    }

    /// Inversions of the frozen permutation. If the stuck/blocked
    /// classification is exact this equals `B_t`.
    pub fn hat_inversions(&self) -> u64 {
        let mut buf = self.hat_sigma.clone();
        crate::kendall::count_inversions(&mut buf)
    }

    /// The quantity bounding B_t: sum over minima-path nodes of
    /// (value(M(k)) - value(k))^2.
    pub fn sigma_bound_sum(&self) -> u64 {
        self.minima_path
            .iter()
            .map(|&k| {
                let gap = (self.tree.value(self.m_map[k]) - self.tree.value(k)) as u64;
                gap * gap
            })
            .sum()
    }

    /// Structured dump for golden files and violation reports. `NO_NODE`
    /// entries are rendered as -1.
    pub fn dump(&self, counters: Option<(&[u64], &[u64])>) -> SnapshotDump {
        let enc = |v: &[usize]| -> Vec<i64> {
            v.iter()
                .map(|&x| if x == NO_NODE { -1 } else { x as i64 })
                .collect()
        };
        SnapshotDump {
            clock: self.clock,
            n: self.n,
            s_remaining: self.s_remaining,
            hat_sigma: self.hat_sigma.clone(),
            frozen_items: self.frozen_items.clone(),
            tree_parent: enc(self.tree.parent_array()),
            minima_path: self.minima_path.clone(),
            m_map: self.m_map.clone(),
            pairing: enc(&self.pairing),
            inc: counters.map(|(inc, _)| inc.to_vec()),
            dec: counters.map(|(_, dec)| dec.to_vec()),
        }
    }

    pub fn dump_json(&self, counters: Option<(&[u64], &[u64])>) -> String {
        serde_json::to_string(&self.dump(counters)).expect("snapshot dump serializes")
    }
}

/// Serializable form of a snapshot (tree as a parent-index array).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SnapshotDump {
    pub clock: u64,
    pub n: usize,
    pub s_remaining: u64,
    pub hat_sigma: Vec<usize>,
    pub frozen_items: Vec<usize>,
    pub tree_parent: Vec<i64>,
    pub minima_path: Vec<usize>,
    pub m_map: Vec<usize>,
    pub pairing: Vec<i64>,
    pub inc: Option<Vec<u64>>,
    pub dec: Option<Vec<u64>>,
}

/// Simulate the rest of the current round with the order frozen. Returns the
/// snapshot; the live state is untouched.
pub fn freeze(
    state: &EvolvingState,
    machine: &SorterMachine,
) -> Result<FrozenSnapshot, FrozenError> {
    let (i0, j0) = machine
        .insertion_indices()
        .ok_or(FrozenError::DuringPrelude)?;
    let n = state.n();
    let mut sigma: Vec<usize> = state.sigma().to_vec();
    let mut items: Vec<usize> = (0..n).map(|pos| state.item_at(pos)).collect();
    let steps = simulate_frozen_round(&mut sigma, &mut items, i0, j0);
    let mut item_frozen_pos = vec![0usize; n];
    for (pos, &item) in items.iter().enumerate() {
        item_frozen_pos[item] = pos;
    }
    // Sentinel-extended value sequence.
    let mut values: Vec<i64> = Vec::with_capacity(n + 2);
    values.push(-1);
    values.extend(sigma.iter().map(|&r| r as i64));
    values.push(n as i64);
    let tree = CartesianTree::build(&values).expect("ranks plus sentinels are distinct");
    let minima_path = tree.minima_path();
    let mut on_minima_path = vec![false; n + 2];
    for &node in &minima_path {
        on_minima_path[node] = true;
    }
    let m_map = tree.left_subtree_max_map();
    let pairing = tree.leaf_pairing();
    // Cells: positions in (previous path node, this path node] belong to this
    // path node. The root sentinel sits before position 0.
    let mut cell_of_pos = vec![NO_NODE; n];
    let mut prev_end: isize = -1;
    for &node in minima_path.iter().skip(1) {
        let pos = node as isize - 1; // frozen position of the path node
        for p in (prev_end + 1)..=pos.min(n as isize - 1) {
            cell_of_pos[p as usize] = node;
        }
        prev_end = pos;
    }
    Ok(FrozenSnapshot {
        clock: state.clock(),
        n,
        s_remaining: steps,
        hat_sigma: sigma,
        frozen_items: items,
        item_frozen_pos,
        tree,
        minima_path,
        on_minima_path,
        m_map,
        pairing,
        cell_of_pos,
    })
}

/// Remaining guard evaluations of an insertion round over a frozen order,
/// applied in place. Standalone so it shares no code with the step machine it
/// is checked against.
fn simulate_frozen_round(sigma: &mut [usize], items: &mut [usize], i0: usize, j0: usize) -> u64 {
    let n = sigma.len();
    let (mut i, mut j) = (i0, j0);
    let mut steps = 0u64;
    loop {
        steps += 1;
        if j > 0 && sigma[j] < sigma[j - 1] {
            sigma.swap(j - 1, j);
            items.swap(j - 1, j);
            j -= 1;
        } else {
            if i == n - 1 {
                break;
            }
            i += 1;
            j = i;
        }
    }
    steps
}

/// Independent oracle for `S_t`: clone the state with drift disabled and
/// drive a clone of the machine itself until the round completes.
pub fn s_replay_oracle(state: &EvolvingState, machine: &SorterMachine) -> Result<u64, FrozenError> {
    if !machine.is_insertion_phase() {
        return Err(FrozenError::DuringPrelude);
    }
    let mut state = state.clone_with_alpha(0);
    let mut machine = machine.clone();
    let mut steps = 0u64;
    loop {
        let outcome = machine.advance(&mut state);
        steps += 1;
        if matches!(outcome, StepOutcome::RoundCompleted(_)) {
            return Ok(steps);
        }
    }
}

/// Who a bad inversion blames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Blame {
    /// Blamed element.
    pub item: usize,
    /// Its node in the frozen tree.
    pub node: usize,
}

/// Classification of the inversions the current round will not fix.
/// Pairs are current-list position pairs `(a, b)` with `a < b`.
#[derive(Clone, Debug, Default)]
pub struct BadInversionReport {
    pub stuck: Vec<(usize, usize)>,
    pub blocked: Vec<(usize, usize)>,
    pub blame: Vec<((usize, usize), Blame)>,
}

impl BadInversionReport {
    /// B_t: stuck plus blocked.
    pub fn total(&self) -> u64 {
        (self.stuck.len() + self.blocked.len()) as u64
    }
}

/// Count stuck + blocked inversions (B_t) without building a report.
/// O(n^2); needs no snapshot.
pub fn bad_inversion_count(
    state: &EvolvingState,
    machine: &SorterMachine,
) -> Result<u64, FrozenError> {
    if !machine.is_insertion_phase() {
        return Err(FrozenError::DuringPrelude);
    }
    let n = state.n();
    let sigma = state.sigma();
    let mut count = 0u64;
    for b in 0..n {
        let region_b = machine.region_of(b).expect("insertion phase");
        if region_b == Region::SemiSorted {
            // Every inversion ending at a semi-sorted b is stuck.
            for a in 0..b {
                if sigma[a] > sigma[b] {
                    count += 1;
                }
            }
        } else {
            // Walk a downward keeping the minimum semi-sorted rank in (a, b).
            let mut min_semi = usize::MAX;
            for a in (0..b).rev() {
                if sigma[a] > sigma[b] && min_semi < sigma[b] {
                    count += 1;
                }
                if machine.region_of(a) == Some(Region::SemiSorted) {
                    min_semi = min_semi.min(sigma[a]);
                }
            }
        }
    }
    Ok(count)
}

/// Full classification with blame. The snapshot must be current.
pub fn classify_bad_inversions(
    state: &EvolvingState,
    machine: &SorterMachine,
    snap: &FrozenSnapshot,
) -> Result<BadInversionReport, FrozenError> {
    if !machine.is_insertion_phase() {
        return Err(FrozenError::DuringPrelude);
    }
    if snap.clock != state.clock() {
        return Err(FrozenError::StaleSnapshot {
            snapshot_clock: snap.clock,
            state_clock: state.clock(),
        });
    }
    let n = state.n();
    let sigma = state.sigma();
    let mut report = BadInversionReport::default();
    for b in 0..n {
        let region_b = machine.region_of(b).expect("insertion phase");
        // Minimum-rank semi-sorted element strictly between a and b in the
        // current list, updated as a walks down. Blame candidates are the
        // blocking elements, which are semi-sorted by definition; the active
        // element is still in flight and never blamed.
        let mut min_semi: Option<usize> = None; // its position
        for a in (0..b).rev() {
            let inverted = sigma[a] > sigma[b];
            if inverted {
                if region_b == Region::SemiSorted {
                    report.stuck.push((a, b));
                    let blame = blame_stuck(state, snap, a, b, min_semi);
                    report.blame.push(((a, b), blame));
                } else if min_semi.is_some_and(|c| sigma[c] < sigma[b]) {
                    report.blocked.push((a, b));
                    let c = min_semi.expect("a blocker exists between");
                    let blame = blame_at_position(state, snap, c);
                    report.blame.push(((a, b), blame));
                }
            }
            // Position a now enters the "between" range for smaller a.
            if machine.region_of(a) == Some(Region::SemiSorted)
                && min_semi.is_none_or(|m| sigma[a] < sigma[m])
            {
                min_semi = Some(a);
            }
        }
    }
    Ok(report)
}

fn blame_at_position(state: &EvolvingState, snap: &FrozenSnapshot, pos: usize) -> Blame {
    let item = state.item_at(pos);
    Blame {
        item,
        node: FrozenSnapshot::tree_index(snap.item_frozen_pos[item]),
    }
}

/// Stuck blame: the minima-path node whose cell contains both elements'
/// frozen positions, or the minimum-rank semi-sorted element between them in
/// the current list when they fall in different cells.
fn blame_stuck(
    state: &EvolvingState,
    snap: &FrozenSnapshot,
    a: usize,
    b: usize,
    min_semi: Option<usize>,
) -> Blame {
    let item_a = state.item_at(a);
    let item_b = state.item_at(b);
    let cell_a = snap.cell_of_frozen_pos(snap.item_frozen_pos[item_a]);
    let cell_b = snap.cell_of_frozen_pos(snap.item_frozen_pos[item_b]);
    if cell_a == cell_b {
        let node = cell_a;
        Blame {
            item: snap
                .item_at_node(node)
                .expect("cells end at real positions"),
            node,
        }
    } else {
        let c = min_semi.expect("different cells imply a semi-sorted element in between");
        blame_at_position(state, snap, c)
    }
}

/// Structural claims about blame: every blamed element lies on the minima
/// path and the pair's left element lies in the blamed node's left subtree.
/// Returns human-readable descriptions of any failures.
pub fn verify_blame_structure(
    state: &EvolvingState,
    snap: &FrozenSnapshot,
    report: &BadInversionReport,
) -> Vec<String> {
    let mut problems = Vec::new();
    for &((a, b), blame) in &report.blame {
        if !snap.is_on_minima_path(blame.node) {
            problems.push(format!(
                "pair ({a},{b}) blames item {} at node {} which is off the minima path",
                blame.item, blame.node
            ));
            continue;
        }
        let item_a = state.item_at(a);
        let pos_a = snap.item_frozen_pos[item_a];
        let node_a = FrozenSnapshot::tree_index(pos_a);
        if snap.cell_of_frozen_pos(pos_a) != blame.node || node_a == blame.node {
            problems.push(format!(
                "pair ({a},{b}): left element (item {item_a}, node {node_a}) is not in the \
                 left subtree of blamed node {}",
                blame.node
            ));
        }
    }
    problems
}

/// Oracle for the classification: an inversion is unfixed iff the item pair
/// is still inverted in the frozen final permutation. Returns mismatch
/// descriptions (empty when the classification is exact).
pub fn verify_classification_against_replay(
    state: &EvolvingState,
    snap: &FrozenSnapshot,
    report: &BadInversionReport,
) -> Vec<String> {
    let n = state.n();
    let sigma = state.sigma();
    let mut expected = std::collections::BTreeSet::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if sigma[a] > sigma[b] {
                let (u, v) = (state.item_at(a), state.item_at(b));
                // Under freeze no inversion is ever created, so "unfixed"
                // means the pair is still position-inverted at round end.
                if snap.item_frozen_pos[u] < snap.item_frozen_pos[v] {
                    expected.insert((a, b));
                }
            }
        }
    }
    let mut classified = std::collections::BTreeSet::new();
    classified.extend(report.stuck.iter().copied());
    classified.extend(report.blocked.iter().copied());
    let mut problems = Vec::new();
    for pair in expected.difference(&classified) {
        problems.push(format!("pair {pair:?} is unfixed but classified good"));
    }
    for pair in classified.difference(&expected) {
        problems.push(format!(
            "pair {pair:?} is classified bad but the round fixes it"
        ));
    }
    problems
}

/// Lemma-6 style lower bound on the remaining steps:
/// `S_t >= I_{t_s} - 2 (t - t_s) - B_t`.
pub fn check_lemma6(
    state: &EvolvingState,
    machine: &SorterMachine,
    snap: &FrozenSnapshot,
    round_start: (u64, u64),
) -> Result<bool, FrozenError> {
    if snap.clock != state.clock() {
        return Err(FrozenError::StaleSnapshot {
            snapshot_clock: snap.clock,
            state_clock: state.clock(),
        });
    }
    let (t_start, inversions_start) = round_start;
    let b = bad_inversion_count(state, machine)?;
    let elapsed = (state.clock() - t_start) as i128;
    let lhs = snap.s_remaining as i128;
    let rhs = inversions_start as i128 - 2 * elapsed - b as i128;
    Ok(lhs >= rhs)
}
