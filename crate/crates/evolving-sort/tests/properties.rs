//! Property tests over the core bookkeeping: the incremental counter always
//! matches the quadratic oracle, the Kendall distance agrees with pair
//! enumeration, and the Cartesian tree obeys its defining order properties.

use proptest::prelude::*;

use evolving_sort::cartesian::CartesianTree;
use evolving_sort::{kendall_tau, EvolvingState, InitPolicy};

/// A permutation of 0..n derived from arbitrary swap indices.
fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..n, n).prop_map(move |swaps| {
        let mut perm: Vec<usize> = (0..n).collect();
        for (i, &j) in swaps.iter().enumerate() {
            perm.swap(i, j);
        }
        perm
    })
}

#[derive(Clone, Debug)]
enum Op {
    Compare(usize, usize),
    Sentinel,
    Guard(usize),
    FixSomewhere(usize),
    Rearrange(usize, usize),
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0usize..64, 0usize..64).prop_map(|(a, b)| Op::Compare(a, b)),
        Just(Op::Sentinel),
        (0usize..64).prop_map(Op::Guard),
        (0usize..64).prop_map(Op::FixSomewhere),
        (0usize..64, 0usize..64).prop_map(|(x, y)| Op::Rearrange(x, y)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_counter_matches_brute_force(
        n in 2usize..40,
        alpha in 0usize..3,
        seed in any::<u64>(),
        ops in proptest::collection::vec(op_strategy(), 1..120),
    ) {
        let mut state = EvolvingState::new(n, alpha, InitPolicy::UniformRandom, seed).unwrap();
        for op in ops {
            match op {
                Op::Compare(a, b) => {
                    let (a, b) = (a % n, b % n);
                    if a != b {
                        state.compare_step(a, b).unwrap();
                    }
                }
                Op::Sentinel => state.sentinel_step(),
                Op::Guard(j) => {
                    state.insertion_guard_step(1 + j % (n - 1));
                }
                Op::FixSomewhere(offset) => {
                    if let Some(j) = (1..n)
                        .map(|k| 1 + (k - 1 + offset) % (n - 1))
                        .find(|&j| state.sigma()[j] < state.sigma()[j - 1])
                    {
                        state.sorter_swap(j);
                    }
                }
                Op::Rearrange(x, y) => state.swap_positions(x % n, y % n),
            }
            prop_assert_eq!(state.inversions(), state.brute_force_inversions());
        }
        // The permutation stays a bijection.
        let mut seen = vec![false; n];
        for pos in 0..n {
            let rank = state.sigma()[pos];
            prop_assert!(!seen[rank]);
            seen[rank] = true;
        }
    }

    #[test]
    fn kendall_tau_matches_pair_enumeration(
        (p1, p2) in (2usize..24).prop_flat_map(|n| (permutation(n), permutation(n))),
    ) {
        let fast = kendall_tau(&p1, &p2).unwrap();
        let mut brute = 0u64;
        for x in 0..p1.len() {
            for y in 0..p1.len() {
                if p1[x] < p1[y] && p2[x] > p2[y] {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(fast, brute);
        prop_assert_eq!(fast, kendall_tau(&p2, &p1).unwrap());
        prop_assert_eq!(kendall_tau(&p1, &p1).unwrap(), 0);
    }

    #[test]
    fn cartesian_tree_is_in_order_and_heap_ordered(
        perm in (1usize..32).prop_flat_map(permutation),
    ) {
        let values: Vec<i64> = perm.iter().map(|&v| v as i64).collect();
        let tree = CartesianTree::build(&values).unwrap();
        let expected: Vec<usize> = (0..values.len()).collect();
        prop_assert_eq!(tree.in_order(), expected);
        for node in 0..values.len() {
            if let Some(parent) = tree.parent(node) {
                prop_assert!(tree.value(parent) < tree.value(node));
            }
        }
    }

    #[test]
    fn replay_with_same_seed_is_bit_identical(
        n in 2usize..24,
        alpha in 0usize..3,
        seed in any::<u64>(),
        script in proptest::collection::vec((0usize..24, 0usize..24), 1..40),
    ) {
        let run = || {
            let mut state = EvolvingState::new(n, alpha, InitPolicy::UniformRandom, seed).unwrap();
            for &(a, b) in &script {
                let (a, b) = (a % n, b % n);
                if a != b {
                    state.compare_step(a, b).unwrap();
                } else {
                    state.sentinel_step();
                }
            }
            state.snapshot_json()
        };
        prop_assert_eq!(run(), run());
    }
}
