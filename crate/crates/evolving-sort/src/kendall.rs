//! Kendall tau distance between two permutations: the number of discordant
//! pairs, counted in O(n log n) by merge counting.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KendallError {
    SizeMismatch { left: usize, right: usize },
    NotAPermutation,
}

impl fmt::Display for KendallError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KendallError::SizeMismatch { left, right } => {
                write!(f, "permutation sizes differ: {left} vs {right}")
            }
            KendallError::NotAPermutation => write!(f, "input is not a permutation of 0..n"),
        }
    }
}

impl std::error::Error for KendallError {}

/// Number of pairs `x != y` with `p1(x) < p1(y)` and `p2(x) > p2(y)`.
/// Symmetric in its arguments; zero iff the permutations agree.
pub fn kendall_tau(p1: &[usize], p2: &[usize]) -> Result<u64, KendallError> {
    if p1.len() != p2.len() {
        return Err(KendallError::SizeMismatch {
            left: p1.len(),
            right: p2.len(),
        });
    }
    check_permutation(p1)?;
    check_permutation(p2)?;
    // Order elements by p1, then count inversions in the induced p2 sequence.
    let mut composed = vec![0usize; p1.len()];
    for (x, &slot) in p1.iter().enumerate() {
        composed[slot] = p2[x];
    }
    Ok(count_inversions(&mut composed))
}

/// Inversion count of a sequence of distinct values, by merge sort. Consumes
/// the buffer's order.
pub fn count_inversions(values: &mut [usize]) -> u64 {
    let mut scratch = vec![0usize; values.len()];
    merge_count(values, &mut scratch)
}

fn merge_count(values: &mut [usize], scratch: &mut [usize]) -> u64 {
    let n = values.len();
    if n <= 1 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = values.split_at_mut(mid);
    let mut count =
        merge_count(left, &mut scratch[..mid]) + merge_count(right, &mut scratch[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            scratch[k] = left[i];
            i += 1;
        } else {
            // right[j] jumps ahead of everything left in `left`.
            count += (left.len() - i) as u64;
            scratch[k] = right[j];
            j += 1;
        }
        k += 1;
    }
    scratch[k..k + left.len() - i].copy_from_slice(&left[i..]);
    let tail = k + left.len() - i;
    scratch[tail..tail + right.len() - j].copy_from_slice(&right[j..]);
    values.copy_from_slice(&scratch[..n]);
    count
}

fn check_permutation(p: &[usize]) -> Result<(), KendallError> {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v >= p.len() || seen[v] {
            return Err(KendallError::NotAPermutation);
        }
        seen[v] = true;
    }
    Ok(())
}
