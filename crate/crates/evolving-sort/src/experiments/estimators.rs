//! Estimators over recorded runs. All of them are pure functions of the
//! recorded rounds/series, so re-running one on a saved log reproduces its
//! output exactly.

use serde::Serialize;

use crate::sorters::{RoundRecord, TimeSeriesRecord};

/// Fraction of a round's random swaps that removed an inversion, per
/// completed round. Needs a dense series (sampled every step); rounds whose
/// endpoints are missing from the series are skipped. With drift disabled
/// there are no random swaps and no fractions.
pub fn good_swap_fraction_per_round(
    rounds: &[RoundRecord],
    series: &[TimeSeriesRecord],
    alpha: usize,
) -> Vec<(u64, f64)> {
    if alpha == 0 {
        return Vec::new();
    }
    let good_at = |t: u64| -> Option<u64> {
        if t == 0 {
            return Some(0);
        }
        series
            .binary_search_by_key(&t, |row| row.t)
            .ok()
            .map(|idx| series[idx].good_swaps)
    };
    rounds
        .iter()
        .filter_map(|record| {
            let start = good_at(record.t_start)?;
            let end = good_at(record.t_end)?;
            let swaps = record.length() * alpha as u64;
            Some((
                record.round_number,
                (end - start) as f64 / swaps.max(1) as f64,
            ))
        })
        .collect()
}

/// Rounds that start with at least `(12 c^2 + 2 c) n` inversions must run for
/// at least `c n` steps. Returns `(rounds checked, violations)`; rounds below
/// the hypothesis threshold are not checked.
pub fn round_length_violations(rounds: &[RoundRecord], c: f64, n: usize) -> (u64, u64) {
    let hypothesis = (12.0 * c * c + 2.0 * c) * n as f64;
    let required = (c * n as f64).ceil() as u64;
    let mut checked = 0;
    let mut violations = 0;
    for record in rounds {
        if (record.inversions_start as f64) < hypothesis {
            continue;
        }
        checked += 1;
        if record.length() < required {
            violations += 1;
        }
    }
    (checked, violations)
}

/// Inversion statistics over post-burn-in samples for one n.
#[derive(Clone, Debug, Serialize)]
pub struct SteadyStats {
    pub n: usize,
    pub samples: u64,
    pub mean: f64,
    pub median: f64,
    pub max: u64,
    /// median / n, the scaling figure compared across the n sweep.
    pub median_over_n: f64,
}

pub fn steady_stats(n: usize, mut samples: Vec<u64>) -> SteadyStats {
    assert!(!samples.is_empty(), "no samples after burn-in");
    samples.sort_unstable();
    let len = samples.len();
    let median = if len % 2 == 1 {
        samples[len / 2] as f64
    } else {
        (samples[len / 2 - 1] + samples[len / 2]) as f64 / 2.0
    };
    let mean = samples.iter().sum::<u64>() as f64 / len as f64;
    SteadyStats {
        n,
        samples: len as u64,
        mean,
        median,
        max: *samples.last().expect("nonempty"),
        median_over_n: median / n as f64,
    }
}

/// Relative change of the scaling figure between consecutive n values:
/// `|m_next - m_prev| / m_prev`. A linear-scaling signature keeps these small.
pub fn scaling_ratio_table(stats: &[SteadyStats]) -> Vec<(usize, usize, f64)> {
    stats
        .windows(2)
        .map(|pair| {
            let prev = pair[0].median_over_n;
            let next = pair[1].median_over_n;
            (pair[0].n, pair[1].n, (next - prev).abs() / prev)
        })
        .collect()
}

/// Hitting time of `I_t <= threshold` for one seeded run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HittingTime {
    pub seed: u64,
    pub n: usize,
    /// First clock value at which the threshold held, if reached in budget.
    pub hit: Option<u64>,
    pub budget: u64,
}

pub fn median_u64(mut values: Vec<u64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let len = values.len();
    Some(if len % 2 == 1 {
        values[len / 2] as f64
    } else {
        (values[len / 2 - 1] + values[len / 2]) as f64 / 2.0
    })
}
