//! Fan-out over independent seeded jobs. Each job owns its state exclusively,
//! so the only parallelism the crate uses is running seeds/configs side by
//! side; results are returned in key order either way, making parallel and
//! sequential runs byte-identical.
//!
//! The `parallel` feature (default) backs `map_keyed` with rayon; without it
//! the sequential path is used everywhere.

/// Apply `job` to every key, sequentially. The fallback path, always
/// available (benches compare it against the parallel path).
pub fn map_keyed_sequential<K, T, F>(keys: &[K], job: F) -> Vec<(K, T)>
where
    K: Clone,
    F: Fn(&K) -> T,
{
    keys.iter().map(|k| (k.clone(), job(k))).collect()
}

/// Apply `job` to every key across the rayon pool. Output order matches the
/// input key order regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn map_keyed_parallel<K, T, F>(keys: &[K], job: F) -> Vec<(K, T)>
where
    K: Clone + Send + Sync,
    T: Send,
    F: Fn(&K) -> T + Send + Sync,
{
    use rayon::prelude::*;
    keys.par_iter().map(|k| (k.clone(), job(k))).collect()
}

/// Fan a job out over keys with whatever backend the build selected.
#[cfg(feature = "parallel")]
pub fn map_keyed<K, T, F>(keys: &[K], job: F) -> Vec<(K, T)>
where
    K: Clone + Send + Sync,
    T: Send,
    F: Fn(&K) -> T + Send + Sync,
{
    map_keyed_parallel(keys, job)
}

/// Fan a job out over keys with whatever backend the build selected.
#[cfg(not(feature = "parallel"))]
pub fn map_keyed<K, T, F>(keys: &[K], job: F) -> Vec<(K, T)>
where
    K: Clone + Send + Sync,
    T: Send,
    F: Fn(&K) -> T + Send + Sync,
{
    map_keyed_sequential(keys, job)
}
