//! Seed derivation: every stochastic choice in a run descends from one run
//! seed, so results are reproducible and independent of execution order.

/// SplitMix64 finalizer; decorrelates structurally close seeds.
#[inline]
pub fn mix(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the job handling one target-series iteration.
#[inline]
pub fn job_seed(run_seed: u64, series_index: usize) -> u64 {
    run_seed ^ series_index as u64
}

/// Seed of one (target, method) cell, derived from its job seed.
#[inline]
pub fn cell_seed(job_seed: u64, method_index: usize) -> u64 {
    mix(job_seed
        .wrapping_add(0x100)
        .wrapping_add(method_index as u64))
}

/// Seed of a named run-level stage (global model fit, Bayesian comparison).
#[inline]
pub fn stage_seed(run_seed: u64, stage: &str) -> u64 {
    let mut acc = run_seed;
    for b in stage.as_bytes() {
        acc = mix(acc ^ u64::from(*b));
    }
    acc
}
