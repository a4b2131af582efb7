//! Monte Carlo engine: stable-walk paths, binned local times, and ensemble
//! estimates of their distributions and moments.
//!
//! Path `i` of an ensemble draws from its own ChaCha8 stream (`seed`, `i`).
//! Paths are processed in fixed blocks whose accumulators are merged in
//! block order, so every estimate is a pure function of the configuration,
//! whatever the number of worker threads (`LEVY_LT_THREADS` caps it).
//!
//! `L̂(x)` counts the left endpoints of the `N` time steps that fall in
//! `[x - h/2, x + h/2)`, times `Δt/h`. Its values are multiples of the
//! quantum `Δt/h`, and a path contributes to the `δ(L)` atom iff no step
//! lands in the bin.

mod estimators;
mod path;
mod sampler;
mod stats;

pub use estimators::{
    discrete_mean_free, estimate_means, estimate_moments, estimate_onepoint_distribution,
    lattice_edges, terminal_positions, McConfig, OnePointHistogram,
};
pub use path::{
    brownian_bridge_path, local_time_profile, simulate_indexed_bridge, simulate_indexed_path,
    simulate_path, LocalTimeProfile, PathSample,
};
pub use sampler::{path_rng, sample_increment, IncrementSampler};
pub use stats::{ks_critical_99, ks_distance, MCEstimate, Welford};

use crate::error::{Error, Result};

/// Environment variable capping the number of Monte Carlo worker threads.
pub const THREADS_ENV: &str = "LEVY_LT_THREADS";

/// Worker pool honouring [`THREADS_ENV`] (all cores when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}
