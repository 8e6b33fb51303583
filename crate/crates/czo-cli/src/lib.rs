//! Library surface of the batch experiment runner; the binary and the
//! acceptance suite both drive these entry points.

pub mod commands;
pub mod config;
pub mod record;

pub use config::ExperimentConfig;
pub use record::{CheckResult, RunRecord};

/// Install the requested worker-pool settings. Safe to call repeatedly; only
/// the first installation wins, which is fine for a one-shot runner.
pub fn setup_workers(jobs: usize, deterministic: bool) {
    let threads = if deterministic { 1 } else { jobs };
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}
