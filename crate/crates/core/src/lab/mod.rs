//! Experiment harness: k-scans over disorder realizations, critical-point detection,
//! the critical-shift scaling fit, and config-driven runs that write artifacts to disk.

pub mod config;
pub mod critical;
pub mod engine;
pub mod experiment;
pub mod fit;
pub mod scan;

pub use config::{ExperimentConfig, KGrid, Pipeline};
pub use critical::{find_critical_point, CriticalMethod, CriticalPoint};
pub use engine::{run_trajectory, EngineKind, PhaseChoice, RecordPlan, TrajectorySetup};
pub use experiment::{run_experiment, RunSummary};
pub use fit::{fit_scaling, rescaled_strength, ScalingFit, ScalingPoint};
pub use scan::{scan_k, ScanConfig, ScanPoint, ScanResult};

/// Environment variable holding the worker-pool width.
pub const THREADS_ENV: &str = "AQSIM_THREADS";

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-realization seeds derived from one master seed.
pub fn realization_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut state = master;
    (0..count).map(|_| splitmix64(&mut state)).collect()
}

/// Sizes the global rayon pool from `AQSIM_THREADS` if set. Safe to call more than once.
pub fn configure_threads() {
    let width = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    if let Some(width) = width.filter(|w| *w > 0) {
        if rayon::ThreadPoolBuilder::new().num_threads(width).build_global().is_err() {
            log::debug!("global thread pool already initialized");
        }
    }
}
