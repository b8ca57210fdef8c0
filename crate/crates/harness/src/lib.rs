//! Experiment runner and verification harness for the oscillation toolkit:
//! seeded random-instance batteries for every exact identity and pointwise
//! inequality the library promises, empirical constant estimation with
//! per-J curves, machine-readable JSON reports and CSV plot data.
//!
//! Exit-code contract: 0 all assertions pass, 1 any violation, 2 usage or
//! configuration error.

pub mod config;
pub mod ensembles;
pub mod estimate;
pub mod longshort;
pub mod mutations;
pub mod plotdata;
pub mod report;
pub mod scenarios;

use thiserror::Error;

pub use config::{ExperimentConfig, Mutation, Scenario};
pub use report::{Battery, ConstantEstimate, Report};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("core: {0}")]
    Core(#[from] osc_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Builds the global rayon pool honoring `OSC_LAB_THREADS`; safe to call
/// repeatedly. Thread count never changes results: trial outputs are
/// collected in index order and reduced sequentially.
pub fn init_thread_pool() {
    use std::sync::Once;
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        if let Ok(v) = std::env::var("OSC_LAB_THREADS") {
            if let Ok(n) = v.parse::<usize>() {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build_global();
            }
        }
    });
}

/// Maps trial indices to results in parallel, preserving trial order.
pub(crate) fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    init_thread_pool();
    (0..trials).into_par_iter().map(f).collect()
}

/// Per-trial check list, merged into a [`Battery`] in trial order.
#[derive(Debug, Default)]
pub(crate) struct TrialChecks {
    pub checks: Vec<(&'static str, f64, f64)>,
}

impl TrialChecks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, name: &'static str, slack: f64, tolerance: f64) {
        self.checks.push((name, slack, tolerance));
    }

    pub fn check_bool(&mut self, name: &'static str, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.5);
    }
}

pub(crate) fn merge_trials(battery: &mut Battery, results: Vec<TrialChecks>) {
    for trial in results {
        for (name, slack, tol) in trial.checks {
            battery.check(name, slack, tol);
        }
    }
}

/// Runs the configured scenario battery and returns its report.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let battery = match cfg.scenario {
        Scenario::SeminormChain => scenarios::seminorm_chain::run(cfg),
        Scenario::MartingaleOsc => scenarios::martingale::run(cfg),
        Scenario::CarlesonOsc => scenarios::carleson::run(cfg),
        Scenario::DzTheorem => scenarios::dz::run(cfg),
        Scenario::ProjectionOscillation => scenarios::projection::run(cfg),
        Scenario::ComposedTelescoping => scenarios::composed::run(cfg),
        Scenario::LongShortSplit => scenarios::long_short::run(cfg),
    }?;
    Ok(battery.finish(
        cfg.scenario.name(),
        cfg.seed,
        cfg.trials,
        cfg.mutation.name(),
    ))
}
