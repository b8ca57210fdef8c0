//! Dyadic martingale battery: the projection hypotheses at depth `K`, the
//! empirical maximal-function constant, and the uniform-in-J ratio table.

use osc_core::projections::{all_fields, maximal_function, norm_p, MartingaleFamily};

use crate::config::ExperimentConfig;
use crate::ensembles::{ensemble_for_trial, random_signal, trial_rng};
use crate::estimate::{martingale_ratio, stabilized_index_count};
use crate::report::Battery;
use crate::scenarios::projection::{family_trial_checks, FamilyCheckNames};
use crate::{map_trials, merge_trials, HarnessError, TrialChecks};

pub fn run(cfg: &ExperimentConfig) -> Result<Battery, HarnessError> {
    let mut battery = Battery::new();
    let exact = cfg.tolerances.exact;
    let slack = cfg.tolerances.inequality_slack;
    let k_depth = cfg.scale.k_depth;
    let seed = cfg.seed;

    const NAMES: FamilyCheckNames = FamilyCheckNames {
        lattice_identity: "lattice_identity",
        block_identity: "block_identity",
        bessel: "bessel_bound",
        chain: "oscillation_chain",
        square_function: "square_function_consistency",
        maximal_domination: "maximal_domination",
        orthogonal: true,
    };

    let results = map_trials(cfg.trials, |trial| {
        let mut t = TrialChecks::new();
        let mut rng = trial_rng(seed, trial as u64);
        let fam = MartingaleFamily::new(k_depth);
        let f = random_signal(&mut rng, fam.space_size(), ensemble_for_trial(trial));
        family_trial_checks(&mut t, &fam, &f, &mut rng, exact, slack, &NAMES);
        t
    });
    merge_trials(&mut battery, results);

    // empirical maximal-function constant (the classical L² bound is 2)
    let mut doob_worst = 0.0f64;
    let doob_trials = cfg.trials.min(200);
    for trial in 0..doob_trials {
        let mut rng = trial_rng(seed ^ 0xd0, trial as u64);
        let fam = MartingaleFamily::new(k_depth);
        let f = random_signal(&mut rng, fam.space_size(), ensemble_for_trial(trial));
        let denom = norm_p(&f, 2.0);
        if denom == 0.0 {
            continue;
        }
        let m = maximal_function(&fam, &f);
        let num = (m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64).sqrt();
        doob_worst = doob_worst.max(num / denom);
    }
    battery.metric("maximal_ratio_l2", doob_worst);
    battery.check(
        "maximal_ratio_within_threshold",
        doob_worst,
        cfg.tolerances.doob_max,
    );

    // uniform-in-J growth: ratio(J_max)/ratio(J_min) over random draws
    let j_values = &cfg.scale.j_values;
    let index_count = stabilized_index_count(cfg);
    let ratio_trials = cfg.trials.min(200);
    let mut per_j: Vec<(usize, f64)> = Vec::new();
    for &j in j_values {
        if j + 1 > index_count {
            continue;
        }
        let sups = map_trials(ratio_trials, |trial| {
            let mut rng = trial_rng(seed ^ 0x91 ^ (j as u64) << 32, trial as u64);
            let fam = MartingaleFamily::stabilized(k_depth, index_count - 1);
            let f = random_signal(&mut rng, fam.space_size(), ensemble_for_trial(trial));
            let fields = all_fields(&fam, &f);
            martingale_ratio(&fields, &f, &mut rng, index_count, j, 2.0)
        });
        let sup = sups.into_iter().fold(0.0f64, f64::max);
        per_j.push((j, sup));
    }
    if per_j.len() >= 2 {
        let first = per_j.first().unwrap().1;
        let last = per_j.last().unwrap().1;
        if first > 0.0 {
            battery.metric("ratio_growth", last / first);
            battery.check("uniform_ratio_growth", last / first, cfg.tolerances.growth_max);
        }
    }
    battery.curve(
        "martingale_osc_ratio_vs_j",
        per_j.iter().map(|&(j, v)| (j as f64, v)).collect(),
    );

    Ok(battery)
}
