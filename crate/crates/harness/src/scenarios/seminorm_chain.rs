//! The scalar seminorm battery: fast paths against brute-force oracles,
//! every pointwise inequality of the seminorm toolbox, witness
//! re-evaluation, convention probes, and the negative-control dispatch hook.

use osc_core::rat::{rat_int, GridPoint};
use osc_core::seminorms::{
    evaluate_witness, jump_count, jump_count_bruteforce, maximal_domination_gap,
    overlap_jump_count, overlap_jump_count_bruteforce, oscillation, sup_oscillation,
    sup_oscillation_bruteforce, variation, variation_bruteforce,
};
use osc_core::{IncreasingSequence, ParamFamily};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::ensembles::{ensemble_for_trial, random_increasing_positions, random_reals, trial_rng};
use crate::mutations::{oscillation_dispatch, sequence_accepted};
use crate::report::Battery;
use crate::{map_trials, merge_trials, HarnessError, TrialChecks};

const R_VALUES: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
const LAMBDAS: [f64; 3] = [0.25, 0.5, 1.0];

pub fn run(cfg: &ExperimentConfig) -> Result<Battery, HarnessError> {
    let mut battery = Battery::new();
    let mutation = cfg.mutation;
    let len_max = cfg.scale.family_len_max;
    let slack = cfg.tolerances.inequality_slack;
    let exact = cfg.tolerances.exact;
    let seed = cfg.seed;

    let results = map_trials(cfg.trials, |trial| {
        let mut t = TrialChecks::new();
        let mut rng = trial_rng(seed, trial as u64);
        let ensemble = ensemble_for_trial(trial);
        let len = rng.random_range(4..=len_max);
        let r = R_VALUES[trial % R_VALUES.len()];
        let lambda = LAMBDAS[trial % LAMBDAS.len()];
        let reals = random_reals(&mut rng, len, ensemble);
        let fam = if trial % 5 == 4 {
            // complex-valued families exercise the modulus paths
            let im = random_reals(&mut rng, len, ensemble);
            ParamFamily::from_complex(
                &reals
                    .iter()
                    .zip(&im)
                    .map(|(&a, &b)| num_complex::Complex64::new(a, b))
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        } else {
            ParamFamily::from_reals(&reals).unwrap()
        };

        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);

        // oracle agreement
        let v = variation(&fam, r).unwrap();
        let v_bf = variation_bruteforce(&fam, r).unwrap();
        t.check("variation_oracle_agreement", rel(v.value, v_bf.value), exact);

        let so = sup_oscillation(&fam, r, len - 1).unwrap();
        let so_bf = sup_oscillation_bruteforce(&fam, r, len - 1).unwrap();
        t.check(
            "sup_oscillation_oracle_agreement",
            rel(so.value, so_bf.value),
            exact,
        );

        let nj = jump_count(&fam, lambda).unwrap();
        let nj_bf = jump_count_bruteforce(&fam, lambda).unwrap();
        t.check("jump_oracle_agreement", (nj.value - nj_bf.value).abs(), exact);

        let over = overlap_jump_count(&fam, lambda).unwrap();
        let over_bf = overlap_jump_count_bruteforce(&fam, lambda).unwrap();
        t.check(
            "overlap_oracle_agreement",
            (over.value - over_bf.value).abs(),
            exact,
        );

        // overlapping sandwich N_λ ≤ 𝒩_λ ≤ N_{λ/2}
        let n_half = jump_count(&fam, lambda / 2.0).unwrap();
        t.check(
            "overlap_sandwich",
            (nj.value - over.value).max(over.value - n_half.value),
            slack,
        );

        // witness re-evaluation
        for sv in [&v, &so, &nj, &over] {
            if sv.witness.is_some() {
                let reval = evaluate_witness(&fam, sv).unwrap();
                t.check("witness_reevaluation", rel(reval, sv.value), exact);
            }
        }

        // oscillation along a random sequence: the chain and crude bounds
        let j_blocks = rng.random_range(1..len.min(5));
        let positions = random_increasing_positions(&mut rng, len, j_blocks + 1);
        let entries: Vec<GridPoint> = positions
            .iter()
            .map(|&p| fam.point(p).clone())
            .collect();
        let seq = IncreasingSequence::new(entries).unwrap();
        let osc = oscillation(&fam, &seq, r, None).unwrap();
        let ell = fam.ell_r_norm(r);
        t.check("oscillation_le_variation", osc.value - v.value, slack);
        t.check("variation_le_twice_ell_r", v.value - 2.0 * ell, slack);
        t.check("oscillation_crude_bound", osc.value - 2.0 * ell, slack);
        t.check("sup_oscillation_le_variation", so.value - v.value, slack);

        // sup bound with a random base point
        let t0 = rng.random_range(0..len);
        t.check(
            "sup_bound",
            fam.sup_norm() - (fam.value(t0).norm() + v.value),
            slack,
        );

        // λ-jump / variation bridge
        t.check(
            "jump_variation_bridge",
            lambda * nj.value.powf(1.0 / r) - v.value,
            slack,
        );

        // maximal functions are dominated
        t.check(
            "maximal_domination",
            maximal_domination_gap(&fam, r).unwrap(),
            slack,
        );

        // subadditivity on a second family over the same index set
        let other_reals = random_reals(&mut rng, len, ensemble);
        let g = ParamFamily::from_reals(&other_reals).unwrap();
        if fam.value(0).im == 0.0 {
            let sum = fam.add(&g).unwrap();
            let of = oscillation(&fam, &seq, r, None).unwrap().value;
            let og = oscillation(&g, &seq, r, None).unwrap().value;
            let os = oscillation(&sum, &seq, r, None).unwrap().value;
            t.check("oscillation_subadditive", os - (of + og), slack);
        }

        // disjoint-union split over a random partition of the index set
        let mut part1: Vec<GridPoint> = Vec::new();
        let mut part2: Vec<GridPoint> = Vec::new();
        for p in 0..len {
            if rng.random_bool(0.5) {
                part1.push(fam.point(p).clone());
            } else {
                part2.push(fam.point(p).clone());
            }
        }
        let union: Vec<GridPoint> = part1.iter().chain(&part2).cloned().collect();
        let o_union = oscillation(&fam, &seq, r, Some(&union)).unwrap().value;
        let o1 = oscillation(&fam, &seq, r, Some(&part1)).unwrap().value;
        let o2 = oscillation(&fam, &seq, r, Some(&part2)).unwrap().value;
        t.check("disjoint_union_split", o_union - (o1 + o2), slack);

        // variation monotonicity in r and in the index set
        let v1 = variation(&fam, 1.0).unwrap().value;
        let v2 = variation(&fam, 2.0).unwrap().value;
        let v3 = variation(&fam, 3.0).unwrap().value;
        t.check("variation_monotone_in_r", (v2 - v1).max(v3 - v2), slack);
        let sub_positions: Vec<usize> = (0..len).step_by(2).collect();
        if sub_positions.len() >= 2 {
            let sub = fam.restrict(&sub_positions).unwrap();
            t.check(
                "variation_monotone_in_index_set",
                variation(&sub, r).unwrap().value - v.value,
                slack,
            );
        }

        // dispatch hook: the (possibly mutated) oscillation implementation
        // must match the library on random draws
        let dispatched = oscillation_dispatch(mutation, &fam, &seq, r, None).unwrap();
        t.check("dispatch_matches_library", rel(dispatched, osc.value), exact);

        // empty-block probe: restricting the subdomain to the last point
        // empties every half-open block, so the value must be zero
        let last_only = vec![fam.point(len - 1).clone()];
        let probe_seq = IncreasingSequence::new(vec![
            fam.point(0).clone(),
            fam.point(1).clone(),
            fam.point(len - 1).clone(),
        ])
        .unwrap();
        let probe =
            oscillation_dispatch(mutation, &fam, &probe_seq, r, Some(&last_only)).unwrap();
        t.check("empty_sup_convention", probe.abs(), exact);

        // strictness probe: a non-strict sequence must be rejected
        let flat = vec![
            vec![rat_int(0)],
            vec![rat_int(0)],
            vec![rat_int(1)],
        ];
        t.check_bool(
            "strict_sequence_enforced",
            !sequence_accepted(mutation, &flat),
        );
        let strict = vec![vec![rat_int(0)], vec![rat_int(2)]];
        t.check_bool(
            "strict_sequence_accepts_valid",
            sequence_accepted(mutation, &strict),
        );

        t
    });
    merge_trials(&mut battery, results);

    // one-directional weak-type comparison: report the observed ratio of the
    // 3-variation to the best jump functional with exponent 2 (no assertion;
    // the reverse strong-norm inequality is known to fail in general)
    let mut worst_ratio = 0.0f64;
    for trial in 0..cfg.trials.min(200) {
        let mut rng = trial_rng(cfg.seed ^ 0x77, trial as u64);
        let len = rng.random_range(4..=len_max);
        let reals = random_reals(&mut rng, len, ensemble_for_trial(trial));
        let fam = ParamFamily::from_reals(&reals).unwrap();
        let v3 = variation(&fam, 3.0).unwrap().value;
        let mut jump_best = 0.0f64;
        for lam in [0.125, 0.25, 0.5, 1.0, 2.0] {
            let n = jump_count(&fam, lam).unwrap().value;
            jump_best = jump_best.max(lam * n.sqrt());
        }
        if jump_best > 0.0 {
            worst_ratio = worst_ratio.max(v3 / jump_best);
        }
    }
    battery.metric("variation3_over_jump2_ratio_max", worst_ratio);

    Ok(battery)
}
