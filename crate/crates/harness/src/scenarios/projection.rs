//! Projection-family hypothesis battery, shared by the martingale and
//! Carleson scenarios and run across every built-in family here: the
//! composition law `P_s P_t = P_{s∧t}`, the block identity
//! `(P_t − P_{I_j})f = P_t Δ_j f`, orthogonal-increment Bessel bounds, the
//! pointwise oscillation chain, and maximal-function domination.

use num_complex::Complex64;
use osc_core::projections::{
    all_fields, block_projection_identity_residual, block_square_function,
    family_oscillation_field, lattice_identity_residual, maximal_function, norm_p,
    projection_chain_middle, CutoffFamily, MartingaleFamily, OperatorFamily, OrthonormalSystem,
    PartialSumFamily,
};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::ensembles::{
    ensemble_for_trial, random_increasing_positions, random_signal, trial_rng,
};
use crate::report::Battery;
use crate::{map_trials, merge_trials, HarnessError, TrialChecks};

/// Per-trial hypothesis checks for one operator family. `orthogonal` marks
/// families with mutually orthogonal increments (Bessel applies).
pub(crate) fn family_trial_checks(
    t: &mut TrialChecks,
    family: &dyn OperatorFamily,
    f: &[Complex64],
    rng: &mut rand_chacha::ChaCha8Rng,
    exact: f64,
    slack: f64,
    names: &FamilyCheckNames,
) {
    let count = family.index_count();
    let size = family.space_size();

    // composition law on a random pair
    let s = rng.random_range(0..count);
    let t_idx = rng.random_range(0..count);
    t.check(
        names.lattice_identity,
        lattice_identity_residual(family, s, t_idx, f).unwrap(),
        exact,
    );

    // block identity on a random triple lo < t < hi
    if count >= 3 {
        let lo = rng.random_range(0..count - 2);
        let hi = rng.random_range(lo + 2..count);
        let mid = rng.random_range(lo + 1..hi);
        t.check(
            names.block_identity,
            block_projection_identity_residual(family, f, lo, hi, mid).unwrap(),
            exact,
        );
    }

    // random increasing sequence for the square-function work
    let blocks = rng.random_range(1..count.min(7));
    let seq = random_increasing_positions(rng, count, blocks + 1);

    // Bessel: Σ_j ‖Δ_j f‖_2² ≤ ‖f‖_2²
    let norm2_sq = norm_p(f, 2.0).powi(2);
    if names.orthogonal && norm2_sq > 0.0 {
        let mut total = 0.0;
        let mut prev = family.apply(seq[0], f);
        for &pos in &seq[1..] {
            let next = family.apply(pos, f);
            let diff: Vec<Complex64> = next.iter().zip(&prev).map(|(a, b)| a - b).collect();
            total += norm_p(&diff, 2.0).powi(2);
            prev = next;
        }
        t.check(
            names.bessel,
            (total - norm2_sq) / norm2_sq,
            exact,
        );
    }

    // pointwise oscillation chain: O ≤ (Σ_j sup_t |P_t Δ_j f|^2)^{1/2}
    let fields = all_fields(family, f);
    let osc = family_oscillation_field(&fields, &seq, 2.0).unwrap();
    let middle = projection_chain_middle(family, f, &seq, 2.0).unwrap();
    let worst_gap = osc
        .iter()
        .zip(&middle)
        .map(|(o, m)| o - m)
        .fold(f64::NEG_INFINITY, f64::max);
    t.check(names.chain, worst_gap, slack);

    // block square function stays consistent with its defining sum
    let sq = block_square_function(family, f, &seq, 2.0).unwrap();
    let mut resq = vec![0.0f64; size];
    for w in seq.windows(2) {
        for x in 0..size {
            resq[x] += (fields[w[1]][x] - fields[w[0]][x]).norm_sqr();
        }
    }
    let sq_dev = sq
        .iter()
        .zip(&resq)
        .map(|(a, b)| (a - b.sqrt()).abs())
        .fold(0.0, f64::max);
    t.check(names.square_function, sq_dev, 1e-10);

    // oscillation dominates the maximal function pointwise:
    // sup_{t < max} |P_t f| ≤ |P_min f| + sup-block deviation
    let maxf = maximal_sans_last(family, f);
    let single_block = family_oscillation_field(&fields, &[0, count - 1], 2.0).unwrap();
    let base = &fields[0];
    let dom_gap = (0..size)
        .map(|x| maxf[x] - (base[x].norm() + single_block[x]))
        .fold(f64::NEG_INFINITY, f64::max);
    t.check(names.maximal_domination, dom_gap, slack);
}

/// `sup_{t ∈ 𝕀 \ {max}} |P_t f|` pointwise.
fn maximal_sans_last(family: &dyn OperatorFamily, f: &[Complex64]) -> Vec<f64> {
    let mut sup = vec![0.0f64; family.space_size()];
    for pos in 0..family.index_count() - 1 {
        let g = family.apply(pos, f);
        for (s, v) in sup.iter_mut().zip(&g) {
            *s = s.max(v.norm());
        }
    }
    sup
}

pub(crate) struct FamilyCheckNames {
    pub lattice_identity: &'static str,
    pub block_identity: &'static str,
    pub bessel: &'static str,
    pub chain: &'static str,
    pub square_function: &'static str,
    pub maximal_domination: &'static str,
    pub orthogonal: bool,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Battery, HarnessError> {
    let mut battery = Battery::new();
    let exact = cfg.tolerances.exact;
    let slack = cfg.tolerances.inequality_slack;
    let k_depth = cfg.scale.k_depth.min(8);
    let n = cfg.scale.cyclic_n.min(128);
    let seed = cfg.seed;

    const MART: FamilyCheckNames = FamilyCheckNames {
        lattice_identity: "martingale_lattice_identity",
        block_identity: "martingale_block_identity",
        bessel: "martingale_bessel",
        chain: "martingale_chain",
        square_function: "martingale_square_function",
        maximal_domination: "martingale_maximal_domination",
        orthogonal: true,
    };
    const CUT: FamilyCheckNames = FamilyCheckNames {
        lattice_identity: "cutoff_lattice_identity",
        block_identity: "cutoff_block_identity",
        bessel: "cutoff_bessel",
        chain: "cutoff_chain",
        square_function: "cutoff_square_function",
        maximal_domination: "cutoff_maximal_domination",
        orthogonal: true,
    };
    const FOUR: FamilyCheckNames = FamilyCheckNames {
        lattice_identity: "fourier_partial_sum_lattice_identity",
        block_identity: "fourier_partial_sum_block_identity",
        bessel: "fourier_partial_sum_bessel",
        chain: "fourier_partial_sum_chain",
        square_function: "fourier_partial_sum_square_function",
        maximal_domination: "fourier_partial_sum_maximal_domination",
        orthogonal: true,
    };
    const HAAR: FamilyCheckNames = FamilyCheckNames {
        lattice_identity: "haar_partial_sum_lattice_identity",
        block_identity: "haar_partial_sum_block_identity",
        bessel: "haar_partial_sum_bessel",
        chain: "haar_partial_sum_chain",
        square_function: "haar_partial_sum_square_function",
        maximal_domination: "haar_partial_sum_maximal_domination",
        orthogonal: true,
    };

    let results = map_trials(cfg.trials, |trial| {
        let mut t = TrialChecks::new();
        let mut rng = trial_rng(seed, trial as u64);
        let ensemble = ensemble_for_trial(trial);

        let mart = MartingaleFamily::new(k_depth);
        let f = random_signal(&mut rng, mart.space_size(), ensemble);
        family_trial_checks(&mut t, &mart, &f, &mut rng, exact, slack, &MART);

        let cut = CutoffFamily::new(n);
        let g = random_signal(&mut rng, n, ensemble);
        family_trial_checks(&mut t, &cut, &g, &mut rng, exact, slack, &CUT);

        let fourier = PartialSumFamily::new(OrthonormalSystem::fourier(32));
        let h = random_signal(&mut rng, 32, ensemble);
        family_trial_checks(&mut t, &fourier, &h, &mut rng, exact, slack, &FOUR);

        let haar = PartialSumFamily::new(OrthonormalSystem::haar(5));
        let w = random_signal(&mut rng, 32, ensemble);
        family_trial_checks(&mut t, &haar, &w, &mut rng, exact, slack, &HAAR);

        // precondition probe: the block identity needs lo < t < hi
        t.check_bool(
            "block_identity_rejects_boundary",
            block_projection_identity_residual(&mart, &f, 1, 3, 1).is_err(),
        );

        t
    });
    merge_trials(&mut battery, results);

    // orthonormality of the built-in systems
    battery.check(
        "fourier_system_gram",
        OrthonormalSystem::fourier(32).gram_residual(),
        exact,
    );
    battery.check(
        "haar_system_gram",
        OrthonormalSystem::haar(5).gram_residual(),
        exact,
    );

    // vector-valued surrogate constant: batched maximal functions
    let mut worst = 0.0f64;
    for trial in 0..cfg.trials.min(50) {
        let mut rng = trial_rng(cfg.seed ^ 0x51, trial as u64);
        let mart = MartingaleFamily::new(k_depth);
        let size = mart.space_size();
        let batch: Vec<Vec<Complex64>> = (0..4)
            .map(|_| random_signal(&mut rng, size, ensemble_for_trial(trial)))
            .collect();
        let mut num = vec![0.0f64; size];
        let mut den = vec![0.0f64; size];
        for g in &batch {
            let m = maximal_function(&mart, g);
            for x in 0..size {
                num[x] += m[x] * m[x];
                den[x] += g[x].norm_sqr();
            }
        }
        let num_norm = (num.iter().sum::<f64>() / size as f64).sqrt();
        let den_norm = (den.iter().sum::<f64>() / size as f64).sqrt();
        if den_norm > 0.0 {
            worst = worst.max(num_norm / den_norm);
        }
    }
    battery.metric("vector_valued_maximal_ratio_l2", worst);

    Ok(battery)
}
