//! r-variation, r-oscillation and λ-jump counting for finite families.
//!
//! Each fast routine (dynamic programming or greedy) is paired with a
//! brute-force oracle that enumerates the defining supremum directly; the
//! oracles are exported so test batteries can cross-check the fast paths on
//! random inputs.
//!
//! Conventions, fixed once for the whole crate:
//! * oscillation blocks are half-open boxes `𝔹[I_j] = Π_i [I_{j,i}, I_{j+1,i})`
//!   and deviations are measured against the left endpoint `a_{I_j}`;
//! * a supremum over an empty set is zero;
//! * exponents satisfy `1 ≤ r < ∞`; jump thresholds satisfy `λ > 0`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::{
    Bound, IncreasingSequence, ParamFamily, SeminormKind, SeminormValue, Witness,
};
use crate::rat::{in_box, GridPoint, Rat};

/// Hard cap for the exponential enumerations; above it oracles refuse.
pub const BRUTE_FORCE_CAP: usize = 20;

fn check_exponent(r: f64) -> Result<()> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::ExponentRange(r));
    }
    Ok(())
}

fn check_threshold(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::ThresholdRange(lambda));
    }
    Ok(())
}

fn check_one_parameter(fam: &ParamFamily) -> Result<()> {
    if fam.dim_k() != 1 {
        return Err(Error::ParameterMismatch {
            expected: 1,
            got: fam.dim_k(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// r-variation
// ---------------------------------------------------------------------------

/// `V^r(a_t : t ∈ 𝕀)`: the supremum over all finite increasing subsequences
/// of the ℓ^r norm of consecutive increments.
///
/// Quadratic dynamic program: `best(j) = max_{i<j} best(i) + |a_j − a_i|^r`
/// with `best(i) ≥ 0`, answer `(max_j best(j))^{1/r}`. The witness chain is
/// recovered through backpointers; ties keep the smallest indices, so witness
/// recovery is deterministic.
pub fn variation(fam: &ParamFamily, r: f64) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_exponent(r)?;
    let vals = fam.values();
    let n = vals.len();
    let mut best = vec![0.0f64; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    for j in 1..n {
        for i in 0..j {
            let cand = best[i] + (vals[j] - vals[i]).norm().powf(r);
            if cand > best[j] {
                best[j] = cand;
                prev[j] = Some(i);
            }
        }
    }
    let mut arg = 0;
    for j in 1..n {
        if best[j] > best[arg] {
            arg = j;
        }
    }
    let value = best[arg].powf(1.0 / r);
    let witness = if best[arg] == 0.0 {
        Witness::Chain(vec![0, 1])
    } else {
        let mut chain = vec![arg];
        let mut cur = arg;
        while let Some(i) = prev[cur] {
            chain.push(i);
            cur = i;
        }
        chain.reverse();
        Witness::Chain(chain)
    };
    Ok(SeminormValue::exact(SeminormKind::Variation, Some(r), value).with_witness(witness))
}

/// Brute-force oracle for [`variation`]: enumerates every increasing
/// subsequence. Refuses families longer than [`BRUTE_FORCE_CAP`].
pub fn variation_bruteforce(fam: &ParamFamily, r: f64) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_exponent(r)?;
    let vals = fam.values();
    let n = vals.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::BruteForceTooLarge(n, BRUTE_FORCE_CAP));
    }
    let mut best = 0.0f64;
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut sum = 0.0;
        let mut last: Option<usize> = None;
        for j in 0..n {
            if mask & (1 << j) != 0 {
                if let Some(i) = last {
                    sum += (vals[j] - vals[i]).norm().powf(r);
                }
                last = Some(j);
            }
        }
        best = best.max(sum);
    }
    Ok(SeminormValue::exact(
        SeminormKind::Variation,
        Some(r),
        best.powf(1.0 / r),
    ))
}

// ---------------------------------------------------------------------------
// r-oscillation along a fixed sequence
// ---------------------------------------------------------------------------

/// `O^r_{I,J}(a_t : t ∈ 𝕁)` along a fixed sequence `I`, with `𝕁 ⊆ 𝕀` an
/// optional subdomain (`None` means all of `𝕀`).
///
/// Every sequence entry must belong to `𝕀` (its value anchors the block);
/// block/subdomain intersections may be empty and then contribute zero.
pub fn oscillation(
    fam: &ParamFamily,
    seq: &IncreasingSequence,
    r: f64,
    subdomain: Option<&[GridPoint]>,
) -> Result<SeminormValue> {
    check_exponent(r)?;
    if seq.dim() != fam.dim_k() {
        return Err(Error::ParameterMismatch {
            expected: fam.dim_k(),
            got: seq.dim(),
        });
    }
    let anchor_positions: Vec<usize> = seq
        .entries()
        .iter()
        .map(|e| fam.position(e).ok_or(Error::EntryOutsideIndexSet))
        .collect::<Result<_>>()?;
    let mask = match subdomain {
        None => None,
        Some(points) => {
            let mut m = vec![false; fam.len()];
            for p in points {
                let pos = p
                    .len()
                    .eq(&fam.dim_k())
                    .then(|| fam.position(p))
                    .flatten()
                    .ok_or(Error::SubdomainOutsideIndexSet)?;
                m[pos] = true;
            }
            Some(m)
        }
    };
    let value = oscillation_sum(fam, seq, &anchor_positions, r, mask.as_deref()).powf(1.0 / r);
    Ok(SeminormValue::exact(
        SeminormKind::Oscillation,
        Some(r),
        value,
    ))
}

/// `Σ_j sup_{t ∈ 𝔹[I_j] ∩ 𝕁} |a_t − a_{I_j}|^r` (the r-th power of the
/// oscillation, before the final root).
fn oscillation_sum(
    fam: &ParamFamily,
    seq: &IncreasingSequence,
    anchor_positions: &[usize],
    r: f64,
    mask: Option<&[bool]>,
) -> f64 {
    let blocks = seq.block_count();
    let mut sups = vec![0.0f64; blocks];
    for (pos, t) in fam.points().iter().enumerate() {
        if let Some(m) = mask {
            if !m[pos] {
                continue;
            }
        }
        for j in 0..blocks {
            let (lo, hi) = seq.block(j);
            if in_box(t, lo, hi) {
                let dev = (fam.value(pos) - fam.value(anchor_positions[j])).norm();
                if dev > sups[j] {
                    sups[j] = dev;
                }
                break; // blocks are pairwise disjoint
            }
        }
    }
    sups.iter().map(|s| s.powf(r)).sum()
}

// ---------------------------------------------------------------------------
// Uniform (sup over J and I) oscillation, one parameter
// ---------------------------------------------------------------------------

/// `max_{J ≤ J_max} max_{I ∈ 𝔖_J(𝕀)} O^r_{I,J}(a_t : t ∈ 𝕀)` for a
/// one-parameter family, computed exactly by dynamic programming over end
/// blocks.
///
/// The unconstrained supremum is attained with `J ≤ #𝕀 − 1`, so passing
/// `J_max ≥ #𝕀 − 1` (the recommended default) yields the full supremum. The
/// result is monotone nondecreasing in `J_max`.
pub fn sup_oscillation(fam: &ParamFamily, r: f64, j_max: usize) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_exponent(r)?;
    if j_max == 0 {
        return Err(Error::SequenceTooShort);
    }
    let vals = fam.values();
    let n = vals.len();
    let layers = j_max.min(n - 1);

    // best[l] after layer j = best sum over sequences ending at position l
    // with at most j blocks; bp[(j,l)] = predecessor position.
    let mut best_prev = vec![0.0f64; n]; // zero blocks
    let mut best = vec![0.0f64; n];
    let mut bp: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; n]; layers + 1];
    for j in 1..=layers {
        for l in 0..n {
            best[l] = best_prev[l];
            bp[j][l] = bp[j - 1][l].map(|(pj, pi)| (pj, pi));
        }
        for i in 0..n {
            // running sup over the block [t_i, t_l) as l grows
            let mut block_sup = 0.0f64;
            for l in (i + 1)..n {
                block_sup = block_sup.max((vals[l - 1] - vals[i]).norm());
                let cand = best_prev[i] + block_sup.powf(r);
                if cand > best[l] {
                    best[l] = cand;
                    bp[j][l] = Some((j - 1, i));
                }
            }
        }
        std::mem::swap(&mut best_prev, &mut best);
    }
    let final_best = best_prev;
    let mut arg = 1;
    for l in 1..n {
        if final_best[l] > final_best[arg] {
            arg = l;
        }
    }
    let value = final_best[arg].powf(1.0 / r);
    let witness = if final_best[arg] == 0.0 {
        Witness::Chain(vec![0, 1])
    } else {
        let mut chain = vec![arg];
        let mut cur = (layers, arg);
        while let Some((pj, pi)) = bp[cur.0][cur.1] {
            chain.push(pi);
            if pj == 0 {
                break;
            }
            cur = (pj, pi);
        }
        chain.reverse();
        Witness::Chain(chain)
    };
    Ok(SeminormValue::exact(SeminormKind::Oscillation, Some(r), value).with_witness(witness))
}

/// Exhaustive oracle for [`sup_oscillation`]: enumerates every increasing
/// sequence with at most `j_max` blocks. Refuses families longer than
/// [`BRUTE_FORCE_CAP`].
pub fn sup_oscillation_bruteforce(fam: &ParamFamily, r: f64, j_max: usize) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_exponent(r)?;
    if j_max == 0 {
        return Err(Error::SequenceTooShort);
    }
    let vals = fam.values();
    let n = vals.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::BruteForceTooLarge(n, BRUTE_FORCE_CAP));
    }
    let mut best = 0.0f64;
    for mask in 1u32..(1u32 << n) {
        let picked = mask.count_ones() as usize;
        if picked < 2 || picked > j_max + 1 {
            continue;
        }
        let positions: Vec<usize> = (0..n).filter(|&p| mask & (1 << p) != 0).collect();
        let mut sum = 0.0;
        for w in positions.windows(2) {
            let mut sup = 0.0f64;
            for t in w[0]..w[1] {
                sup = sup.max((vals[t] - vals[w[0]]).norm());
            }
            sum += sup.powf(r);
        }
        best = best.max(sum);
    }
    Ok(SeminormValue::exact(
        SeminormKind::Oscillation,
        Some(r),
        best.powf(1.0 / r),
    ))
}

// ---------------------------------------------------------------------------
// Uniform oscillation, several parameters
// ---------------------------------------------------------------------------

/// Search limits under which the multi-parameter supremum is enumerated
/// exhaustively rather than stochastically.
const EXHAUSTIVE_AXIS_CAP: usize = 8;
const EXHAUSTIVE_POINT_CAP: usize = 100;
const EXHAUSTIVE_TINY_CAP: usize = 16;

/// `sup_{J ≤ J_max} sup_{I ∈ 𝔖_J(𝕀)} O^r_{I,J}` for a k-parameter family,
/// `k ≥ 2`.
///
/// No polynomial algorithm is known for the supremum over coordinatewise
/// increasing sequences, so the search is exhaustive only at small sizes
/// (at most 8 distinct values per coordinate for k = 2, or at most 16 index
/// points overall); otherwise it restarts a seeded stochastic chain search
/// `trials` times and flags the result as a lower bound.
pub fn sup_oscillation_multiparam(
    fam: &ParamFamily,
    r: f64,
    j_max: usize,
    trials: usize,
    seed: u64,
) -> Result<SeminormValue> {
    if fam.dim_k() < 2 {
        return Err(Error::ParameterMismatch {
            expected: 2,
            got: fam.dim_k(),
        });
    }
    check_exponent(r)?;
    if j_max == 0 {
        return Err(Error::SequenceTooShort);
    }
    let per_axis_ok = (0..fam.dim_k()).all(|a| fam.axis_values(a).len() <= EXHAUSTIVE_AXIS_CAP);
    let exhaustive = (fam.dim_k() == 2 && per_axis_ok && fam.len() <= EXHAUSTIVE_POINT_CAP)
        || fam.len() <= EXHAUSTIVE_TINY_CAP;
    if exhaustive {
        let (value, chain) = exhaustive_chain_search(fam, r, j_max);
        let mut out = SeminormValue::exact(SeminormKind::Oscillation, Some(r), value.powf(1.0 / r));
        if let Some(c) = chain {
            out = out.with_witness(Witness::Chain(c));
        }
        Ok(out)
    } else {
        let (value, chain) = stochastic_chain_search(fam, r, j_max, trials, seed);
        let mut out = SeminormValue::exact(SeminormKind::Oscillation, Some(r), value.powf(1.0 / r));
        out.bound = Bound::LowerBound;
        if let Some(c) = chain {
            out = out.with_witness(Witness::Chain(c));
        }
        Ok(out)
    }
}

/// Sup of `|a_t − a_lo|` over grid points in the half-open box `[lo, hi)`.
fn block_sup(fam: &ParamFamily, lo_pos: usize, hi_pos: usize) -> f64 {
    let lo = fam.point(lo_pos);
    let hi = fam.point(hi_pos);
    let base = fam.value(lo_pos);
    let mut sup = 0.0f64;
    for (pos, t) in fam.points().iter().enumerate() {
        if in_box(t, lo, hi) {
            sup = sup.max((fam.value(pos) - base).norm());
        }
    }
    sup
}

fn exhaustive_chain_search(fam: &ParamFamily, r: f64, j_max: usize) -> (f64, Option<Vec<usize>>) {
    let n = fam.len();
    // Lexicographic point order is compatible with ≺_s, so chain extensions
    // always move forward in position.
    let mut best = 0.0f64;
    let mut best_chain: Option<Vec<usize>> = None;
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        fam: &ParamFamily,
        r: f64,
        j_max: usize,
        stack: &mut Vec<usize>,
        accum: f64,
        best: &mut f64,
        best_chain: &mut Option<Vec<usize>>,
    ) {
        let last = *stack.last().unwrap();
        if stack.len() >= 2 && accum > *best {
            *best = accum;
            *best_chain = Some(stack.clone());
        }
        if stack.len() == j_max + 1 {
            return;
        }
        for cand in (last + 1)..fam.len() {
            if crate::rat::strictly_below(fam.point(last), fam.point(cand)) {
                let gain = block_sup(fam, last, cand).powf(r);
                stack.push(cand);
                dfs(fam, r, j_max, stack, accum + gain, best, best_chain);
                stack.pop();
            }
        }
    }
    for start in 0..n {
        stack.push(start);
        dfs(fam, r, j_max, &mut stack, 0.0, &mut best, &mut best_chain);
        stack.pop();
    }
    (best, best_chain)
}

fn stochastic_chain_search(
    fam: &ParamFamily,
    r: f64,
    j_max: usize,
    trials: usize,
    seed: u64,
) -> (f64, Option<Vec<usize>>) {
    let n = fam.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // successor lists under ≺_s
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            ((i + 1)..n)
                .filter(|&j| crate::rat::strictly_below(fam.point(i), fam.point(j)))
                .collect()
        })
        .collect();
    let mut best = 0.0f64;
    let mut best_chain = None;
    for _ in 0..trials {
        let mut cur = rng.random_range(0..n);
        let mut chain = vec![cur];
        let mut accum = 0.0;
        let greedy = rng.random_bool(0.5);
        while chain.len() < j_max + 1 && !succ[cur].is_empty() {
            let next = if greedy {
                *succ[cur]
                    .iter()
                    .max_by(|&&a, &&b| {
                        block_sup(fam, cur, a)
                            .partial_cmp(&block_sup(fam, cur, b))
                            .unwrap()
                    })
                    .unwrap()
            } else {
                succ[cur][rng.random_range(0..succ[cur].len())]
            };
            accum += block_sup(fam, cur, next).powf(r);
            chain.push(next);
            cur = next;
            if chain.len() >= 2 && accum > best {
                best = accum;
                best_chain = Some(chain.clone());
            }
            // random stopping keeps short chains in the mix
            if !greedy && rng.random_bool(0.15) {
                break;
            }
        }
    }
    (best, best_chain)
}

// ---------------------------------------------------------------------------
// λ-jump counting
// ---------------------------------------------------------------------------

/// `N_λ(a_t : t ∈ 𝕀)`: the maximal `J` admitting `t_0 < … < t_J` with every
/// consecutive increment at least `λ` in modulus. Longest-path dynamic
/// program over the jump graph.
pub fn jump_count(fam: &ParamFamily, lambda: f64) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_threshold(lambda)?;
    let vals = fam.values();
    let n = vals.len();
    let mut edges = vec![0usize; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    for j in 1..n {
        for i in 0..j {
            if (vals[j] - vals[i]).norm() >= lambda {
                let cand = edges[i] + 1;
                if cand > edges[j] {
                    edges[j] = cand;
                    prev[j] = Some(i);
                }
            }
        }
    }
    let mut arg = 0;
    for j in 0..n {
        if edges[j] > edges[arg] {
            arg = j;
        }
    }
    let count = edges[arg];
    let mut out = SeminormValue::exact(SeminormKind::JumpCount, Some(lambda), count as f64);
    if count > 0 {
        let mut chain = vec![arg];
        let mut cur = arg;
        while let Some(i) = prev[cur] {
            chain.push(i);
            cur = i;
        }
        chain.reverse();
        out = out.with_witness(Witness::Chain(chain));
    }
    Ok(out)
}

/// Brute-force oracle for [`jump_count`] (subset enumeration).
pub fn jump_count_bruteforce(fam: &ParamFamily, lambda: f64) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_threshold(lambda)?;
    let vals = fam.values();
    let n = vals.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::BruteForceTooLarge(n, BRUTE_FORCE_CAP));
    }
    let mut best = 0usize;
    for mask in 1u32..(1u32 << n) {
        if (mask.count_ones() as usize) < 2 {
            continue;
        }
        let mut ok = true;
        let mut count = 0usize;
        let mut last: Option<usize> = None;
        for j in 0..n {
            if mask & (1 << j) != 0 {
                if let Some(i) = last {
                    if (vals[j] - vals[i]).norm() < lambda {
                        ok = false;
                        break;
                    }
                    count += 1;
                }
                last = Some(j);
            }
        }
        if ok {
            best = best.max(count);
        }
    }
    Ok(SeminormValue::exact(
        SeminormKind::JumpCount,
        Some(lambda),
        best as f64,
    ))
}

/// `𝒩_λ(a_t : t ∈ 𝕀)`: the overlapping-pairs jump count, the maximal `J`
/// admitting `s_1 < t_1 ≤ s_2 < t_2 ≤ … ≤ s_J < t_J` with
/// `|a_{t_j} − a_{s_j}| ≥ λ`.
///
/// The left-to-right greedy scan (always close the current pair at the
/// earliest possible `t`) is exact by the usual exchange argument; the
/// recursion oracle below cross-checks it.
pub fn overlap_jump_count(fam: &ParamFamily, lambda: f64) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_threshold(lambda)?;
    let vals = fam.values();
    let n = vals.len();
    let mut pairs: Vec<[usize; 2]> = Vec::new();
    let mut from = 0usize;
    'scan: while from + 1 < n {
        for t in (from + 1)..n {
            for s in from..t {
                if (vals[t] - vals[s]).norm() >= lambda {
                    pairs.push([s, t]);
                    from = t;
                    continue 'scan;
                }
            }
        }
        break;
    }
    let mut out = SeminormValue::exact(
        SeminormKind::OverlapJumpCount,
        Some(lambda),
        pairs.len() as f64,
    );
    if !pairs.is_empty() {
        out = out.with_witness(Witness::Pairs(pairs));
    }
    Ok(out)
}

/// Recursion oracle for [`overlap_jump_count`], directly encoding the
/// definition (`f(p)` = best count using pairs with `s ≥ p`).
pub fn overlap_jump_count_bruteforce(fam: &ParamFamily, lambda: f64) -> Result<SeminormValue> {
    check_one_parameter(fam)?;
    check_threshold(lambda)?;
    let vals = fam.values();
    let n = vals.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::BruteForceTooLarge(n, BRUTE_FORCE_CAP));
    }
    fn rec(vals: &[Complex64], lambda: f64, from: usize, memo: &mut [Option<usize>]) -> usize {
        if from + 1 >= vals.len() {
            return 0;
        }
        if let Some(v) = memo[from] {
            return v;
        }
        let mut best = 0usize;
        for s in from..vals.len() {
            for t in (s + 1)..vals.len() {
                if (vals[t] - vals[s]).norm() >= lambda {
                    best = best.max(1 + rec(vals, lambda, t, memo));
                }
            }
        }
        memo[from] = Some(best);
        best
    }
    let mut memo = vec![None; n];
    let best = rec(vals, lambda, 0, &mut memo);
    Ok(SeminormValue::exact(
        SeminormKind::OverlapJumpCount,
        Some(lambda),
        best as f64,
    ))
}

// ---------------------------------------------------------------------------
// Convergence certificates
// ---------------------------------------------------------------------------

/// A Cauchy-tail certificate for a family on a product grid: the smallest
/// grid scale `N` with `sup_{s,t ⪰ (N,…,N)} |a_s − a_t| ≤ ε`, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCertificate {
    pub epsilon: f64,
    /// The certified scale, `None` when no grid scale works.
    pub threshold: Option<Rat>,
    /// The Cauchy sup achieved at the certified scale.
    pub achieved_sup: Option<f64>,
}

/// Runs the Cauchy criterion behind "oscillation bounds imply pointwise
/// convergence" on the available grid.
pub fn convergence_certificate(fam: &ParamFamily, epsilon: f64) -> Result<ConvergenceCertificate> {
    if !fam.is_product_grid() {
        return Err(Error::NotProductGrid);
    }
    let mut candidates: Vec<Rat> = Vec::new();
    for axis in 0..fam.dim_k() {
        candidates.extend(fam.axis_values(axis));
    }
    candidates.sort();
    candidates.dedup();
    // Corner sets must stay nonempty: N may not exceed any axis maximum.
    let corner_limit = (0..fam.dim_k())
        .map(|a| *fam.axis_values(a).last().unwrap())
        .min()
        .unwrap();
    for cand in candidates.into_iter().filter(|c| *c <= corner_limit) {
        let corner: Vec<usize> = (0..fam.len())
            .filter(|&p| fam.point(p).iter().all(|c| *c >= cand))
            .collect();
        // a single sample cannot witness a Cauchy tail
        if corner.len() < 2 {
            continue;
        }
        let mut sup = 0.0f64;
        for (ai, &i) in corner.iter().enumerate() {
            for &j in corner.iter().skip(ai + 1) {
                sup = sup.max((fam.value(i) - fam.value(j)).norm());
            }
        }
        if sup <= epsilon {
            return Ok(ConvergenceCertificate {
                epsilon,
                threshold: Some(cand),
                achieved_sup: Some(sup),
            });
        }
    }
    Ok(ConvergenceCertificate {
        epsilon,
        threshold: None,
        achieved_sup: None,
    })
}

// ---------------------------------------------------------------------------
// Maximal domination
// ---------------------------------------------------------------------------

/// `sup_{t < max 𝕀} |a_t| − (|a_{min 𝕀}| + sup-oscillation)` for a
/// one-parameter family; nonpositive by the decomposition
/// `|a_t| ≤ |a_{min}| + |a_t − a_{min}|` with the single-block sequence
/// `(min 𝕀, max 𝕀)`.
pub fn maximal_domination_gap(fam: &ParamFamily, r: f64) -> Result<f64> {
    check_one_parameter(fam)?;
    check_exponent(r)?;
    let n = fam.len();
    let lhs = (0..n - 1)
        .map(|p| fam.value(p).norm())
        .fold(0.0f64, f64::max);
    let osc = sup_oscillation(fam, r, n - 1)?.value;
    Ok(lhs - (fam.value(0).norm() + osc))
}

/// Re-evaluates a witness against the family; returns the recomputed value.
pub fn evaluate_witness(fam: &ParamFamily, sv: &SeminormValue) -> Result<f64> {
    match (&sv.witness, sv.kind) {
        (Some(Witness::Chain(chain)), SeminormKind::Variation) => {
            let r = sv.parameter.ok_or_else(|| Error::Malformed("missing r".into()))?;
            let sum: f64 = chain
                .windows(2)
                .map(|w| (fam.value(w[1]) - fam.value(w[0])).norm().powf(r))
                .sum();
            Ok(sum.powf(1.0 / r))
        }
        (Some(Witness::Chain(chain)), SeminormKind::Oscillation) => {
            let r = sv.parameter.ok_or_else(|| Error::Malformed("missing r".into()))?;
            let entries: Vec<GridPoint> = chain.iter().map(|&p| fam.point(p).clone()).collect();
            let seq = IncreasingSequence::new(entries)?;
            Ok(oscillation(fam, &seq, r, None)?.value)
        }
        (Some(Witness::Chain(chain)), SeminormKind::JumpCount) => {
            let lambda = sv
                .parameter
                .ok_or_else(|| Error::Malformed("missing lambda".into()))?;
            let ok = chain
                .windows(2)
                .all(|w| (fam.value(w[1]) - fam.value(w[0])).norm() >= lambda);
            if !ok {
                return Err(Error::Malformed("jump witness violates threshold".into()));
            }
            Ok((chain.len() - 1) as f64)
        }
        (Some(Witness::Pairs(pairs)), SeminormKind::OverlapJumpCount) => {
            let lambda = sv
                .parameter
                .ok_or_else(|| Error::Malformed("missing lambda".into()))?;
            for w in pairs.windows(2) {
                if w[0][1] > w[1][0] {
                    return Err(Error::Malformed("overlap witness pairs out of order".into()));
                }
            }
            let ok = pairs
                .iter()
                .all(|p| p[0] < p[1] && (fam.value(p[1]) - fam.value(p[0])).norm() >= lambda);
            if !ok {
                return Err(Error::Malformed("overlap witness violates threshold".into()));
            }
            Ok(pairs.len() as f64)
        }
        _ => Err(Error::Malformed("no witness to evaluate".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fam(vals: &[f64]) -> ParamFamily {
        ParamFamily::from_reals(vals).unwrap()
    }

    #[test]
    fn variation_frozen_examples() {
        assert_eq!(variation(&fam(&[1.0, 1.0, 1.0, 1.0]), 2.0).unwrap().value, 0.0);
        assert_eq!(variation(&fam(&[0.0, 1.0]), 2.0).unwrap().value, 1.0);
        // brute force confirms taking all five points: sum 4, V = 2
        assert_relative_eq!(
            variation(&fam(&[0.0, 1.0, 0.0, 1.0, 0.0]), 2.0).unwrap().value,
            2.0,
            max_relative = 1e-12
        );
        // endpoints-only subsequence beats consecutive refinement: 4 > 1 + 1
        assert_relative_eq!(
            variation(&fam(&[0.0, 1.0, 2.0]), 2.0).unwrap().value,
            2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn variation_bruteforce_frozen_examples() {
        assert_eq!(
            variation_bruteforce(&fam(&[0.0, 1.0, 0.0]), 1.0).unwrap().value,
            2.0
        );
        assert_eq!(variation_bruteforce(&fam(&[3.0, 3.0]), 5.0).unwrap().value, 0.0);
    }

    #[test]
    fn variation_domain_errors() {
        assert!(matches!(
            variation(&fam(&[0.0, 1.0]), 0.5),
            Err(Error::ExponentRange(_))
        ));
        let long: Vec<f64> = (0..25).map(|i| i as f64).collect();
        assert!(matches!(
            variation_bruteforce(&fam(&long), 2.0),
            Err(Error::BruteForceTooLarge(25, BRUTE_FORCE_CAP))
        ));
    }

    #[test]
    fn oscillation_frozen_example() {
        // blocks [0,2) and [2,3); the first sees the unit rise, the second
        // contains only its own anchor
        let f = fam(&[0.0, 1.0, 0.0, 2.0]);
        let seq = IncreasingSequence::from_integers(&[0, 2, 3]).unwrap();
        assert_relative_eq!(
            oscillation(&f, &seq, 2.0, None).unwrap().value,
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn oscillation_single_block_is_sup_deviation() {
        let f = fam(&[0.5, -1.0, 2.0, 0.25]);
        let seq = IncreasingSequence::from_integers(&[0, 3]).unwrap();
        let expect = [0.5f64, 1.0, 2.0]
            .iter()
            .map(|v| (v - 0.5f64).abs())
            .fold(0.0f64, f64::max);
        for r in [1.0, 1.7, 3.0] {
            assert_relative_eq!(
                oscillation(&f, &seq, r, None).unwrap().value,
                expect,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn oscillation_constant_family_vanishes() {
        let f = fam(&[4.0; 6]);
        let seq = IncreasingSequence::from_integers(&[0, 2, 5]).unwrap();
        assert_eq!(oscillation(&f, &seq, 2.0, None).unwrap().value, 0.0);
    }

    #[test]
    fn oscillation_empty_subdomain_blocks_contribute_zero() {
        let f = fam(&[0.0, 7.0, 0.0, 3.0]);
        let seq = IncreasingSequence::from_integers(&[0, 2, 3]).unwrap();
        // subdomain excludes everything in [0,2) except nothing at all:
        // only t = 3 kept, which lies in no half-open block
        let sub = vec![vec![rat_int(3)]];
        assert_eq!(
            oscillation(&f, &seq, 2.0, Some(&sub)).unwrap().value,
            0.0
        );
    }

    #[test]
    fn oscillation_rejects_alien_entries() {
        let f = fam(&[0.0, 1.0]);
        let seq = IncreasingSequence::from_integers(&[0, 5]).unwrap();
        assert!(matches!(
            oscillation(&f, &seq, 2.0, None),
            Err(Error::EntryOutsideIndexSet)
        ));
    }

    #[test]
    fn sup_oscillation_frozen_examples() {
        // values (0,1,0,1): the only blocks that can realize a unit deviation
        // are anchored before the rise; no pair of blocks can both do so
        let v = sup_oscillation(&fam(&[0.0, 1.0, 0.0, 1.0]), 2.0, 3).unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            v.value,
            sup_oscillation_bruteforce(&fam(&[0.0, 1.0, 0.0, 1.0]), 2.0, 3)
                .unwrap()
                .value,
            max_relative = 1e-12
        );
        // monotone rise: a single block [t_0, t_3) sees sup deviation 2
        let m = sup_oscillation(&fam(&[0.0, 1.0, 2.0, 3.0]), 1.0, 3).unwrap();
        assert_relative_eq!(m.value, 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            m.value,
            sup_oscillation_bruteforce(&fam(&[0.0, 1.0, 2.0, 3.0]), 1.0, 3)
                .unwrap()
                .value,
            max_relative = 1e-12
        );
        // constant family
        assert_eq!(sup_oscillation(&fam(&[2.0; 5]), 2.0, 4).unwrap().value, 0.0);
    }

    #[test]
    fn sup_oscillation_monotone_in_j_max() {
        let f = fam(&[0.3, -1.2, 2.0, 0.0, 1.4, -0.7]);
        let mut last = 0.0;
        for j_max in 1..=5 {
            let v = sup_oscillation(&f, 2.0, j_max).unwrap().value;
            assert!(v >= last - 1e-12);
            last = v;
        }
        // saturates at J_max = n-1
        assert_relative_eq!(
            sup_oscillation(&f, 2.0, 5).unwrap().value,
            sup_oscillation(&f, 2.0, 50).unwrap().value,
            max_relative = 1e-12
        );
    }

    #[test]
    fn jump_count_frozen_examples() {
        assert_eq!(jump_count(&fam(&[5.0; 4]), 0.5).unwrap().value, 0.0);
        assert_eq!(
            jump_count(&fam(&[0.0, 1.0, 0.0, 1.0, 0.0]), 1.0).unwrap().value,
            4.0
        );
        assert_eq!(jump_count(&fam(&[0.0, 0.5, 1.0]), 1.0).unwrap().value, 1.0);
        assert!(matches!(
            jump_count(&fam(&[0.0, 1.0]), 0.0),
            Err(Error::ThresholdRange(_))
        ));
    }

    #[test]
    fn overlap_jump_frozen_examples() {
        assert_eq!(
            overlap_jump_count(&fam(&[0.0, 1.0, 0.0, 1.0, 0.0]), 1.0)
                .unwrap()
                .value,
            4.0
        );
        let tri = fam(&[0.0, 0.6, 1.2]);
        let n1 = jump_count(&tri, 1.0).unwrap().value;
        let overlap = overlap_jump_count(&tri, 1.0).unwrap().value;
        let n_half = jump_count(&tri, 0.5).unwrap().value;
        assert_eq!((n1, overlap, n_half), (1.0, 1.0, 2.0));
        assert!(n1 <= overlap && overlap <= n_half);
        assert_eq!(overlap_jump_count(&fam(&[3.0; 5]), 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn convergence_certificate_frozen_examples() {
        // a_t = 1/(t_1 t_2) on [1..16]^2
        let mut entries = Vec::new();
        for i in 1..=16i64 {
            for j in 1..=16i64 {
                entries.push((
                    vec![rat_int(i), rat_int(j)],
                    Complex64::new(1.0 / (i as f64 * j as f64), 0.0),
                ));
            }
        }
        let grid = ParamFamily::new(2, entries).unwrap();
        let cert = convergence_certificate(&grid, 0.25).unwrap();
        assert_eq!(cert.threshold, Some(rat_int(2)));

        let constant = fam(&[3.0; 4]);
        let c2 = convergence_certificate(&constant, 1e-9).unwrap();
        assert_eq!(c2.threshold, Some(rat_int(0)));

        let alternating: Vec<f64> = (0..10).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let c3 = convergence_certificate(&fam(&alternating), 1.0).unwrap();
        assert_eq!(c3.threshold, None);
    }

    #[test]
    fn witnesses_reevaluate() {
        let f = fam(&[0.4, -1.0, 2.3, 0.1, 1.7]);
        for r in [1.0, 1.5, 2.0, 3.0] {
            let v = variation(&f, r).unwrap();
            assert_relative_eq!(
                evaluate_witness(&f, &v).unwrap(),
                v.value,
                max_relative = 1e-12
            );
            let o = sup_oscillation(&f, r, 4).unwrap();
            assert_relative_eq!(
                evaluate_witness(&f, &o).unwrap(),
                o.value,
                max_relative = 1e-12
            );
        }
        let j = jump_count(&f, 1.0).unwrap();
        assert_eq!(evaluate_witness(&f, &j).unwrap(), j.value);
        let nj = overlap_jump_count(&f, 1.0).unwrap();
        assert_eq!(evaluate_witness(&f, &nj).unwrap(), nj.value);
    }

    #[test]
    fn multiparam_exhaustive_frozen_example() {
        // spike at (1,1) inside a 3x3 grid, box [0,2)^2 sees it
        let mut entries = Vec::new();
        for i in 0..3i64 {
            for j in 0..3i64 {
                let v = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                entries.push((vec![rat_int(i), rat_int(j)], Complex64::new(v, 0.0)));
            }
        }
        let grid = ParamFamily::new(2, entries).unwrap();
        let sv = sup_oscillation_multiparam(&grid, 2.0, 8, 0, 0).unwrap();
        assert_eq!(sv.bound, Bound::Exact);
        assert_relative_eq!(sv.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn multiparam_constant_family_is_zero() {
        let mut entries = Vec::new();
        for i in 0..3i64 {
            for j in 0..3i64 {
                entries.push((vec![rat_int(i), rat_int(j)], Complex64::new(2.5, 0.0)));
            }
        }
        let grid = ParamFamily::new(2, entries).unwrap();
        let sv = sup_oscillation_multiparam(&grid, 2.0, 8, 0, 0).unwrap();
        assert_eq!(sv.value, 0.0);
        assert_eq!(sv.bound, Bound::Exact);
    }

    #[test]
    fn diagonal_oscillation_below_full_multiparam_sup() {
        // Remark-style comparison: diagonal sequences are a subfamily of the
        // full multi-parameter supremum.
        let mut entries = Vec::new();
        let vals = [0.3, -0.7, 1.1, 0.0, 0.9, -1.3, 0.4, 0.8, -0.2];
        for i in 0..3i64 {
            for j in 0..3i64 {
                entries.push((
                    vec![rat_int(i), rat_int(j)],
                    Complex64::new(vals[(3 * i + j) as usize], 0.0),
                ));
            }
        }
        let grid = ParamFamily::new(2, entries).unwrap();
        let full = sup_oscillation_multiparam(&grid, 2.0, 8, 0, 0).unwrap().value;
        let base = IncreasingSequence::from_integers(&[0, 1, 2]).unwrap();
        let diag = base.diagonal_embed(2).unwrap();
        let dval = oscillation(&grid, &diag, 2.0, None).unwrap().value;
        assert!(dval <= full + 1e-12);
    }

    proptest! {
        #[test]
        fn variation_matches_bruteforce(vals in proptest::collection::vec(-5.0f64..5.0, 2..10),
                                        r in 1.0f64..3.5) {
            let f = fam(&vals);
            let fast = variation(&f, r).unwrap().value;
            let slow = variation_bruteforce(&f, r).unwrap().value;
            prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0));
        }

        #[test]
        fn sup_oscillation_matches_bruteforce(vals in proptest::collection::vec(-5.0f64..5.0, 2..9),
                                              r in 1.0f64..3.5,
                                              j_max in 1usize..6) {
            let f = fam(&vals);
            let fast = sup_oscillation(&f, r, j_max).unwrap().value;
            let slow = sup_oscillation_bruteforce(&f, r, j_max).unwrap().value;
            prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0));
        }

        #[test]
        fn jump_counts_match_bruteforce(vals in proptest::collection::vec(-3.0f64..3.0, 2..9),
                                        lambda in 0.2f64..2.0) {
            let f = fam(&vals);
            prop_assert_eq!(
                jump_count(&f, lambda).unwrap().value,
                jump_count_bruteforce(&f, lambda).unwrap().value
            );
            prop_assert_eq!(
                overlap_jump_count(&f, lambda).unwrap().value,
                overlap_jump_count_bruteforce(&f, lambda).unwrap().value
            );
        }

        #[test]
        fn seminorm_chain_inequalities(vals in proptest::collection::vec(-4.0f64..4.0, 3..10),
                                       r in 1.0f64..3.5,
                                       lambda in 0.2f64..2.0) {
            let f = fam(&vals);
            let n = f.len();
            let v = variation(&f, r).unwrap().value;
            let osc = sup_oscillation(&f, r, n - 1).unwrap().value;
            let ell = f.ell_r_norm(r);
            // oscillation ≤ variation ≤ 2 ℓ^r
            prop_assert!(osc <= v + 1e-10);
            prop_assert!(v <= 2.0 * ell + 1e-10);
            // sup bound with every base point
            for t0 in 0..n {
                prop_assert!(f.sup_norm() <= f.value(t0).norm() + v + 1e-10);
            }
            // jump/variation bridge
            let nj = jump_count(&f, lambda).unwrap().value;
            prop_assert!(lambda * nj.powf(1.0 / r) <= v + 1e-10);
            // overlapping sandwich
            let over = overlap_jump_count(&f, lambda).unwrap().value;
            let n_half = jump_count(&f, lambda / 2.0).unwrap().value;
            prop_assert!(nj <= over && over <= n_half);
            // maximal function domination
            prop_assert!(maximal_domination_gap(&f, r).unwrap() <= 1e-10);
        }

        #[test]
        fn oscillation_subadditive_and_splits(a in proptest::collection::vec(-3.0f64..3.0, 6..10),
                                              b in proptest::collection::vec(-3.0f64..3.0, 6..10),
                                              r in 1.0f64..3.0) {
            let n = a.len().min(b.len());
            let fa = fam(&a[..n]);
            let fb = fam(&b[..n]);
            let fsum = fa.add(&fb).unwrap();
            let seq = IncreasingSequence::from_integers(&[0, (n as i64) / 2, n as i64 - 1]).unwrap();
            let oa = oscillation(&fa, &seq, r, None).unwrap().value;
            let ob = oscillation(&fb, &seq, r, None).unwrap().value;
            let os = oscillation(&fsum, &seq, r, None).unwrap().value;
            prop_assert!(os <= oa + ob + 1e-10);

            // disjoint-union split over even/odd subdomains
            let even: Vec<GridPoint> = (0..n).step_by(2).map(|t| vec![rat_int(t as i64)]).collect();
            let odd: Vec<GridPoint> = (1..n).step_by(2).map(|t| vec![rat_int(t as i64)]).collect();
            let all: Vec<GridPoint> = (0..n).map(|t| vec![rat_int(t as i64)]).collect();
            let o_even = oscillation(&fa, &seq, r, Some(&even)).unwrap().value;
            let o_odd = oscillation(&fa, &seq, r, Some(&odd)).unwrap().value;
            let o_all = oscillation(&fa, &seq, r, Some(&all)).unwrap().value;
            prop_assert!(o_all <= o_even + o_odd + 1e-10);
        }

        #[test]
        fn variation_monotonicity(vals in proptest::collection::vec(-4.0f64..4.0, 4..10)) {
            let f = fam(&vals);
            // nonincreasing in r
            let mut last = f64::INFINITY;
            for r in [1.0, 1.5, 2.0, 3.0] {
                let v = variation(&f, r).unwrap().value;
                prop_assert!(v <= last + 1e-10);
                last = v;
            }
            // monotone in the index set
            let sub: Vec<usize> = (0..f.len()).step_by(2).collect();
            if sub.len() >= 2 {
                let g = f.restrict(&sub).unwrap();
                prop_assert!(variation(&g, 2.0).unwrap().value
                    <= variation(&f, 2.0).unwrap().value + 1e-10);
            }
        }
    }
}
