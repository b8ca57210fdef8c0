//! Concrete operator families on finite model spaces: dyadic martingale
//! conditional expectations, sharp Fourier cutoffs (the discrete Carleson
//! family), smooth dilated bump multipliers, and partial sums of orthonormal
//! expansions.
//!
//! The model spaces are finite probability spaces (a dyadic space of `2^K`
//! atoms, or the cyclic group `ℤ_N`), so every operator is a finite matrix
//! and every identity is checkable to roundoff. The martingale, cutoff and
//! partial-sum families satisfy the projection composition law
//! `P_s P_t = P_{s∧t}` (`s ≠ t`); the smooth multipliers do not (they are
//! not idempotent) and are instead compared against the sharp cutoffs by a
//! square-function distance.

use num_complex::Complex64;

use crate::dft;
use crate::error::{Error, Result};
use crate::rat::{rat_int, Rat};

// ---------------------------------------------------------------------------
// Model-space helpers (normalized measure)
// ---------------------------------------------------------------------------

/// `L^p` norm under the normalized counting measure.
pub fn norm_p(values: &[Complex64], p: f64) -> f64 {
    let mean = values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / values.len() as f64;
    mean.powf(1.0 / p)
}

pub fn norm_inf(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Normalized inner product `𝔼[f ḡ]`.
pub fn inner(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum::<Complex64>() / Complex64::new(f.len() as f64, 0.0)
}

pub fn norms_of_real_field(values: &[f64], p: f64) -> f64 {
    let mean = values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / values.len() as f64;
    mean.powf(1.0 / p)
}

// ---------------------------------------------------------------------------
// The family abstraction
// ---------------------------------------------------------------------------

/// A finite family of linear operators `(T_t : t ∈ 𝕀)` on a model space,
/// indexed by rationals in increasing order.
pub trait OperatorFamily {
    fn space_size(&self) -> usize;
    fn indices(&self) -> &[Rat];
    /// Applies `T_{t}` where `t = indices()[pos]`.
    fn apply(&self, pos: usize, f: &[Complex64]) -> Vec<Complex64>;
    fn name(&self) -> &'static str;

    fn index_count(&self) -> usize {
        self.indices().len()
    }

    fn check_pos(&self, pos: usize) -> Result<()> {
        if pos >= self.index_count() {
            return Err(Error::ProjectionIndexRange(pos, self.index_count()));
        }
        Ok(())
    }
}

/// `‖T_s T_t f − T_{s∧t} f‖_∞`: the projection composition-law residual.
pub fn lattice_identity_residual(
    family: &dyn OperatorFamily,
    s_pos: usize,
    t_pos: usize,
    f: &[Complex64],
) -> Result<f64> {
    family.check_pos(s_pos)?;
    family.check_pos(t_pos)?;
    let st = family.apply(s_pos, &family.apply(t_pos, f));
    let min = family.apply(s_pos.min(t_pos), f);
    Ok(st
        .iter()
        .zip(&min)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Residual of the block identity `(P_t − P_{lo})f = P_t (P_{hi} − P_{lo}) f`
/// for `lo < t < hi`; the engine of the one-parameter oscillation estimate
/// for projection families.
pub fn block_projection_identity_residual(
    family: &dyn OperatorFamily,
    f: &[Complex64],
    lo_pos: usize,
    hi_pos: usize,
    t_pos: usize,
) -> Result<f64> {
    family.check_pos(hi_pos)?;
    if !(lo_pos < t_pos && t_pos < hi_pos) {
        return Err(Error::IndexNotInsideBlock(format!(
            "need lo < t < hi, got {lo_pos} {t_pos} {hi_pos}"
        )));
    }
    let p_t = family.apply(t_pos, f);
    let p_lo = family.apply(lo_pos, f);
    let lhs: Vec<Complex64> = p_t.iter().zip(&p_lo).map(|(a, b)| a - b).collect();
    let p_hi = family.apply(hi_pos, f);
    let delta: Vec<Complex64> = p_hi.iter().zip(&p_lo).map(|(a, b)| a - b).collect();
    let rhs = family.apply(t_pos, &delta);
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Pointwise block square function
/// `(Σ_j |(P_{I_{j+1}} − P_{I_j}) f|^r)^{1/r}` along increasing positions.
pub fn block_square_function(
    family: &dyn OperatorFamily,
    f: &[Complex64],
    seq_pos: &[usize],
    r: f64,
) -> Result<Vec<f64>> {
    if seq_pos.len() < 2 || seq_pos.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotStrictlyIncreasing);
    }
    family.check_pos(*seq_pos.last().unwrap())?;
    let mut acc = vec![0.0f64; family.space_size()];
    let mut prev = family.apply(seq_pos[0], f);
    for &pos in &seq_pos[1..] {
        let next = family.apply(pos, f);
        for (a, (nv, pv)) in acc.iter_mut().zip(next.iter().zip(&prev)) {
            *a += (nv - pv).norm().powf(r);
        }
        prev = next;
    }
    for a in &mut acc {
        *a = a.powf(1.0 / r);
    }
    Ok(acc)
}

/// Pointwise maximal function `sup_{t ∈ 𝕀} |T_t f|`.
pub fn maximal_function(family: &dyn OperatorFamily, f: &[Complex64]) -> Vec<f64> {
    let mut sup = vec![0.0f64; family.space_size()];
    for pos in 0..family.index_count() {
        let g = family.apply(pos, f);
        for (s, v) in sup.iter_mut().zip(&g) {
            *s = s.max(v.norm());
        }
    }
    sup
}

/// Pointwise oscillation `O^r_{I,J}(T_t f : t ∈ 𝕀)` computed from the
/// precomputed fields `fields[pos] = T_{t_pos} f` (one per family index).
///
/// `seq_pos` are positions into the family's index order; block `j` takes the
/// sup over positions in `[seq_pos[j], seq_pos[j+1])`.
pub fn family_oscillation_field(
    fields: &[Vec<Complex64>],
    seq_pos: &[usize],
    r: f64,
) -> Result<Vec<f64>> {
    if seq_pos.len() < 2 || seq_pos.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotStrictlyIncreasing);
    }
    if *seq_pos.last().unwrap() >= fields.len() {
        return Err(Error::ProjectionIndexRange(
            *seq_pos.last().unwrap(),
            fields.len(),
        ));
    }
    let size = fields[0].len();
    let mut acc = vec![0.0f64; size];
    let mut sup = vec![0.0f64; size];
    for w in seq_pos.windows(2) {
        // track squared magnitudes; one sqrt per point per block
        sup.fill(0.0);
        let base = &fields[w[0]];
        for field in fields.iter().take(w[1]).skip(w[0]) {
            for (s, (v, b)) in sup.iter_mut().zip(field.iter().zip(base)) {
                *s = s.max((v - b).norm_sqr());
            }
        }
        for (a, s) in acc.iter_mut().zip(&sup) {
            *a += s.sqrt().powf(r);
        }
    }
    for a in &mut acc {
        *a = a.powf(1.0 / r);
    }
    Ok(acc)
}

/// All fields `T_t f`, one per family index.
pub fn all_fields(family: &dyn OperatorFamily, f: &[Complex64]) -> Vec<Vec<Complex64>> {
    (0..family.index_count())
        .map(|pos| family.apply(pos, f))
        .collect()
}

/// Pointwise middle term of the projection oscillation chain:
/// `(Σ_j sup_{t∈𝕀} |P_t Δ_j f|^r)^{1/r}` with `Δ_j f = (P_{I_{j+1}} − P_{I_j}) f`.
pub fn projection_chain_middle(
    family: &dyn OperatorFamily,
    f: &[Complex64],
    seq_pos: &[usize],
    r: f64,
) -> Result<Vec<f64>> {
    if seq_pos.len() < 2 || seq_pos.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotStrictlyIncreasing);
    }
    family.check_pos(*seq_pos.last().unwrap())?;
    let size = family.space_size();
    let mut acc = vec![0.0f64; size];
    for w in seq_pos.windows(2) {
        let hi = family.apply(w[1], f);
        let lo = family.apply(w[0], f);
        let delta: Vec<Complex64> = hi.iter().zip(&lo).map(|(a, b)| a - b).collect();
        let mut sup = vec![0.0f64; size];
        for pos in 0..family.index_count() {
            let g = family.apply(pos, &delta);
            for (s, v) in sup.iter_mut().zip(&g) {
                *s = s.max(v.norm());
            }
        }
        for (a, s) in acc.iter_mut().zip(&sup) {
            *a += s.powf(r);
        }
    }
    for a in &mut acc {
        *a = a.powf(1.0 / r);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Dyadic martingale family
// ---------------------------------------------------------------------------

/// Conditional expectation on the dyadic space of `2^K` atoms: level `n`
/// replaces `f` on each block of length `2^{K−n}` by its block mean.
pub fn martingale_projection(f: &[Complex64], n: u32, k_depth: u32) -> Result<Vec<Complex64>> {
    if f.len() != 1usize << k_depth {
        return Err(Error::DimensionMismatch(format!(
            "dyadic space of depth {} needs {} atoms, got {}",
            k_depth,
            1usize << k_depth,
            f.len()
        )));
    }
    if n > k_depth {
        return Err(Error::LevelRange(n, k_depth));
    }
    let block = 1usize << (k_depth - n);
    let mut out = vec![Complex64::default(); f.len()];
    for b in 0..(f.len() / block) {
        let start = b * block;
        let mean = f[start..start + block].iter().sum::<Complex64>() / block as f64;
        out[start..start + block].fill(mean);
    }
    Ok(out)
}

/// The dyadic martingale family `𝔼[·|ℱ_{level(t)}]` over an integer index
/// set. The plain constructor uses `𝕀 = {0, …, K}`; the stabilized one keeps
/// refining up to `ℱ_K` and then stays there, modeling a bounded martingale
/// over an index set longer than the filtration depth.
pub struct MartingaleFamily {
    k_depth: u32,
    levels: Vec<u32>,
    indices: Vec<Rat>,
}

impl MartingaleFamily {
    pub fn new(k_depth: u32) -> Self {
        Self::stabilized(k_depth, k_depth as usize)
    }

    /// Index set `{0, …, i_max}` with level `min(n, K)`.
    pub fn stabilized(k_depth: u32, i_max: usize) -> Self {
        let levels: Vec<u32> = (0..=i_max).map(|n| (n as u32).min(k_depth)).collect();
        let indices = (0..=i_max).map(|n| rat_int(n as i64)).collect();
        Self {
            k_depth,
            levels,
            indices,
        }
    }

    pub fn k_depth(&self) -> u32 {
        self.k_depth
    }
}

impl OperatorFamily for MartingaleFamily {
    fn space_size(&self) -> usize {
        1usize << self.k_depth
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &[Complex64]) -> Vec<Complex64> {
        martingale_projection(f, self.levels[pos], self.k_depth).expect("validated at build")
    }

    fn name(&self) -> &'static str {
        "martingale"
    }
}

// ---------------------------------------------------------------------------
// Sharp Fourier cutoffs on ℤ_N
// ---------------------------------------------------------------------------

/// Keeps the balanced frequencies `|ξ| ≤ t` of `f` on `ℤ_N`; `t ≥ ⌊N/2⌋`
/// returns `f` itself.
pub fn fourier_cutoff(f: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    if !(t >= 0.0) {
        return Err(Error::ThresholdRange(t));
    }
    let n = f.len();
    let mut hat = dft::forward(f);
    for (j, h) in hat.iter_mut().enumerate() {
        let xi = dft::balanced_frequency(j, n);
        if (xi.abs() as f64) > t {
            *h = Complex64::default();
        }
    }
    Ok(dft::inverse(&hat))
}

/// The sharp-cutoff family over thresholds `t ∈ {0, 1, …, ⌊N/2⌋}` (or a
/// custom strictly increasing list).
pub struct CutoffFamily {
    n: usize,
    thresholds: Vec<u64>,
    indices: Vec<Rat>,
}

impl CutoffFamily {
    pub fn new(n: usize) -> Self {
        Self::with_thresholds(n, (0..=(n as u64) / 2).collect())
    }

    pub fn with_thresholds(n: usize, thresholds: Vec<u64>) -> Self {
        let indices = thresholds.iter().map(|&t| rat_int(t as i64)).collect();
        Self {
            n,
            thresholds,
            indices,
        }
    }
}

impl OperatorFamily for CutoffFamily {
    fn space_size(&self) -> usize {
        self.n
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &[Complex64]) -> Vec<Complex64> {
        fourier_cutoff(f, self.thresholds[pos] as f64).expect("nonnegative threshold")
    }

    fn name(&self) -> &'static str {
        "cutoff"
    }
}

// ---------------------------------------------------------------------------
// Smooth dilated bump multipliers
// ---------------------------------------------------------------------------

/// The explicit smooth transition profile `θ(u) = e^{−1/u}` for `u > 0`,
/// else `0`, and the bump
/// `χ(v) = θ(2−v) / (θ(2−v) + θ(v−1))`, clipped to `1` on `v ≤ 1` and `0` on
/// `v ≥ 2`; here `v = |ξ|_∞`. Satisfies `1_{[−1,1]} ≤ χ ≤ 1_{[−2,2]}` with
/// values in `[0,1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmoothBump;

impl SmoothBump {
    fn theta(u: f64) -> f64 {
        if u > 0.0 {
            (-1.0 / u).exp()
        } else {
            0.0
        }
    }

    /// `χ` evaluated at `v = |ξ|_∞ ≥ 0`.
    pub fn chi(v: f64) -> f64 {
        let v = v.abs();
        if v <= 1.0 {
            1.0
        } else if v >= 2.0 {
            0.0
        } else {
            let a = Self::theta(2.0 - v);
            let b = Self::theta(v - 1.0);
            a / (a + b)
        }
    }

    /// The dilated multiplier `χ_{2^n}(ξ) = χ(2^{−n} ξ)`.
    pub fn chi_dilated(xi: f64, level: i32) -> f64 {
        Self::chi(xi * 2.0f64.powi(-level))
    }
}

/// Multiplies `f̂(ξ)` by `χ(2^{−n} ξ)` over balanced frequencies. Not a
/// projection (χ is not idempotent); its distance to the sharp cutoff at
/// `2^n` is what the square-function comparison quantifies.
pub fn smooth_dilate_multiplier(f: &[Complex64], level: i32) -> Vec<Complex64> {
    let n = f.len();
    let multiplier: Vec<Complex64> = (0..n)
        .map(|j| {
            Complex64::new(
                SmoothBump::chi_dilated(dft::balanced_frequency(j, n) as f64, level),
                0.0,
            )
        })
        .collect();
    dft::apply_multiplier(f, &multiplier)
}

pub struct SmoothMultiplierFamily {
    n: usize,
    levels: Vec<i32>,
    indices: Vec<Rat>,
}

impl SmoothMultiplierFamily {
    pub fn new(n: usize, levels: Vec<i32>) -> Self {
        let indices = levels.iter().map(|&l| rat_int(l as i64)).collect();
        Self { n, levels, indices }
    }

    /// All dyadic levels resolvable on `ℤ_N`: `0, …, log2(N/2)`.
    pub fn dyadic_levels(n: usize) -> Self {
        let top = (n / 2).max(1).ilog2() as i32;
        Self::new(n, (0..=top).collect())
    }
}

impl OperatorFamily for SmoothMultiplierFamily {
    fn space_size(&self) -> usize {
        self.n
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &[Complex64]) -> Vec<Complex64> {
        smooth_dilate_multiplier(f, self.levels[pos])
    }

    fn name(&self) -> &'static str {
        "smooth-bump"
    }
}

/// `Σ_n ‖(T_{2^n} − P_{2^n}) f‖_2²  /  ‖f‖_2²` where `T` is the smooth
/// multiplier and `P` the sharp cutoff at the same dyadic scale. The symbol
/// difference lives on pairwise disjoint dyadic frequency bands and is
/// bounded by one, so the ratio never exceeds `1`.
pub fn bump_sharp_comparison(f: &[Complex64], levels: &[i32]) -> Result<f64> {
    let denom = norm_p(f, 2.0).powi(2);
    if denom == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for &level in levels {
        let smooth = smooth_dilate_multiplier(f, level);
        let sharp = fourier_cutoff(f, 2.0f64.powi(level))?;
        let diff: Vec<Complex64> = smooth.iter().zip(&sharp).map(|(a, b)| a - b).collect();
        total += norm_p(&diff, 2.0).powi(2);
    }
    Ok(total / denom)
}

// ---------------------------------------------------------------------------
// Orthonormal systems and partial-sum projections
// ---------------------------------------------------------------------------

/// An orthonormal basis `Φ_0, …, Φ_{N−1}` of the model space under the
/// normalized inner product.
pub struct OrthonormalSystem {
    vectors: Vec<Vec<Complex64>>,
}

impl OrthonormalSystem {
    pub fn custom(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if vectors.is_empty() || vectors.iter().any(|v| v.len() != vectors[0].len()) {
            return Err(Error::BadSystem);
        }
        Ok(Self { vectors })
    }

    /// Fourier characters on `ℤ_N` in the interleaved enumeration
    /// `ξ = 0, 1, −1, 2, −2, …`, so partial sums grow symmetric frequency
    /// windows.
    pub fn fourier(n: usize) -> Self {
        let mut order: Vec<i64> = vec![0];
        let mut k = 1i64;
        while order.len() < n {
            order.push(k);
            if order.len() < n {
                order.push(-k);
            }
            k += 1;
        }
        let vectors = order
            .into_iter()
            .map(|xi| {
                (0..n)
                    .map(|x| {
                        Complex64::new(
                            0.0,
                            2.0 * std::f64::consts::PI * (x as f64) * (xi as f64) / n as f64,
                        )
                        .exp()
                    })
                    .collect()
            })
            .collect();
        Self { vectors }
    }

    /// The Haar system on the dyadic space of `2^K` atoms, normalized for
    /// the mean inner product.
    pub fn haar(k_depth: u32) -> Self {
        let n = 1usize << k_depth;
        let mut vectors: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); n]];
        for level in 0..k_depth {
            let blocks = 1usize << level;
            let block_len = n / blocks;
            let half = block_len / 2;
            let scale = (blocks as f64).sqrt();
            for b in 0..blocks {
                let mut v = vec![Complex64::default(); n];
                let start = b * block_len;
                for x in 0..half {
                    v[start + x] = Complex64::new(scale, 0.0);
                    v[start + half + x] = Complex64::new(-scale, 0.0);
                }
                vectors.push(v);
            }
        }
        Self { vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn space_size(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k]
    }

    /// `max |⟨Φ_i, Φ_j⟩ − δ_{ij}|` over all pairs.
    pub fn gram_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            for j in 0..self.len() {
                let g = inner(&self.vectors[i], &self.vectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// The truncated expansion `P_n f = Σ_{k=0}^n ⟨f, Φ_k⟩ Φ_k`.
pub fn partial_sum_projection(
    f: &[Complex64],
    system: &OrthonormalSystem,
    n: usize,
) -> Result<Vec<Complex64>> {
    if n >= system.len() {
        return Err(Error::ProjectionIndexRange(n, system.len()));
    }
    let mut out = vec![Complex64::default(); system.space_size()];
    for k in 0..=n {
        let coeff = inner(f, system.vector(k));
        for (o, v) in out.iter_mut().zip(system.vector(k)) {
            *o += coeff * v;
        }
    }
    Ok(out)
}

/// The partial-sum projection family `P_0, …, P_{N−1}` of a system.
pub struct PartialSumFamily {
    system: OrthonormalSystem,
    indices: Vec<Rat>,
}

impl PartialSumFamily {
    pub fn new(system: OrthonormalSystem) -> Self {
        let indices = (0..system.len()).map(|n| rat_int(n as i64)).collect();
        Self { system, indices }
    }

    pub fn system(&self) -> &OrthonormalSystem {
        &self.system
    }
}

impl OperatorFamily for PartialSumFamily {
    fn space_size(&self) -> usize {
        self.system.space_size()
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &[Complex64]) -> Vec<Complex64> {
        partial_sum_projection(f, &self.system, pos).expect("pos validated by index range")
    }

    fn name(&self) -> &'static str {
        "partial-sum"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn martingale_block_means() {
        let f: Vec<Complex64> = [1.0, 3.0, 5.0, 7.0]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        // n = K leaves f unchanged
        assert_eq!(martingale_projection(&f, 2, 2).unwrap(), f);
        // n = 0 is the global mean
        let flat = martingale_projection(&f, 0, 2).unwrap();
        for v in flat {
            assert_relative_eq!(v.re, 4.0, epsilon = 1e-15);
        }
        // K=2, n=1: block means (2,2,6,6)
        let half = martingale_projection(&f, 1, 2).unwrap();
        let expect = [2.0, 2.0, 6.0, 6.0];
        for (v, e) in half.iter().zip(expect) {
            assert_relative_eq!(v.re, e, epsilon = 1e-15);
        }
        assert!(matches!(
            martingale_projection(&f, 3, 2),
            Err(Error::LevelRange(3, 2))
        ));
    }

    #[test]
    fn martingale_lattice_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fam = MartingaleFamily::new(5);
        let f = random_signal(32, &mut rng);
        for _ in 0..50 {
            let s = rng.random_range(0..6);
            let t = rng.random_range(0..6);
            let res = lattice_identity_residual(&fam, s, t, &f).unwrap();
            assert!(res < 1e-13, "residual {res} at ({s},{t})");
        }
    }

    #[test]
    fn cutoff_frozen_example() {
        // N=8, f=delta_0, t=1: x -> (1/8)(1 + 2cos(2 pi x / 8))
        let mut f = vec![Complex64::default(); 8];
        f[0] = Complex64::new(1.0, 0.0);
        let g = fourier_cutoff(&f, 1.0).unwrap();
        for (x, v) in g.iter().enumerate() {
            let expect = (1.0 + 2.0 * (2.0 * std::f64::consts::PI * x as f64 / 8.0).cos()) / 8.0;
            assert_relative_eq!(v.re, expect, epsilon = 1e-12);
            assert_relative_eq!(v.im, 0.0, epsilon = 1e-12);
        }
        // full spectrum returns f exactly
        let full = fourier_cutoff(&f, 4.0).unwrap();
        for (a, b) in full.iter().zip(&f) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn cutoff_lattice_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fam = CutoffFamily::new(64);
        let f = random_signal(64, &mut rng);
        for _ in 0..50 {
            let s = rng.random_range(0..fam.index_count());
            let t = rng.random_range(0..fam.index_count());
            let res = lattice_identity_residual(&fam, s, t, &f).unwrap();
            assert!(res < 1e-12, "residual {res} at ({s},{t})");
        }
    }

    #[test]
    fn block_identity_for_builtin_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mart = MartingaleFamily::new(4);
        let f = random_signal(16, &mut rng);
        let res = block_projection_identity_residual(&mart, &f, 1, 3, 2).unwrap();
        assert!(res < 1e-13);

        let cut = CutoffFamily::new(64);
        let g = random_signal(64, &mut rng);
        let res2 = block_projection_identity_residual(&cut, &g, 3, 9, 5).unwrap();
        assert!(res2 < 1e-12);

        assert!(matches!(
            block_projection_identity_residual(&mart, &f, 1, 3, 1),
            Err(Error::IndexNotInsideBlock(_))
        ));
    }

    #[test]
    fn smooth_bump_shape() {
        assert_eq!(SmoothBump::chi(1.0), 1.0);
        assert_eq!(SmoothBump::chi(-1.0), 1.0);
        assert_eq!(SmoothBump::chi(2.0), 0.0);
        assert_eq!(SmoothBump::chi(-2.0), 0.0);
        assert_eq!(SmoothBump::chi(0.3), 1.0);
        let mid = SmoothBump::chi(1.5);
        assert!(mid > 0.0 && mid < 1.0);
        // monotone decreasing through the transition band
        assert!(SmoothBump::chi(1.2) > SmoothBump::chi(1.8));
    }

    #[test]
    fn band_limited_functions_pass_through() {
        let n = 64;
        // spectrum inside |xi| <= 2: untouched at level 1 (chi = 1 there)
        let f: Vec<Complex64> = (0..n)
            .map(|x| {
                let t = 2.0 * std::f64::consts::PI * x as f64 / n as f64;
                Complex64::new((2.0 * t).cos() + 0.5 * t.sin(), 0.0)
            })
            .collect();
        let g = smooth_dilate_multiplier(&f, 1);
        for (a, b) in g.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bump_comparison_bounded_by_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 256;
        let fam = SmoothMultiplierFamily::dyadic_levels(n);
        let f = random_signal(n, &mut rng);
        let ratio = bump_sharp_comparison(&f, &fam.levels).unwrap();
        assert!(ratio <= 1.0 + 1e-10, "ratio {ratio}");
        assert!(ratio > 0.0);
    }

    #[test]
    fn orthonormal_systems_are_orthonormal() {
        assert!(OrthonormalSystem::fourier(16).gram_residual() < 1e-12);
        assert!(OrthonormalSystem::haar(4).gram_residual() < 1e-12);
    }

    #[test]
    fn partial_sums_complete_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let sys = OrthonormalSystem::fourier(16);
        let f = random_signal(16, &mut rng);
        // completeness: n = N-1 reproduces f
        let full = partial_sum_projection(&f, &sys, 15).unwrap();
        for (a, b) in full.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
        // orthogonality: projecting a later basis vector to an earlier range
        let phi3 = sys.vector(3).to_vec();
        let proj = partial_sum_projection(&phi3, &sys, 2).unwrap();
        assert!(norm_inf(&proj) < 1e-12);
    }

    #[test]
    fn parseval_block_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for sys in [OrthonormalSystem::fourier(32), OrthonormalSystem::haar(5)] {
            let fam = PartialSumFamily::new(sys);
            let f = random_signal(32, &mut rng);
            let positions: Vec<usize> = vec![0, 3, 9, 17, 31];
            let mut total = 0.0;
            let fields = all_fields(&fam, &f);
            for w in positions.windows(2) {
                let diff: Vec<Complex64> = fields[w[1]]
                    .iter()
                    .zip(&fields[w[0]])
                    .map(|(a, b)| a - b)
                    .collect();
                total += norm_p(&diff, 2.0).powi(2);
            }
            let norm2 = norm_p(&f, 2.0).powi(2);
            assert!(total <= norm2 * (1.0 + 1e-12), "{total} vs {norm2}");
        }
    }

    #[test]
    fn square_function_hand_example() {
        // Haar-sparse f: a single Haar vector; only blocks crossing its index
        // contribute
        let sys = OrthonormalSystem::haar(3);
        let f = sys.vector(2).to_vec();
        let fam = PartialSumFamily::new(sys);
        let sq = block_square_function(&fam, &f, &[0, 1, 3], 2.0).unwrap();
        // (P_3 - P_1) f = f since the coefficient sits at k = 2
        for (s, v) in sq.iter().zip(&f) {
            assert_relative_eq!(*s, v.norm(), epsilon = 1e-12);
        }
    }

    #[test]
    fn oscillation_field_vs_single_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let fam = MartingaleFamily::new(4);
        let f = random_signal(16, &mut rng);
        let fields = all_fields(&fam, &f);
        let osc = family_oscillation_field(&fields, &[0, 4], 2.0).unwrap();
        // J = 1: pointwise sup over t in [0,4) of |P_t f - P_0 f|
        for x in 0..16 {
            let mut sup = 0.0f64;
            for t in 0..4 {
                sup = sup.max((fields[t][x] - fields[0][x]).norm());
            }
            assert_relative_eq!(osc[x], sup, epsilon = 1e-12);
        }
    }

    #[test]
    fn chain_middle_dominates_oscillation() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..10 {
            let fam = MartingaleFamily::new(6);
            let f = random_signal(64, &mut rng);
            let fields = all_fields(&fam, &f);
            let seq = vec![0, 2, 5];
            let osc = family_oscillation_field(&fields, &seq, 2.0).unwrap();
            let mid = projection_chain_middle(&fam, &f, &seq, 2.0).unwrap();
            for (o, m) in osc.iter().zip(&mid) {
                assert!(*o <= m + 1e-10, "osc {o} > middle {m}");
            }
        }
    }

    #[test]
    fn maximal_function_single_index() {
        let fam = CutoffFamily::with_thresholds(32, vec![3]);
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let f = random_signal(32, &mut rng);
        let maxf = maximal_function(&fam, &f);
        let direct = fourier_cutoff(&f, 3.0).unwrap();
        for (m, v) in maxf.iter().zip(&direct) {
            assert_relative_eq!(*m, v.norm(), epsilon = 1e-12);
        }
    }
}
