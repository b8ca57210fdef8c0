//! Multi-parameter operator families `T_t = T^1_{t_1} ⋯ T^k_{t_k}` built
//! from commuting one-parameter factors acting along the axes of a shared
//! finite model space, together with the product telescoping identity
//! `T_n f − T_{I} f = Σ_m T^{(m)} (T^m_{n_m} − T^m_{I_m}) f` that drives the
//! multi-parameter oscillation estimates, and a desk-scale convergence probe
//! for product polynomial averages.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{
    multiparam_average, IntPolynomial, LatticeFunction, OneParamAverage, Space,
};
use crate::projections::{fourier_cutoff, martingale_projection, smooth_dilate_multiplier};
use crate::rat::{rat_int, Rat};

/// A function on a product model space `Π_a {0..shape[a]−1}` with normalized
/// counting measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(shape: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.iter().product::<usize>() {
            return Err(Error::DimensionMismatch(format!(
                "field of shape {:?} needs {} values, got {}",
                shape,
                shape.iter().product::<usize>(),
                values.len()
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            values: vec![Complex64::default(); len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_p(&self, p: f64) -> f64 {
        let mean = self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / self.len() as f64;
        mean.powf(1.0 / p)
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch("field shapes differ".into()));
        }
        Ok(Self {
            shape: self.shape.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch("field shapes differ".into()));
        }
        Ok(Self {
            shape: self.shape.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm_inf())
    }

    /// Applies a 1-D transform to every line along `axis`.
    pub fn map_axis(&self, axis: usize, op: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Self {
        let n = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut out = self.clone();
        let mut line = vec![Complex64::default(); n];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * n * inner + i;
                for (k, l) in line.iter_mut().enumerate() {
                    *l = self.values[base + k * inner];
                }
                let mapped = op(&line);
                for (k, v) in mapped.iter().enumerate() {
                    out.values[base + k * inner] = *v;
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Axis factors
// ---------------------------------------------------------------------------

/// A one-parameter operator family acting along one axis of the model space.
pub trait AxisFactor {
    fn axis(&self) -> usize;
    /// The factor's index set `𝕀`, ascending.
    fn indices(&self) -> &[Rat];
    fn apply(&self, pos: usize, f: &Field) -> Field;
    fn name(&self) -> &'static str;
    /// True for identity factors (used to degenerate to fewer parameters).
    fn is_identity(&self) -> bool {
        false
    }
    /// True when the operators have positive kernels, so the lattice
    /// maximal satisfies `|T| g = T |g|`.
    fn is_positive(&self) -> bool {
        false
    }
}

/// The identity family: every index maps to the identity operator.
pub struct IdentityFactor {
    indices: Vec<Rat>,
}

impl IdentityFactor {
    pub fn new(index_count: usize) -> Self {
        Self {
            indices: (0..index_count).map(|i| rat_int(i as i64)).collect(),
        }
    }
}

impl AxisFactor for IdentityFactor {
    fn axis(&self) -> usize {
        0
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, _pos: usize, f: &Field) -> Field {
        f.clone()
    }

    fn name(&self) -> &'static str {
        "identity"
    }

    fn is_identity(&self) -> bool {
        true
    }

    fn is_positive(&self) -> bool {
        true
    }
}

/// Polynomial ergodic averages `A^P_M` along one cyclic axis, indexed by the
/// box edge `M`; the axis shift step defaults to `−1` (`T x = x − e_axis`).
pub struct AverageAxisFactor {
    axis: usize,
    modulus: usize,
    m_values: Vec<u64>,
    indices: Vec<Rat>,
    /// per-M orbit kernel: residue offset ↦ multiplicity
    kernels: Vec<Vec<(usize, f64)>>,
}

impl AverageAxisFactor {
    pub fn new(
        axis: usize,
        modulus: usize,
        polynomial: &IntPolynomial,
        m_values: Vec<u64>,
        shift_step: i64,
    ) -> Result<Self> {
        if polynomial.num_vars() != 1 {
            return Err(Error::ArityMismatch {
                poly: polynomial.num_vars(),
                point: 1,
            });
        }
        use num_traits::ToPrimitive;
        let n = modulus as i64;
        let mut kernels = Vec::with_capacity(m_values.len());
        for &m in &m_values {
            let mut counts = std::collections::BTreeMap::new();
            for step in 1..=m {
                let val = polynomial.eval_big(&[step as i64])?;
                let residue = {
                    let r = val * num_bigint::BigInt::from(shift_step);
                    let mut r = r % num_bigint::BigInt::from(n);
                    if r < num_bigint::BigInt::from(0) {
                        r += num_bigint::BigInt::from(n);
                    }
                    r.to_i64().expect("reduced residue fits i64") as usize
                };
                *counts.entry(residue).or_insert(0u64) += 1;
            }
            let weight = 1.0 / m as f64;
            kernels.push(
                counts
                    .into_iter()
                    .map(|(o, c)| (o, c as f64 * weight))
                    .collect(),
            );
        }
        let indices = m_values.iter().map(|&m| rat_int(m as i64)).collect();
        Ok(Self {
            axis,
            modulus,
            m_values,
            indices,
            kernels,
        })
    }

    pub fn m_values(&self) -> &[u64] {
        &self.m_values
    }
}

impl AxisFactor for AverageAxisFactor {
    fn axis(&self) -> usize {
        self.axis
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &Field) -> Field {
        let kernel = &self.kernels[pos];
        let n = self.modulus;
        f.map_axis(self.axis, |line| {
            let mut out = vec![Complex64::default(); line.len()];
            for &(offset, weight) in kernel {
                for (x, o) in out.iter_mut().enumerate() {
                    let idx = x + offset;
                    let idx = if idx >= n { idx - n } else { idx };
                    *o += line[idx] * weight;
                }
            }
            out
        })
    }

    fn name(&self) -> &'static str {
        "average"
    }

    fn is_positive(&self) -> bool {
        true
    }
}

/// Dyadic martingale conditional expectations along one axis.
pub struct MartingaleAxisFactor {
    axis: usize,
    k_depth: u32,
    levels: Vec<u32>,
    indices: Vec<Rat>,
}

impl MartingaleAxisFactor {
    pub fn new(axis: usize, k_depth: u32) -> Self {
        let levels: Vec<u32> = (0..=k_depth).collect();
        let indices = levels.iter().map(|&l| rat_int(l as i64)).collect();
        Self {
            axis,
            k_depth,
            levels,
            indices,
        }
    }
}

impl AxisFactor for MartingaleAxisFactor {
    fn axis(&self) -> usize {
        self.axis
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &Field) -> Field {
        let level = self.levels[pos];
        let k = self.k_depth;
        f.map_axis(self.axis, |line| {
            martingale_projection(line, level, k).expect("axis length is 2^K")
        })
    }

    fn name(&self) -> &'static str {
        "martingale"
    }

    fn is_positive(&self) -> bool {
        true
    }
}

/// Sharp Fourier cutoffs along one cyclic axis.
pub struct CutoffAxisFactor {
    axis: usize,
    thresholds: Vec<u64>,
    indices: Vec<Rat>,
}

impl CutoffAxisFactor {
    pub fn new(axis: usize, thresholds: Vec<u64>) -> Self {
        let indices = thresholds.iter().map(|&t| rat_int(t as i64)).collect();
        Self {
            axis,
            thresholds,
            indices,
        }
    }
}

impl AxisFactor for CutoffAxisFactor {
    fn axis(&self) -> usize {
        self.axis
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &Field) -> Field {
        let t = self.thresholds[pos] as f64;
        f.map_axis(self.axis, |line| {
            fourier_cutoff(line, t).expect("nonnegative threshold")
        })
    }

    fn name(&self) -> &'static str {
        "cutoff"
    }
}

/// Smooth dilated bump multipliers along one cyclic axis.
pub struct SmoothAxisFactor {
    axis: usize,
    levels: Vec<i32>,
    indices: Vec<Rat>,
}

impl SmoothAxisFactor {
    pub fn new(axis: usize, levels: Vec<i32>) -> Self {
        let indices = levels.iter().map(|&l| rat_int(l as i64)).collect();
        Self {
            axis,
            levels,
            indices,
        }
    }
}

impl AxisFactor for SmoothAxisFactor {
    fn axis(&self) -> usize {
        self.axis
    }

    fn indices(&self) -> &[Rat] {
        &self.indices
    }

    fn apply(&self, pos: usize, f: &Field) -> Field {
        let level = self.levels[pos];
        f.map_axis(self.axis, |line| smooth_dilate_multiplier(line, level))
    }

    fn name(&self) -> &'static str {
        "smooth-bump"
    }
}

// ---------------------------------------------------------------------------
// Composed families
// ---------------------------------------------------------------------------

/// `T_t = T^1_{t_1} ⋯ T^k_{t_k}` for commuting factors (`T^k` acts first).
pub struct ComposedFamily {
    factors: Vec<Box<dyn AxisFactor>>,
    shape: Vec<usize>,
}

pub const COMMUTATION_TOL: f64 = 1e-12;

impl ComposedFamily {
    pub fn new(factors: Vec<Box<dyn AxisFactor>>, shape: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Malformed("composed family needs factors".into()));
        }
        for f in &factors {
            if !f.is_identity() && f.axis() >= shape.len() {
                return Err(Error::DimensionMismatch(format!(
                    "factor axis {} outside shape {:?}",
                    f.axis(),
                    shape
                )));
            }
        }
        Ok(Self { factors, shape })
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn factor(&self, i: usize) -> &dyn AxisFactor {
        self.factors[i].as_ref()
    }

    pub fn index_counts(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.indices().len()).collect()
    }

    fn check_positions(&self, positions: &[usize]) -> Result<()> {
        if positions.len() != self.k() {
            return Err(Error::ParameterMismatch {
                expected: self.k(),
                got: positions.len(),
            });
        }
        for (f, &p) in self.factors.iter().zip(positions) {
            if p >= f.indices().len() {
                return Err(Error::ProjectionIndexRange(p, f.indices().len()));
            }
        }
        Ok(())
    }

    /// Applies `T_t` at per-factor index positions, last factor first.
    pub fn apply(&self, positions: &[usize], f: &Field) -> Result<Field> {
        self.check_positions(positions)?;
        let mut cur = f.clone();
        for (factor, &pos) in self.factors.iter().zip(positions).rev() {
            cur = factor.apply(pos, &cur);
        }
        Ok(cur)
    }

    /// Largest commutation defect `‖T^i_s T^j_t f − T^j_t T^i_s f‖_∞` over
    /// seeded random probes.
    pub fn commutation_residual(&self, f: &Field, probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.k();
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let i = rng.random_range(0..k);
            let j = rng.random_range(0..k);
            if i == j {
                continue;
            }
            let s = rng.random_range(0..self.factors[i].indices().len());
            let t = rng.random_range(0..self.factors[j].indices().len());
            let ij = self.factors[i].apply(s, &self.factors[j].apply(t, f));
            let ji = self.factors[j].apply(t, &self.factors[i].apply(s, f));
            worst = worst.max(ij.max_abs_diff(&ji).expect("same shape"));
        }
        worst
    }

    /// Aborts with a diagnostic when factors fail to commute on probes.
    pub fn verify_commutation(&self, f: &Field, probes: usize, seed: u64) -> Result<()> {
        let worst = self.commutation_residual(f, probes, seed);
        if worst > COMMUTATION_TOL {
            return Err(Error::NonCommutingFactors(worst, COMMUTATION_TOL));
        }
        Ok(())
    }

    /// Visits `T_t f` for every `t` in the full index grid, memoizing
    /// partial compositions (the suffix `T^{i+1}…T^k f` is reused while
    /// positions `t_{i+1}, …, t_k` are unchanged).
    pub fn sweep(&self, f: &Field, visit: &mut dyn FnMut(&[usize], &Field)) -> Result<()> {
        let mut positions = vec![0usize; self.k()];
        self.sweep_rec(self.k(), f, &mut positions, visit);
        Ok(())
    }

    fn sweep_rec(
        &self,
        depth: usize,
        partial: &Field,
        positions: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize], &Field),
    ) {
        if depth == 0 {
            visit(positions, partial);
            return;
        }
        let factor = &self.factors[depth - 1];
        for pos in 0..factor.indices().len() {
            positions[depth - 1] = pos;
            let next = factor.apply(pos, partial);
            self.sweep_rec(depth - 1, &next, positions, visit);
        }
    }
}

// ---------------------------------------------------------------------------
// The product telescoping identity
// ---------------------------------------------------------------------------

/// Checks `T_n f − T_I f = Σ_m T^{(m)}_{n(m,n,I)} (T^m_{n_m} − T^m_{I_m}) f`
/// where `T^{(m)}` omits factor `m` and takes axes before `m` at `n`, axes
/// after `m` at `I`. Returns the max pointwise deviation. Requires `I ⪯ n`.
pub fn telescoping_identity_check(
    fam: &ComposedFamily,
    n_pos: &[usize],
    i_pos: &[usize],
    f: &Field,
) -> Result<f64> {
    fam.check_positions(n_pos)?;
    fam.check_positions(i_pos)?;
    if !i_pos.iter().zip(n_pos).all(|(a, b)| a <= b) {
        return Err(Error::NotBelowTarget);
    }
    let lhs = fam.apply(n_pos, f)?.sub(&fam.apply(i_pos, f)?)?;
    let mut rhs = Field::zeros(f.shape().to_vec());
    for m in 0..fam.k() {
        let factor = fam.factor(m);
        let delta = factor
            .apply(n_pos[m], f)
            .sub(&factor.apply(i_pos[m], f))?;
        let mut cur = delta;
        for q in (0..fam.k()).rev() {
            if q == m {
                continue;
            }
            let pos = if q < m { n_pos[q] } else { i_pos[q] };
            cur = fam.factor(q).apply(pos, &cur);
        }
        rhs = rhs.add(&cur)?;
    }
    lhs.max_abs_diff(&rhs)
}

/// Pointwise gap of the box estimate behind the telescoping identity:
/// `sup_{n ∈ 𝔹[I_j]} |T_n f − T_{I_j} f|`
/// `  ≤ Σ_m max_{ñ} T^{(m)}_{ñ} ( sup_{n_m ∈ [I_{jm}, I_{(j+1)m})} |T^m_{n_m} f − T^m_{I_{jm}} f| )`.
/// Valid for positive factors, where the lattice maximal satisfies
/// `|T| g = T |g|`. Returns `max_x (lhs − rhs)`, expected ≤ tolerance.
pub fn proof_chain_gap(
    fam: &ComposedFamily,
    lo_pos: &[usize],
    hi_pos: &[usize],
    f: &Field,
) -> Result<f64> {
    fam.check_positions(lo_pos)?;
    fam.check_positions(hi_pos)?;
    if !lo_pos.iter().zip(hi_pos).all(|(a, b)| a < b) {
        return Err(Error::NotBelowTarget);
    }
    if !(0..fam.k()).all(|m| fam.factor(m).is_positive()) {
        return Err(Error::Malformed(
            "proof-chain gap needs positive factors".into(),
        ));
    }
    let size = f.len();
    let base = fam.apply(lo_pos, f)?;

    // lhs: sup over the box of |T_n f − T_lo f|
    let mut lhs = vec![0.0f64; size];
    let mut n = lo_pos.to_vec();
    loop {
        let val = fam.apply(&n, f)?;
        for (l, (v, b)) in lhs.iter_mut().zip(val.values().iter().zip(base.values())) {
            *l = l.max((v - b).norm());
        }
        // odometer over the box Π [lo_m, hi_m)
        let mut axis = fam.k();
        let mut done = true;
        while axis > 0 {
            axis -= 1;
            if n[axis] + 1 < hi_pos[axis] {
                n[axis] += 1;
                done = false;
                break;
            }
            n[axis] = lo_pos[axis];
        }
        if done {
            break;
        }
    }

    // rhs: Σ_m (max over other-axis indices of T^{(m)} applied to the
    // axis-m block increment field)
    let mut rhs = vec![0.0f64; size];
    for m in 0..fam.k() {
        let factor = fam.factor(m);
        let base_m = factor.apply(lo_pos[m], f);
        let mut increment = vec![0.0f64; size];
        for pos in lo_pos[m]..hi_pos[m] {
            let val = factor.apply(pos, f);
            for (g, (v, b)) in increment
                .iter_mut()
                .zip(val.values().iter().zip(base_m.values()))
            {
                *g = g.max((v - b).norm());
            }
        }
        let g_field = Field::new(
            f.shape().to_vec(),
            increment
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        )?;
        // sup over all index choices of the remaining positive factors
        let mut sup = vec![0.0f64; size];
        let others: Vec<usize> = (0..fam.k()).filter(|&q| q != m).collect();
        let mut choice = vec![0usize; others.len()];
        loop {
            let mut cur = g_field.clone();
            for (ci, &q) in others.iter().enumerate().rev() {
                cur = fam.factor(q).apply(choice[ci], &cur);
            }
            for (s, v) in sup.iter_mut().zip(cur.values()) {
                *s = s.max(v.re);
            }
            let mut axis = others.len();
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                if choice[axis] + 1 < fam.factor(others[axis]).indices().len() {
                    choice[axis] += 1;
                    done = false;
                    break;
                }
                choice[axis] = 0;
            }
            if done || others.is_empty() {
                break;
            }
        }
        for (r, s) in rhs.iter_mut().zip(&sup) {
            *r += s;
        }
    }

    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(l, r)| l - r)
        .fold(f64::NEG_INFINITY, f64::max))
}

// ---------------------------------------------------------------------------
// Multi-parameter oscillation of composed families
// ---------------------------------------------------------------------------

/// Pointwise multi-parameter oscillation of `(T_t f : t ∈ 𝕀^k)` along an
/// increasing sequence of position tuples, plus its `L^p` norms.
#[derive(Debug, Clone)]
pub struct OscillationField {
    pub pointwise: Vec<f64>,
    pub norm_l2: f64,
    pub block_count: usize,
}

pub fn multiparam_oscillation(
    fam: &ComposedFamily,
    f: &Field,
    seq_positions: &[Vec<usize>],
    r: f64,
) -> Result<OscillationField> {
    if !(r >= 1.0) {
        return Err(Error::ExponentRange(r));
    }
    if seq_positions.len() < 2 {
        return Err(Error::SequenceTooShort);
    }
    for entry in seq_positions {
        fam.check_positions(entry)?;
    }
    if seq_positions
        .windows(2)
        .any(|w| !w[0].iter().zip(&w[1]).all(|(a, b)| a < b))
    {
        return Err(Error::NotStrictlyIncreasing);
    }
    let blocks = seq_positions.len() - 1;
    if blocks > 64 {
        return Err(Error::Malformed("more than 64 blocks per sweep".into()));
    }
    let size = f.len();
    // per-axis block-membership bitmasks
    let k = fam.k();
    let mut axis_masks: Vec<Vec<u64>> = Vec::with_capacity(k);
    for axis in 0..k {
        let count = fam.factor(axis).indices().len();
        let mut masks = vec![0u64; count];
        for (pos, m) in masks.iter_mut().enumerate() {
            for j in 0..blocks {
                if seq_positions[j][axis] <= pos && pos < seq_positions[j + 1][axis] {
                    *m |= 1 << j;
                }
            }
        }
        axis_masks.push(masks);
    }
    let bases: Vec<Field> = seq_positions
        .iter()
        .take(blocks)
        .map(|entry| fam.apply(entry, f))
        .collect::<Result<_>>()?;
    let mut sups = vec![vec![0.0f64; size]; blocks];
    fam.sweep(f, &mut |positions, field| {
        let mut mask = u64::MAX;
        for (axis, &pos) in positions.iter().enumerate() {
            mask &= axis_masks[axis][pos];
            if mask == 0 {
                return;
            }
        }
        let j = mask.trailing_zeros() as usize;
        debug_assert_eq!(mask.count_ones(), 1, "boxes are pairwise disjoint");
        let sup = &mut sups[j];
        let base = bases[j].values();
        // squared-magnitude sups, matching the one-parameter field routine
        for (s, (v, b)) in sup.iter_mut().zip(field.values().iter().zip(base)) {
            *s = s.max((v - b).norm_sqr());
        }
    })?;
    let mut pointwise = vec![0.0f64; size];
    for sup in &sups {
        for (p, s) in pointwise.iter_mut().zip(sup) {
            *p += s.sqrt().powf(r);
        }
    }
    for p in &mut pointwise {
        *p = p.powf(1.0 / r);
    }
    let norm_l2 =
        (pointwise.iter().map(|v| v * v).sum::<f64>() / size as f64).sqrt();
    Ok(OscillationField {
        pointwise,
        norm_l2,
        block_count: blocks,
    })
}

// ---------------------------------------------------------------------------
// Convergence probe for product polynomial averages
// ---------------------------------------------------------------------------

/// Report of a pointwise-convergence probe along a box schedule.
#[derive(Debug, Clone)]
pub struct DzProbeReport {
    /// `sup_x |A_M f(x) − mean f|` per schedule entry.
    pub deviations: Vec<f64>,
    /// Least-squares slope of `log dev` against `log min(M)`; diagnostic
    /// only.
    pub decay_slope: Option<f64>,
    /// First schedule entry from which the snapshots are ε-Cauchy.
    pub certificate_threshold: Option<Vec<u64>>,
    pub certificate_sup: Option<f64>,
}

/// Probes `sup_x |A_M f(x) − mean f|` for a product polynomial average along
/// a coordinatewise increasing schedule of boxes, fits a decay exponent, and
/// emits a Cauchy certificate at scale ε.
pub fn dz_convergence_probe(
    f: &LatticeFunction,
    factors: &[(IntPolynomial, Vec<i64>)],
    schedule: &[Vec<u64>],
    epsilon: f64,
) -> Result<DzProbeReport> {
    if !matches!(f.space(), Space::Cyclic { .. }) {
        return Err(Error::NotCyclic);
    }
    for (poly, _) in factors {
        if !poly.zero_at_origin() {
            return Err(Error::NonzeroAtOrigin);
        }
    }
    if schedule.len() < 2
        || schedule
            .windows(2)
            .any(|w| !w[0].iter().zip(&w[1]).all(|(a, b)| a < b))
    {
        return Err(Error::BadMList);
    }
    let mean = f.mean()?;
    let mean_field = {
        let mut g = f.clone();
        for v in g.values_mut() {
            *v = mean;
        }
        g
    };
    let snapshots: Vec<LatticeFunction> = schedule
        .iter()
        .map(|m| {
            let fs: Vec<OneParamAverage> = factors
                .iter()
                .zip(m)
                .map(|((poly, shift), &mi)| OneParamAverage {
                    polynomial: poly.clone(),
                    m: mi,
                    shift: shift.clone(),
                })
                .collect();
            multiparam_average(f, &fs)
        })
        .collect::<Result<_>>()?;
    let deviations: Vec<f64> = snapshots
        .iter()
        .map(|s| s.max_abs_diff(&mean_field))
        .collect::<Result<_>>()?;
    // log-log least squares on the points with positive deviation
    let pts: Vec<(f64, f64)> = schedule
        .iter()
        .zip(&deviations)
        .filter(|(_, &d)| d > 0.0)
        .map(|(m, &d)| {
            let min_m = *m.iter().min().unwrap() as f64;
            (min_m.ln(), d.ln())
        })
        .collect();
    let decay_slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        (denom.abs() > 1e-12).then(|| (n * sxy - sx * sy) / denom)
    } else {
        None
    };
    // Cauchy certificate over the schedule tail
    let mut certificate_threshold = None;
    let mut certificate_sup = None;
    for start in 0..schedule.len() {
        let tail = &snapshots[start..];
        if tail.len() < 2 {
            break;
        }
        let mut sup = 0.0f64;
        for (ai, a) in tail.iter().enumerate() {
            for b in tail.iter().skip(ai + 1) {
                sup = sup.max(a.max_abs_diff(b)?);
            }
        }
        if sup <= epsilon {
            certificate_threshold = Some(schedule[start].clone());
            certificate_sup = Some(sup);
            break;
        }
    }
    Ok(DzProbeReport {
        deviations,
        decay_slope,
        certificate_threshold,
        certificate_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{all_fields, family_oscillation_field, MartingaleFamily};
    use approx::assert_relative_eq;

    fn random_field(shape: Vec<usize>, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len: usize = shape.iter().product();
        let values = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field::new(shape, values).unwrap()
    }

    fn average_pair(n: usize, m_values: Vec<u64>, deg0: u32, deg1: u32) -> ComposedFamily {
        let p0 = IntPolynomial::univariate(deg0);
        let p1 = IntPolynomial::univariate(deg1);
        let f0 = AverageAxisFactor::new(0, n, &p0, m_values.clone(), -1).unwrap();
        let f1 = AverageAxisFactor::new(1, n, &p1, m_values, -1).unwrap();
        ComposedFamily::new(vec![Box::new(f0), Box::new(f1)], vec![n, n]).unwrap()
    }

    #[test]
    fn identity_factor_reduces_to_one_parameter() {
        let n = 16;
        let f = random_field(vec![n], 1);
        let mart = MartingaleAxisFactor::new(0, 4);
        let identity = IdentityFactor::new(5);
        let fam =
            ComposedFamily::new(vec![Box::new(mart), Box::new(identity)], vec![n]).unwrap();
        let one = MartingaleAxisFactor::new(0, 4);
        for t in 0..5 {
            for u in 0..5 {
                let composed = fam.apply(&[t, u], &f).unwrap();
                let direct = one.apply(t, &f);
                assert_eq!(composed, direct);
            }
        }
    }

    #[test]
    fn composed_averages_match_lattice_double_sum() {
        let n = 13usize;
        let field = random_field(vec![n, n], 2);
        let lattice_f =
            LatticeFunction::cyclic_from_values(2, n, field.values().to_vec()).unwrap();
        let fam = average_pair(n, vec![2, 3, 5], 1, 2);
        for (t, u) in [(0usize, 1usize), (2, 0), (1, 1)] {
            let composed = fam.apply(&[t, u], &field).unwrap();
            let factors = vec![
                OneParamAverage {
                    polynomial: IntPolynomial::univariate(1),
                    m: [2u64, 3, 5][t],
                    shift: vec![-1, 0],
                },
                OneParamAverage {
                    polynomial: IntPolynomial::univariate(2),
                    m: [2u64, 3, 5][u],
                    shift: vec![0, -1],
                },
            ];
            let direct = crate::lattice::multiparam_average_direct(&lattice_f, &factors).unwrap();
            let max = composed
                .values()
                .iter()
                .zip(direct.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            assert!(max < 1e-12, "composed vs direct deviation {max}");
        }
    }

    #[test]
    fn factors_commute_on_probes() {
        let fam = average_pair(11, vec![1, 2, 4], 2, 3);
        let f = random_field(vec![11, 11], 3);
        assert!(fam.commutation_residual(&f, 40, 9) < 1e-13);
        fam.verify_commutation(&f, 40, 9).unwrap();
    }

    #[test]
    fn telescoping_identity_on_builtins() {
        // vacuous case n = I
        let fam = average_pair(11, vec![1, 2, 4], 1, 2);
        let f = random_field(vec![11, 11], 4);
        assert_eq!(telescoping_identity_check(&fam, &[1, 1], &[1, 1], &f).unwrap(), 0.0);

        // martingale x martingale on (2^6)^2 atoms
        let m0 = MartingaleAxisFactor::new(0, 6);
        let m1 = MartingaleAxisFactor::new(1, 6);
        let mm = ComposedFamily::new(vec![Box::new(m0), Box::new(m1)], vec![64, 64]).unwrap();
        let g = random_field(vec![64, 64], 5);
        let dev = telescoping_identity_check(&mm, &[5, 4], &[2, 1], &g).unwrap();
        assert!(dev < 1e-12, "martingale telescoping deviation {dev}");

        // polynomial averages on a cyclic square
        let pa = average_pair(31, vec![1, 3, 7, 9], 1, 2);
        let h = random_field(vec![31, 31], 6);
        let dev2 = telescoping_identity_check(&pa, &[3, 2], &[1, 0], &h).unwrap();
        assert!(dev2 < 1e-11, "average telescoping deviation {dev2}");

        // precondition: I must sit below n
        assert!(matches!(
            telescoping_identity_check(&pa, &[1, 1], &[2, 0], &h),
            Err(Error::NotBelowTarget)
        ));
    }

    #[test]
    fn oscillation_vanishes_for_constant_families() {
        // identity factors: T_t f = f for all t
        let id0 = IdentityFactor::new(4);
        let id1 = IdentityFactor::new(4);
        let fam = ComposedFamily::new(vec![Box::new(id0), Box::new(id1)], vec![9]).unwrap();
        let f = random_field(vec![9], 7);
        let osc = multiparam_oscillation(
            &fam,
            &f,
            &[vec![0, 0], vec![1, 2], vec![3, 3]],
            2.0,
        )
        .unwrap();
        assert_eq!(osc.norm_l2, 0.0);
    }

    #[test]
    fn oscillation_vanishes_for_invariant_functions() {
        // constant function is shift invariant: averages do not move it
        let n = 11;
        let fam = average_pair(n, vec![1, 2, 4, 8], 1, 3);
        let f = Field::new(vec![n, n], vec![Complex64::new(0.7, 0.0); n * n]).unwrap();
        let osc = multiparam_oscillation(
            &fam,
            &f,
            &[vec![0, 0], vec![2, 1], vec![3, 3]],
            2.0,
        )
        .unwrap();
        assert!(osc.norm_l2 < 1e-14);
    }

    #[test]
    fn degeneration_is_bit_exact() {
        // one live martingale factor plus an identity factor reproduces the
        // one-parameter oscillation field bit for bit
        let k_depth = 5u32;
        let n = 1usize << k_depth;
        let field = random_field(vec![n], 8);
        let live = MartingaleAxisFactor::new(0, k_depth);
        let identity = IdentityFactor::new(k_depth as usize + 1);
        let fam =
            ComposedFamily::new(vec![Box::new(live), Box::new(identity)], vec![n]).unwrap();
        let seq2: Vec<Vec<usize>> = vec![vec![0, 0], vec![2, 2], vec![4, 4], vec![5, 5]];
        let multi = multiparam_oscillation(&fam, &field, &seq2, 2.0).unwrap();

        let one_param = MartingaleFamily::new(k_depth);
        let fields = all_fields(&one_param, field.values());
        let single = family_oscillation_field(&fields, &[0, 2, 4, 5], 2.0).unwrap();
        assert_eq!(multi.pointwise, single);
    }

    #[test]
    fn proof_chain_estimate_holds_pointwise() {
        let fam = average_pair(13, vec![1, 2, 4, 6], 1, 2);
        let f = random_field(vec![13, 13], 10);
        let gap = proof_chain_gap(&fam, &[0, 1], &[3, 3], &f).unwrap();
        assert!(gap <= 1e-10, "proof chain gap {gap}");

        let m0 = MartingaleAxisFactor::new(0, 4);
        let m1 = MartingaleAxisFactor::new(1, 4);
        let mm = ComposedFamily::new(vec![Box::new(m0), Box::new(m1)], vec![16, 16]).unwrap();
        let g = random_field(vec![16, 16], 11);
        let gap2 = proof_chain_gap(&mm, &[0, 0], &[3, 2], &g).unwrap();
        assert!(gap2 <= 1e-10, "martingale proof chain gap {gap2}");
    }

    #[test]
    fn dz_probe_constant_and_character() {
        // constant f: zero deviation at every schedule entry
        let n = 17usize;
        let konst =
            LatticeFunction::cyclic_from_values(1, n, vec![Complex64::new(0.4, 0.0); n]).unwrap();
        let factors = vec![(IntPolynomial::univariate(2), vec![-1i64])];
        let rep = dz_convergence_probe(
            &konst,
            &factors,
            &[vec![4], vec![8], vec![16]],
            1e-12,
        )
        .unwrap();
        assert!(rep.deviations.iter().all(|&d| d < 1e-14));
        assert_eq!(rep.certificate_threshold, Some(vec![4]));

        // nontrivial character with squares over a full period: the exact
        // normalized quadratic character sum magnitude N^{-1/2}
        let nn = 101usize;
        let character: Vec<Complex64> = (0..nn)
            .map(|x| {
                Complex64::new(0.0, 2.0 * std::f64::consts::PI * x as f64 / nn as f64).exp()
            })
            .collect();
        let f = LatticeFunction::cyclic_from_values(1, nn, character).unwrap();
        let rep2 = dz_convergence_probe(
            &f,
            &factors,
            &[vec![nn as u64 / 2], vec![nn as u64]],
            1.0,
        )
        .unwrap();
        assert_relative_eq!(
            rep2.deviations[1],
            (nn as f64).powf(-0.5),
            epsilon = 1e-10
        );
    }

    #[test]
    fn dz_probe_rejects_nonvanishing_polynomials() {
        let n = 17usize;
        let f = LatticeFunction::cyclic_from_values(1, n, vec![Complex64::default(); n]).unwrap();
        let bad = IntPolynomial::new(1, vec![(vec![0], 1), (vec![1], 1)]).unwrap();
        assert!(matches!(
            dz_convergence_probe(&f, &[(bad, vec![-1])], &[vec![2], vec![4]], 0.1),
            Err(Error::NonzeroAtOrigin)
        ));
    }

    #[test]
    fn sweep_visits_full_grid_with_suffix_reuse() {
        let fam = average_pair(7, vec![1, 2], 1, 2);
        let f = random_field(vec![7, 7], 12);
        let mut seen = Vec::new();
        fam.sweep(&f, &mut |positions, field| {
            // spot-check against a fresh application
            let direct = fam.apply(positions, &f).unwrap();
            assert!(field.max_abs_diff(&direct).unwrap() < 1e-13);
            seen.push(positions.to_vec());
        })
        .unwrap();
        assert_eq!(seen.len(), 4);
    }
}
