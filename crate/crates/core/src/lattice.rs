//! Discrete measure-preserving systems and polynomial ergodic averages.
//!
//! Two spatial backends: the integer lattice `ℤ^d` with counting measure
//! (finitely supported functions, the canonical transference model) and the
//! cyclic group `ℤ_N^d` with normalized counting measure (exactly
//! measure-preserving invertible dynamics on a finite probability space).
//! Shifts act as `T x = x + v`; the default transformations are the
//! coordinate shifts `S_j x = x − e_j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::dft;
use crate::error::{Error, Result};
use crate::family::ParamFamily;
use crate::rat::rat_int;

/// Guard against runaway averaging boxes.
const BOX_CAP: usize = 1 << 24;

// ---------------------------------------------------------------------------
// Integer polynomials
// ---------------------------------------------------------------------------

/// A multivariate polynomial with integer coefficients, evaluated exactly in
/// arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl IntPolynomial {
    pub fn new<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, i64)>,
    {
        let mut map = BTreeMap::new();
        for (expo, coeff) in terms {
            if expo.len() != num_vars {
                return Err(Error::ArityMismatch {
                    poly: num_vars,
                    point: expo.len(),
                });
            }
            if coeff != 0 {
                *map.entry(expo).or_insert(0) += coeff;
            }
        }
        map.retain(|_, c| *c != 0);
        Ok(Self {
            num_vars,
            terms: map,
        })
    }

    /// The monomial `m_var^degree` in `num_vars` variables.
    pub fn monomial(num_vars: usize, var: usize, degree: u32) -> Self {
        let mut expo = vec![0u32; num_vars];
        expo[var] = degree;
        let mut terms = BTreeMap::new();
        terms.insert(expo, 1i64);
        Self { num_vars, terms }
    }

    /// The univariate monomial `m^degree`.
    pub fn univariate(degree: u32) -> Self {
        Self::monomial(1, 0, degree)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// True when the constant term vanishes (`P(0) = 0`).
    pub fn zero_at_origin(&self) -> bool {
        !self.terms.contains_key(&vec![0u32; self.num_vars])
    }

    /// Re-embeds a univariate polynomial as variable `var` of `k` variables.
    pub fn lift(&self, k: usize, var: usize) -> Result<Self> {
        if self.num_vars != 1 || var >= k {
            return Err(Error::ArityMismatch {
                poly: self.num_vars,
                point: k,
            });
        }
        let terms: Vec<(Vec<u32>, i64)> = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut expo = vec![0u32; k];
                expo[var] = e[0];
                (expo, c)
            })
            .collect();
        Self::new(k, terms)
    }

    /// Exact evaluation at an integer point.
    pub fn eval_big(&self, point: &[i64]) -> Result<BigInt> {
        if point.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                poly: self.num_vars,
                point: point.len(),
            });
        }
        let mut acc = BigInt::zero();
        for (expo, &coeff) in &self.terms {
            let mut term = BigInt::from(coeff);
            for (e, &m) in expo.iter().zip(point) {
                if *e > 0 {
                    term *= BigInt::from(m).pow(*e);
                }
            }
            acc += term;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Lattice functions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// `ℤ^d` with counting measure; functions are finitely supported.
    Lattice { dim: usize },
    /// `ℤ_N^d` with normalized counting measure.
    Cyclic { dim: usize, modulus: usize },
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Lattice { dim } | Space::Cyclic { dim, .. } => *dim,
        }
    }

    pub fn modulus(&self) -> Option<usize> {
        match self {
            Space::Cyclic { modulus, .. } => Some(*modulus),
            Space::Lattice { .. } => None,
        }
    }
}

/// A finitely supported function on `ℤ^d`, or a function on `ℤ_N^d`, stored
/// densely over a bounding box (the full torus in the cyclic case).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    space: Space,
    lo: Vec<i64>,
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl LatticeFunction {
    pub fn zero_cyclic(dim: usize, modulus: usize) -> Self {
        Self {
            space: Space::Cyclic { dim, modulus },
            lo: vec![0; dim],
            shape: vec![modulus; dim],
            values: vec![Complex64::default(); modulus.pow(dim as u32)],
        }
    }

    pub fn cyclic_from_values(dim: usize, modulus: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != modulus.pow(dim as u32) {
            return Err(Error::DimensionMismatch(format!(
                "cyclic space needs {} values, got {}",
                modulus.pow(dim as u32),
                values.len()
            )));
        }
        Ok(Self {
            space: Space::Cyclic { dim, modulus },
            lo: vec![0; dim],
            shape: vec![modulus; dim],
            values,
        })
    }

    /// Builds a finitely supported lattice function from point samples.
    pub fn lattice_from_points(dim: usize, points: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Malformed("empty lattice support".into()));
        }
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for (p, _) in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point arity {} vs dim {}",
                    p.len(),
                    dim
                )));
            }
            for a in 0..dim {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let shape: Vec<usize> = (0..dim).map(|a| (hi[a] - lo[a] + 1) as usize).collect();
        let mut out = Self {
            space: Space::Lattice { dim },
            values: vec![Complex64::default(); shape.iter().product()],
            lo,
            shape,
        };
        for (p, v) in points {
            let idx = out.flat_index_unchecked(p);
            out.values[idx] += v;
        }
        Ok(out)
    }

    /// The Dirac delta at a lattice point.
    pub fn delta(dim: usize, point: &[i64]) -> Result<Self> {
        Self::lattice_from_points(dim, &[(point.to_vec(), Complex64::new(1.0, 0.0))])
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    fn flat_index_unchecked(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        for a in 0..x.len() {
            let c = match self.space {
                Space::Cyclic { modulus, .. } => x[a].rem_euclid(modulus as i64) as usize,
                Space::Lattice { .. } => (x[a] - self.lo[a]) as usize,
            };
            idx = idx * self.shape[a] + c;
        }
        idx
    }

    /// Value at a point; zero outside the stored box in the lattice case,
    /// wrapped in the cyclic case.
    pub fn get(&self, x: &[i64]) -> Complex64 {
        match self.space {
            Space::Cyclic { .. } => self.values[self.flat_index_unchecked(x)],
            Space::Lattice { .. } => {
                for a in 0..x.len() {
                    if x[a] < self.lo[a] || x[a] >= self.lo[a] + self.shape[a] as i64 {
                        return Complex64::default();
                    }
                }
                self.values[self.flat_index_unchecked(x)]
            }
        }
    }

    /// Iterates `(coordinates, value)` over the stored box.
    pub fn iter_points(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        let dim = self.dim();
        (0..self.values.len()).map(move |flat| {
            let mut rem = flat;
            let mut coords = vec![0i64; dim];
            for a in (0..dim).rev() {
                coords[a] = self.lo[a] + (rem % self.shape[a]) as i64;
                rem /= self.shape[a];
            }
            (coords, self.values[flat])
        })
    }

    /// `f ∘ T^p` for the shift `T x = x + v`, i.e. `x ↦ f(x + p·v)`.
    pub fn compose_shift(&self, v: &[i64], p: i64) -> Result<Self> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "shift arity {} vs dim {}",
                v.len(),
                self.dim()
            )));
        }
        let offset: Vec<i64> = v.iter().map(|c| c * p).collect();
        match self.space {
            Space::Lattice { .. } => {
                // supported where x + o lies in the old box
                let lo: Vec<i64> = self.lo.iter().zip(&offset).map(|(l, o)| l - o).collect();
                Ok(Self {
                    space: self.space,
                    lo,
                    shape: self.shape.clone(),
                    values: self.values.clone(),
                })
            }
            Space::Cyclic { .. } => {
                let mut out = self.clone();
                for (x, _) in self.iter_points() {
                    let shifted: Vec<i64> = x.iter().zip(&offset).map(|(c, o)| c + o).collect();
                    let idx = out.flat_index_unchecked(&x);
                    out.values[idx] = self.get(&shifted);
                }
                Ok(out)
            }
        }
    }

    fn measure_weight(&self) -> f64 {
        match self.space {
            Space::Lattice { .. } => 1.0,
            Space::Cyclic { .. } => 1.0 / self.values.len() as f64,
        }
    }

    /// `L^p` norm under the space's measure (counting on the lattice,
    /// normalized on cyclic groups).
    pub fn norm_p(&self, p: f64) -> f64 {
        let w = self.measure_weight();
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * w).powf(1.0 / p)
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Integral against the space's measure.
    pub fn integral(&self) -> Complex64 {
        let w = self.measure_weight();
        self.values.iter().sum::<Complex64>() * w
    }

    /// Mean against the normalized measure (cyclic only).
    pub fn mean(&self) -> Result<Complex64> {
        match self.space {
            Space::Cyclic { .. } => Ok(self.integral()),
            Space::Lattice { .. } => Err(Error::NotCyclic),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a - b)
    }

    fn binop(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch("mismatched spaces".into()));
        }
        match self.space {
            Space::Cyclic { .. } => {
                let values = self
                    .values
                    .iter()
                    .zip(&other.values)
                    .map(|(&a, &b)| op(a, b))
                    .collect();
                Ok(Self {
                    space: self.space,
                    lo: self.lo.clone(),
                    shape: self.shape.clone(),
                    values,
                })
            }
            Space::Lattice { dim } => {
                let lo: Vec<i64> = (0..dim).map(|a| self.lo[a].min(other.lo[a])).collect();
                let hi: Vec<i64> = (0..dim)
                    .map(|a| {
                        (self.lo[a] + self.shape[a] as i64)
                            .max(other.lo[a] + other.shape[a] as i64)
                    })
                    .collect();
                let shape: Vec<usize> = (0..dim).map(|a| (hi[a] - lo[a]) as usize).collect();
                let mut out = Self {
                    space: self.space,
                    values: vec![Complex64::default(); shape.iter().product()],
                    lo,
                    shape,
                };
                let coords: Vec<Vec<i64>> = out.iter_points().map(|(c, _)| c).collect();
                for (flat, x) in coords.iter().enumerate() {
                    out.values[flat] = op(self.get(x), other.get(x));
                }
                Ok(out)
            }
        }
    }

    /// Sup-norm distance, comparing values over the union of the boxes.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm_inf())
    }
}

// ---------------------------------------------------------------------------
// Averages
// ---------------------------------------------------------------------------

/// The data of a multi-parameter polynomial ergodic average
/// `A_M f(x) = 𝔼_{m∈Q_M} f(T_1^{P_1(m)} ⋯ T_d^{P_d(m)} x)` with
/// `Q_M = [M_1]×…×[M_k]`.
#[derive(Debug, Clone)]
pub struct AverageSpec {
    /// The orbit polynomials `P_1, …, P_d`, all in the same `k` variables.
    pub polynomials: Vec<IntPolynomial>,
    /// The box edge lengths `M_1, …, M_k`.
    pub box_m: Vec<u64>,
    /// The shift vectors of the commuting transformations `T_1, …, T_d`
    /// (`T_j x = x + v_j`).
    pub shifts: Vec<Vec<i64>>,
}

impl AverageSpec {
    /// Spec with the default transformations `S_j x = x − e_j`; requires one
    /// polynomial per space dimension.
    pub fn with_coordinate_shifts(
        polynomials: Vec<IntPolynomial>,
        box_m: Vec<u64>,
        dim: usize,
    ) -> Result<Self> {
        let d = polynomials.len();
        if d != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} polynomials for dimension {}",
                d, dim
            )));
        }
        let shifts = (0..d)
            .map(|j| {
                let mut v = vec![0i64; dim];
                v[j] = -1;
                v
            })
            .collect();
        Ok(Self {
            polynomials,
            box_m,
            shifts,
        })
    }

    fn validate(&self, f: &LatticeFunction) -> Result<usize> {
        if self.polynomials.is_empty() || self.polynomials.len() != self.shifts.len() {
            return Err(Error::DimensionMismatch(
                "polynomial and shift counts differ".into(),
            ));
        }
        let k = self.polynomials[0].num_vars();
        for p in &self.polynomials {
            if p.num_vars() != k {
                return Err(Error::ArityMismatch {
                    poly: p.num_vars(),
                    point: k,
                });
            }
        }
        if self.box_m.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "box arity {} vs polynomial arity {}",
                self.box_m.len(),
                k
            )));
        }
        if self.box_m.iter().any(|&m| m == 0) {
            return Err(Error::EmptyBox);
        }
        let size: usize = self
            .box_m
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m as usize))
            .ok_or(Error::EmptyBox)?;
        if size > BOX_CAP {
            return Err(Error::Malformed(format!(
                "averaging box of size {size} exceeds cap {BOX_CAP}"
            )));
        }
        for v in &self.shifts {
            if v.len() != f.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "shift arity {} vs space dim {}",
                    v.len(),
                    f.dim()
                )));
            }
        }
        Ok(size)
    }

    /// The orbit multiset `{Σ_j P_j(m)·v_j : m ∈ Q_M}` as offset ↦ count.
    /// Multiplicity matters: distinct `m` mapping to one orbit point each
    /// carry their own weight in `𝔼_{m∈Q_M}`. Offsets are reduced modulo `N`
    /// on cyclic spaces.
    pub fn orbit_kernel(&self, f: &LatticeFunction) -> Result<BTreeMap<Vec<i64>, u64>> {
        self.validate(f)?;
        let k = self.box_m.len();
        let dim = f.dim();
        let modulus = f.space().modulus();
        let mut kernel: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
        let mut m = vec![1i64; k];
        loop {
            let offset = self.orbit_offset(&m, dim, modulus)?;
            *kernel.entry(offset).or_insert(0) += 1;
            if !advance_odometer(&mut m, &self.box_m) {
                return Ok(kernel);
            }
        }
    }

    fn orbit_offset(&self, m: &[i64], dim: usize, modulus: Option<usize>) -> Result<Vec<i64>> {
        let mut offset_big = vec![BigInt::zero(); dim];
        for (poly, v) in self.polynomials.iter().zip(&self.shifts) {
            let val = poly.eval_big(m)?;
            for a in 0..dim {
                if v[a] != 0 {
                    offset_big[a] += &val * BigInt::from(v[a]);
                }
            }
        }
        let mut offset = vec![0i64; dim];
        for a in 0..dim {
            offset[a] = match modulus {
                Some(n) => {
                    let n_big = BigInt::from(n as i64);
                    let mut r = &offset_big[a] % &n_big;
                    if r.is_negative() {
                        r += &n_big;
                    }
                    r.to_i64().expect("reduced residue fits i64")
                }
                None => offset_big[a].to_i64().ok_or(Error::OrbitOverflow)?,
            };
        }
        Ok(offset)
    }
}

/// Advances `m` through `Q_M` in row-major order; false when exhausted.
fn advance_odometer(m: &mut [i64], box_m: &[u64]) -> bool {
    let mut axis = m.len();
    while axis > 0 {
        axis -= 1;
        if (m[axis] as u64) < box_m[axis] {
            m[axis] += 1;
            return true;
        }
        m[axis] = 1;
    }
    false
}

/// Kahan-compensated complex accumulator field.
struct CompensatedField {
    sum: Vec<Complex64>,
    comp: Vec<Complex64>,
}

impl CompensatedField {
    fn new(len: usize) -> Self {
        Self {
            sum: vec![Complex64::default(); len],
            comp: vec![Complex64::default(); len],
        }
    }

    #[inline]
    fn add(&mut self, idx: usize, v: Complex64) {
        let y = v - self.comp[idx];
        let t = self.sum[idx] + y;
        self.comp[idx] = (t - self.sum[idx]) - y;
        self.sum[idx] = t;
    }
}

/// Exact polynomial ergodic average. The evaluation strategy (direct double
/// sum, sparse orbit-kernel convolution, or FFT convolution on cyclic
/// spaces) is selected by a cost model; all strategies agree to roundoff.
pub fn ergodic_average(f: &LatticeFunction, spec: &AverageSpec) -> Result<LatticeFunction> {
    let box_size = spec.validate(f)?;
    if box_size * f.values().len() <= 4096 {
        return ergodic_average_direct(f, spec);
    }
    let kernel = spec.orbit_kernel(f)?;
    let use_fft = matches!(f.space(), Space::Cyclic { .. })
        && kernel.len() > 4 * (1 + f.values().len().ilog2() as usize);
    if use_fft {
        ergodic_average_fft(f, &kernel, box_size)
    } else {
        ergodic_average_kernel(f, &kernel, box_size)
    }
}

/// The literal double sum `A_M f(x) = 𝔼_{m∈Q_M} f(x + Σ_j P_j(m) v_j)`;
/// the oracle the faster paths are checked against.
pub fn ergodic_average_direct(f: &LatticeFunction, spec: &AverageSpec) -> Result<LatticeFunction> {
    let box_size = spec.validate(f)?;
    let k = spec.box_m.len();
    let dim = f.dim();
    let mut out = output_skeleton(f, &spec.orbit_kernel(f)?)?;
    let weight = 1.0 / box_size as f64;
    let coords: Vec<Vec<i64>> = out.iter_points().map(|(c, _)| c).collect();
    let mut acc = CompensatedField::new(out.values().len());
    let mut m = vec![1i64; k];
    loop {
        let offset = spec.orbit_offset(&m, dim, None).or_else(|_| {
            // orbit points beyond i64 still act on cyclic spaces
            spec.orbit_offset(&m, dim, f.space().modulus())
        })?;
        for (flat, x) in coords.iter().enumerate() {
            let shifted: Vec<i64> = x.iter().zip(&offset).map(|(c, o)| c + o).collect();
            acc.add(flat, f.get(&shifted));
        }
        if !advance_odometer(&mut m, &spec.box_m) {
            break;
        }
    }
    for (o, s) in out.values_mut().iter_mut().zip(&acc.sum) {
        *o = s * weight;
    }
    Ok(out)
}

/// Output container: the full torus for cyclic spaces, or the support box
/// grown by the orbit diameter for the lattice.
fn output_skeleton(
    f: &LatticeFunction,
    kernel: &BTreeMap<Vec<i64>, u64>,
) -> Result<LatticeFunction> {
    match f.space() {
        Space::Cyclic { dim, modulus } => Ok(LatticeFunction::zero_cyclic(dim, modulus)),
        Space::Lattice { dim } => {
            let mut lo = vec![i64::MAX; dim];
            let mut hi = vec![i64::MIN; dim];
            for offset in kernel.keys() {
                for a in 0..dim {
                    lo[a] = lo[a].min(offset[a]);
                    hi[a] = hi[a].max(offset[a]);
                }
            }
            // out(x) = Σ_o f(x + o): support is supp(f) − offsets
            let out_lo: Vec<i64> = (0..dim).map(|a| f.lo()[a] - hi[a]).collect();
            let out_hi: Vec<i64> = (0..dim)
                .map(|a| f.lo()[a] + f.shape()[a] as i64 - 1 - lo[a])
                .collect();
            let shape: Vec<usize> = (0..dim)
                .map(|a| (out_hi[a] - out_lo[a] + 1) as usize)
                .collect();
            Ok(LatticeFunction {
                space: f.space(),
                values: vec![Complex64::default(); shape.iter().product()],
                lo: out_lo,
                shape,
            })
        }
    }
}

fn ergodic_average_kernel(
    f: &LatticeFunction,
    kernel: &BTreeMap<Vec<i64>, u64>,
    box_size: usize,
) -> Result<LatticeFunction> {
    let mut out = output_skeleton(f, kernel)?;
    let weight = 1.0 / box_size as f64;
    let coords: Vec<Vec<i64>> = out.iter_points().map(|(c, _)| c).collect();
    let mut acc = CompensatedField::new(out.values().len());
    for (offset, &mult) in kernel {
        let m = mult as f64;
        for (flat, x) in coords.iter().enumerate() {
            let shifted: Vec<i64> = x.iter().zip(offset).map(|(c, o)| c + o).collect();
            acc.add(flat, f.get(&shifted) * m);
        }
    }
    for (o, s) in out.values_mut().iter_mut().zip(&acc.sum) {
        *o = s * weight;
    }
    Ok(out)
}

fn ergodic_average_fft(
    f: &LatticeFunction,
    kernel: &BTreeMap<Vec<i64>, u64>,
    box_size: usize,
) -> Result<LatticeFunction> {
    let (dim, modulus) = match f.space() {
        Space::Cyclic { dim, modulus } => (dim, modulus),
        Space::Lattice { .. } => return Err(Error::NotCyclic),
    };
    let mut kfield = LatticeFunction::zero_cyclic(dim, modulus);
    for (offset, &mult) in kernel {
        let idx = kfield.flat_index_unchecked(offset);
        kfield.values[idx] += Complex64::new(mult as f64, 0.0);
    }
    let shape = f.shape().to_vec();
    let mut khat = kfield.values;
    let mut fhat = f.values.clone();
    for a in 0..dim {
        dft::forward_axis(&mut khat, &shape, a);
        dft::forward_axis(&mut fhat, &shape, a);
    }
    // out(x) = Σ_o k(o) f(x+o): in frequency, conj(k̂)·f̂ for real kernels
    let mut prod: Vec<Complex64> = khat.iter().zip(&fhat).map(|(k, v)| k.conj() * v).collect();
    for a in 0..dim {
        dft::inverse_axis(&mut prod, &shape, a);
    }
    let weight = 1.0 / box_size as f64;
    for v in &mut prod {
        *v *= weight;
    }
    LatticeFunction::cyclic_from_values(dim, modulus, prod)
}

// ---------------------------------------------------------------------------
// Multi-parameter averages (product structure)
// ---------------------------------------------------------------------------

/// One factor `A^{P}_{M}` of a product average: a univariate orbit polynomial,
/// a box edge, and its transformation's shift vector.
#[derive(Debug, Clone)]
pub struct OneParamAverage {
    pub polynomial: IntPolynomial,
    pub m: u64,
    pub shift: Vec<i64>,
}

/// Applies a single one-parameter polynomial average.
pub fn one_param_average(f: &LatticeFunction, factor: &OneParamAverage) -> Result<LatticeFunction> {
    let spec = AverageSpec {
        polynomials: vec![factor.polynomial.clone()],
        box_m: vec![factor.m],
        shifts: vec![factor.shift.clone()],
    };
    ergodic_average(f, &spec)
}

/// The multi-parameter average evaluated through its product structure
/// `A^{P_1(m_1),…,P_d(m_d)}_{M} = A^{P_1}_{M_1} ∘ … ∘ A^{P_d}_{M_d}`;
/// this composed path is the default route (`A^{P_d}` is applied first).
pub fn multiparam_average(
    f: &LatticeFunction,
    factors: &[OneParamAverage],
) -> Result<LatticeFunction> {
    if factors.is_empty() {
        return Err(Error::EmptyBox);
    }
    let mut cur = f.clone();
    for factor in factors.iter().rev() {
        cur = one_param_average(&cur, factor)?;
    }
    Ok(cur)
}

/// The same average evaluated as one literal sum over
/// `Q_M = [M_1]×…×[M_d]`; the oracle for the composed path.
pub fn multiparam_average_direct(
    f: &LatticeFunction,
    factors: &[OneParamAverage],
) -> Result<LatticeFunction> {
    let d = factors.len();
    if d == 0 {
        return Err(Error::EmptyBox);
    }
    let polynomials: Vec<IntPolynomial> = factors
        .iter()
        .enumerate()
        .map(|(j, fac)| fac.polynomial.lift(d, j))
        .collect::<Result<_>>()?;
    let spec = AverageSpec {
        polynomials,
        box_m: factors.iter().map(|fac| fac.m).collect(),
        shifts: factors.iter().map(|fac| fac.shift.clone()).collect(),
    };
    ergodic_average_direct(f, &spec)
}

// ---------------------------------------------------------------------------
// Telescoping and the Riesz-style decomposition
// ---------------------------------------------------------------------------

/// Result of checking the coboundary telescoping identity
/// `A_M (g − g∘T) = M^{-1}(g∘T − g∘T^{M+1})`.
#[derive(Debug, Clone)]
pub struct TelescopingReport {
    pub max_deviation: f64,
    pub relative_deviation: f64,
    pub lhs_sup: f64,
    pub rhs_sup: f64,
}

pub fn telescoping_check(g: &LatticeFunction, shift: &[i64], m: u64) -> Result<TelescopingReport> {
    if m == 0 {
        return Err(Error::EmptyBox);
    }
    let g_t = g.compose_shift(shift, 1)?;
    let h = g.sub(&g_t)?;
    let spec = AverageSpec {
        polynomials: vec![IntPolynomial::univariate(1)],
        box_m: vec![m],
        shifts: vec![shift.to_vec()],
    };
    let lhs = ergodic_average(&h, &spec)?;
    let rhs = g_t
        .sub(&g.compose_shift(shift, m as i64 + 1)?)?
        .scale(1.0 / m as f64);
    let max_deviation = lhs.max_abs_diff(&rhs)?;
    let scale = lhs.norm_inf().max(rhs.norm_inf()).max(f64::MIN_POSITIVE);
    Ok(TelescopingReport {
        max_deviation,
        relative_deviation: max_deviation / scale,
        lhs_sup: lhs.norm_inf(),
        rhs_sup: rhs.norm_inf(),
    })
}

/// Riesz-style decomposition of `f` on a cyclic space into a shift-invariant
/// part and a coboundary `g − g∘T`, solved in frequency space.
#[derive(Debug, Clone)]
pub struct BirkhoffDecomposition {
    /// Orthogonal projection of `f` onto shift-invariant functions; the
    /// averages `A_M f` converge to it as `M → ∞`.
    pub invariant: LatticeFunction,
    /// Transfer function `g` with `f − invariant = g − g∘T` (up to residual).
    pub transfer: LatticeFunction,
    /// `‖f − invariant − (g − g∘T)‖_∞`.
    pub residual: f64,
}

pub fn birkhoff_decomposition(
    f: &LatticeFunction,
    shift: &[i64],
) -> Result<BirkhoffDecomposition> {
    let (dim, modulus) = match f.space() {
        Space::Cyclic { dim, modulus } => (dim, modulus),
        Space::Lattice { .. } => return Err(Error::NotCyclic),
    };
    if shift.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "shift arity {} vs dim {}",
            shift.len(),
            dim
        )));
    }
    let shape = f.shape().to_vec();
    let mut fhat = f.values.clone();
    for a in 0..dim {
        dft::forward_axis(&mut fhat, &shape, a);
    }
    let n = modulus as i64;
    let mut inv_hat = vec![Complex64::default(); fhat.len()];
    let mut g_hat = vec![Complex64::default(); fhat.len()];
    for (flat, &fh) in fhat.iter().enumerate() {
        let dot = frequency_dot(flat, &shape, shift, n);
        if dot.rem_euclid(n) == 0 {
            inv_hat[flat] = fh;
        } else {
            // solve ĝ(ξ)(1 − e(−s·ξ/N)) = f̂(ξ)
            let phase = -2.0 * std::f64::consts::PI * (dot.rem_euclid(n) as f64) / n as f64;
            let denom = Complex64::new(1.0, 0.0) - Complex64::new(0.0, phase).exp();
            g_hat[flat] = fh / denom;
        }
    }
    for a in 0..dim {
        dft::inverse_axis(&mut inv_hat, &shape, a);
        dft::inverse_axis(&mut g_hat, &shape, a);
    }
    let invariant = LatticeFunction::cyclic_from_values(dim, modulus, inv_hat)?;
    let transfer = LatticeFunction::cyclic_from_values(dim, modulus, g_hat)?;
    let coboundary = transfer.sub(&transfer.compose_shift(shift, 1)?)?;
    let residual = f.sub(&invariant)?.max_abs_diff(&coboundary)?;
    Ok(BirkhoffDecomposition {
        invariant,
        transfer,
        residual,
    })
}

/// `s·ξ mod n` for the frequency vector encoded by a flat row-major index.
fn frequency_dot(flat: usize, shape: &[usize], shift: &[i64], n: i64) -> i64 {
    let mut rem = flat;
    let mut dot = 0i64;
    for a in (0..shape.len()).rev() {
        let xi = (rem % shape[a]) as i64;
        rem /= shape[a];
        dot = (dot + shift[a].rem_euclid(n) * xi) % n;
    }
    dot
}

// ---------------------------------------------------------------------------
// Families of averages
// ---------------------------------------------------------------------------

/// Snapshots `(A_M f : M ∈ M_list)` of a (possibly multi-parameter) average,
/// exposing per-point scalar families for seminorm evaluation.
#[derive(Debug, Clone)]
pub struct AverageSnapshots {
    pub m_values: Vec<Vec<u64>>,
    pub snapshots: Vec<LatticeFunction>,
}

impl AverageSnapshots {
    /// The scalar family `M ↦ A_M f(x)` at one spatial point.
    pub fn scalar_family_at(&self, x: &[i64]) -> Result<ParamFamily> {
        let k = self.m_values[0].len();
        ParamFamily::new(
            k,
            self.m_values
                .iter()
                .zip(&self.snapshots)
                .map(|(m, snap)| (m.iter().map(|&c| rat_int(c as i64)).collect(), snap.get(x)))
                .collect(),
        )
    }
}

/// Template for [`average_family`]: per-parameter orbit polynomial and shift.
#[derive(Debug, Clone)]
pub struct FamilyTemplate {
    pub factors: Vec<(IntPolynomial, Vec<i64>)>,
}

impl FamilyTemplate {
    /// Classical Birkhoff template: `P(m) = m` along one shift.
    pub fn birkhoff(shift: Vec<i64>) -> Self {
        Self {
            factors: vec![(IntPolynomial::univariate(1), shift)],
        }
    }
}

/// Evaluates `A_M f` along a strictly increasing list of boxes, reusing
/// running sums when the one-parameter orbit kernels are nested
/// (`M → M + 1` updates), and exposing the snapshots as a family.
pub fn average_family(
    f: &LatticeFunction,
    template: &FamilyTemplate,
    m_list: &[Vec<u64>],
) -> Result<AverageSnapshots> {
    let k = template.factors.len();
    if m_list.len() < 2
        || m_list.iter().any(|m| m.len() != k)
        || m_list
            .windows(2)
            .any(|w| !w[0].iter().zip(&w[1]).all(|(a, b)| a < b))
    {
        return Err(Error::BadMList);
    }
    for (poly, _) in &template.factors {
        if poly.num_vars() != 1 {
            return Err(Error::ArityMismatch {
                poly: poly.num_vars(),
                point: 1,
            });
        }
    }
    let snapshots = if k == 1 {
        one_param_snapshots(f, &template.factors[0], m_list)?
    } else {
        m_list
            .iter()
            .map(|m| {
                let factors: Vec<OneParamAverage> = template
                    .factors
                    .iter()
                    .zip(m)
                    .map(|((poly, shift), &mi)| OneParamAverage {
                        polynomial: poly.clone(),
                        m: mi,
                        shift: shift.clone(),
                    })
                    .collect();
                multiparam_average(f, &factors)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(AverageSnapshots {
        m_values: m_list.to_vec(),
        snapshots,
    })
}

/// One-parameter snapshots via a running unnormalized sum
/// `S_M = Σ_{m≤M} f∘T^{P(m)}` updated incrementally across the list; sparse
/// lists on large cyclic spaces go through per-snapshot FFT averages instead.
fn one_param_snapshots(
    f: &LatticeFunction,
    factor: &(IntPolynomial, Vec<i64>),
    m_list: &[Vec<u64>],
) -> Result<Vec<LatticeFunction>> {
    let (poly, shift) = factor;
    let m_max = m_list.last().unwrap()[0];
    let cyclic = matches!(f.space(), Space::Cyclic { .. });
    let log_cost = 16 * (1 + f.values().len().ilog2() as usize) * m_list.len();
    if cyclic && (m_max as usize) > log_cost {
        return m_list
            .iter()
            .map(|m| {
                one_param_average(
                    f,
                    &OneParamAverage {
                        polynomial: poly.clone(),
                        m: m[0],
                        shift: shift.clone(),
                    },
                )
            })
            .collect();
    }
    if m_max > 1 << 22 {
        return Err(Error::Malformed(
            "running-sum family over 2^22 steps refused".into(),
        ));
    }
    let mut snapshots = Vec::with_capacity(m_list.len());
    let mut running: Option<LatticeFunction> = None;
    let mut last_m = 0u64;
    for m in m_list {
        let target = m[0];
        for step in (last_m + 1)..=target {
            let p = poly
                .eval_big(&[step as i64])?
                .to_i64()
                .ok_or(Error::OrbitOverflow)?;
            let translated = f.compose_shift(shift, p)?;
            running = Some(match running {
                None => translated,
                Some(acc) => acc.add(&translated)?,
            });
        }
        last_m = target;
        snapshots.push(
            running
                .as_ref()
                .expect("at least one step accumulated")
                .scale(1.0 / target as f64),
        );
    }
    Ok(snapshots)
}

/// The lacunary index set `𝕃_τ = {⌊τ^n⌋ : n ∈ ℕ}`, deduplicated and strictly
/// increasing, truncated to `count` entries.
pub fn lacunary_m_values(tau: f64, count: usize) -> Result<Vec<u64>> {
    if !(tau > 1.0) || !tau.is_finite() {
        return Err(Error::LacunaryRatio(tau));
    }
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut n = 0u32;
    while out.len() < count && n < 4096 {
        let v = tau.powi(n as i32).floor();
        if !v.is_finite() || v >= u64::MAX as f64 {
            break;
        }
        let v = v as u64;
        if out.last().is_none_or(|&last| v > last) {
            out.push(v);
        }
        n += 1;
    }
    Ok(out)
}
