//! Finite parameterized families and the values their seminorms produce.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{rat_int, strictly_below, GridPoint, Rat};

/// A finite k-parameter family `(a_t : t ∈ 𝕀)`, `𝕀 ⊂ ℚ^k`.
///
/// Index points are exact rationals kept in lexicographic order; values are
/// complex scalars (real families embed with zero imaginary part).
/// Vector-valued families are handled by evaluating one spatial point at a
/// time, each evaluation yielding one `ParamFamily`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamFamily {
    dim_k: usize,
    points: Vec<GridPoint>,
    values: Vec<Complex64>,
}

impl ParamFamily {
    /// Builds a family from `(t, a_t)` pairs. Requires at least two distinct
    /// index points, all of the same arity.
    pub fn new(dim_k: usize, mut entries: Vec<(GridPoint, Complex64)>) -> Result<Self> {
        if dim_k == 0 {
            return Err(Error::ParameterMismatch {
                expected: 1,
                got: 0,
            });
        }
        for (p, _) in &entries {
            if p.len() != dim_k {
                return Err(Error::ParameterMismatch {
                    expected: dim_k,
                    got: p.len(),
                });
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateIndex);
        }
        if entries.len() < 2 {
            return Err(Error::IndexSetTooSmall);
        }
        let (points, values) = entries.into_iter().unzip();
        Ok(Self {
            dim_k,
            points,
            values,
        })
    }

    /// One-parameter family over `𝕀 = {0, 1, ..., n-1}` from real values.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(
            1,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (vec![rat_int(i as i64)], Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    /// One-parameter family over `𝕀 = {0, 1, ..., n-1}` from complex values.
    pub fn from_complex(values: &[Complex64]) -> Result<Self> {
        Self::new(
            1,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (vec![rat_int(i as i64)], v))
                .collect(),
        )
    }

    /// One-parameter family with explicit index coordinates.
    pub fn from_indexed_reals(indices: &[Rat], values: &[f64]) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} indices vs {} values",
                indices.len(),
                values.len()
            )));
        }
        Self::new(
            1,
            indices
                .iter()
                .zip(values)
                .map(|(t, &v)| (vec![*t], Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index points in lexicographic order.
    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn point(&self, pos: usize) -> &GridPoint {
        &self.points[pos]
    }

    pub fn value(&self, pos: usize) -> Complex64 {
        self.values[pos]
    }

    /// Position of an index point, if it belongs to `𝕀`.
    pub fn position(&self, t: &[Rat]) -> Option<usize> {
        self.points
            .binary_search_by(|p| p.as_slice().cmp(t))
            .ok()
    }

    pub fn value_at(&self, t: &[Rat]) -> Option<Complex64> {
        self.position(t).map(|p| self.values[p])
    }

    /// Pointwise sum of two families over the same index set.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.points != other.points {
            return Err(Error::DimensionMismatch(
                "families live on different index sets".into(),
            ));
        }
        Ok(Self {
            dim_k: self.dim_k,
            points: self.points.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Restriction to a subset of positions (which must keep `#𝕀 ≥ 2`).
    pub fn restrict(&self, positions: &[usize]) -> Result<Self> {
        let entries = positions
            .iter()
            .map(|&p| (self.points[p].clone(), self.values[p]))
            .collect();
        Self::new(self.dim_k, entries)
    }

    /// Distinct coordinate values along one axis, ascending.
    pub fn axis_values(&self, axis: usize) -> Vec<Rat> {
        let mut vals: Vec<Rat> = self.points.iter().map(|p| p[axis]).collect();
        vals.sort();
        vals.dedup();
        vals
    }

    /// True when `𝕀` is the full Cartesian product of its axis value sets.
    pub fn is_product_grid(&self) -> bool {
        let per_axis: Vec<Vec<Rat>> = (0..self.dim_k).map(|a| self.axis_values(a)).collect();
        let expected: usize = per_axis.iter().map(|v| v.len()).product();
        expected == self.points.len()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(Σ_t |a_t|^r)^{1/r}` over the whole index set.
    pub fn ell_r_norm(&self, r: f64) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm().powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    }
}

/// An element `I ∈ 𝔖_J(𝕀)`: a strictly increasing (coordinatewise) sequence
/// `I_0 ≺_s I_1 ≺_s … ≺_s I_J` with `J ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncreasingSequence {
    entries: Vec<GridPoint>,
}

impl IncreasingSequence {
    pub fn new(entries: Vec<GridPoint>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::SequenceTooShort);
        }
        for w in entries.windows(2) {
            if !strictly_below(&w[0], &w[1]) {
                return Err(Error::NotStrictlyIncreasing);
            }
        }
        Ok(Self { entries })
    }

    /// One-parameter sequence from scalar coordinates.
    pub fn from_scalars(entries: &[Rat]) -> Result<Self> {
        Self::new(entries.iter().map(|r| vec![*r]).collect())
    }

    pub fn from_integers(entries: &[i64]) -> Result<Self> {
        Self::from_scalars(&entries.iter().map(|&n| rat_int(n)).collect::<Vec<_>>())
    }

    pub fn entries(&self) -> &[GridPoint] {
        &self.entries
    }

    /// The sequence length `J` (number of blocks; the sequence has `J+1` entries).
    pub fn block_count(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.entries[0].len()
    }

    /// The half-open box `𝔹[I_j] = [I_{j,1}, I_{j+1,1}) × … × [I_{j,k}, I_{j+1,k})`.
    pub fn block(&self, j: usize) -> (&GridPoint, &GridPoint) {
        (&self.entries[j], &self.entries[j + 1])
    }

    /// The diagonal sequence `Ī_i = (I_i, …, I_i) ∈ 𝕀^k` of a one-parameter
    /// sequence.
    pub fn diagonal_embed(&self, k_target: usize) -> Result<IncreasingSequence> {
        if self.dim() != 1 {
            return Err(Error::ParameterMismatch {
                expected: 1,
                got: self.dim(),
            });
        }
        if k_target == 0 {
            return Err(Error::ParameterMismatch {
                expected: 1,
                got: 0,
            });
        }
        IncreasingSequence::new(
            self.entries
                .iter()
                .map(|e| vec![e[0]; k_target])
                .collect(),
        )
    }
}

/// Which quantity a [`SeminormValue`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    Variation,
    Oscillation,
    JumpCount,
    OverlapJumpCount,
    SupNorm,
}

/// Whether a reported value is exact or only a certified lower bound
/// (stochastic searches cannot certify attainment).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    #[default]
    Exact,
    LowerBound,
}

impl Bound {
    pub fn is_exact(&self) -> bool {
        matches!(self, Bound::Exact)
    }
}

/// A witness re-evaluating to the reported value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    /// Positions `t_0 < … < t_J` into the family's index order.
    Chain(Vec<usize>),
    /// Position pairs `s_j < t_j` for the overlapping jump count.
    Pairs(Vec<[usize; 2]>),
}

/// The result of a seminorm computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormValue {
    pub kind: SeminormKind,
    /// The exponent `r` or the jump threshold `λ`; absent for sup norms.
    pub parameter: Option<f64>,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Bound::is_exact", default)]
    pub bound: Bound,
}

impl SeminormValue {
    pub fn exact(kind: SeminormKind, parameter: Option<f64>, value: f64) -> Self {
        Self {
            kind,
            parameter,
            value,
            witness: None,
            bound: Bound::Exact,
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn chain_witness(&self) -> Option<&[usize]> {
        match &self.witness {
            Some(Witness::Chain(c)) => Some(c),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_rejects_degenerate_inputs() {
        assert!(matches!(
            ParamFamily::from_reals(&[1.0]),
            Err(Error::IndexSetTooSmall)
        ));
        let dup = vec![
            (vec![rat_int(0)], Complex64::new(1.0, 0.0)),
            (vec![rat_int(0)], Complex64::new(2.0, 0.0)),
        ];
        assert!(matches!(
            ParamFamily::new(1, dup),
            Err(Error::DuplicateIndex)
        ));
    }

    #[test]
    fn family_orders_points() {
        let fam = ParamFamily::new(
            1,
            vec![
                (vec![rat_int(3)], Complex64::new(30.0, 0.0)),
                (vec![rat_int(1)], Complex64::new(10.0, 0.0)),
                (vec![rat_int(2)], Complex64::new(20.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(fam.value(0).re, 10.0);
        assert_eq!(fam.position(&[rat_int(2)]), Some(1));
        assert_eq!(fam.value_at(&[rat_int(3)]).unwrap().re, 30.0);
        assert_eq!(fam.value_at(&[rat_int(5)]), None);
    }

    #[test]
    fn sequence_validation() {
        assert!(IncreasingSequence::from_integers(&[0, 1, 2]).is_ok());
        assert!(matches!(
            IncreasingSequence::from_integers(&[0]),
            Err(Error::SequenceTooShort)
        ));
        assert!(matches!(
            IncreasingSequence::from_integers(&[0, 0, 1]),
            Err(Error::NotStrictlyIncreasing)
        ));
        // Multi-parameter strictness is per coordinate.
        let bad = IncreasingSequence::new(vec![
            vec![rat_int(0), rat_int(0)],
            vec![rat_int(1), rat_int(0)],
        ]);
        assert!(matches!(bad, Err(Error::NotStrictlyIncreasing)));
    }

    #[test]
    fn diagonal_embedding() {
        let seq = IncreasingSequence::from_integers(&[1, 2, 3]).unwrap();
        let diag = seq.diagonal_embed(2).unwrap();
        assert_eq!(
            diag.entries()[1],
            vec![rat_int(2), rat_int(2)],
        );
        assert_eq!(diag.block_count(), 2);
    }

    #[test]
    fn product_grid_detection() {
        let mut entries = Vec::new();
        for i in 0..3 {
            for j in 0..2 {
                entries.push((vec![rat_int(i), rat_int(j)], Complex64::default()));
            }
        }
        let grid = ParamFamily::new(2, entries.clone()).unwrap();
        assert!(grid.is_product_grid());
        entries.pop();
        let partial = ParamFamily::new(2, entries).unwrap();
        assert!(!partial.is_product_grid());
    }

    #[test]
    fn seminorm_value_serialization() {
        let v = SeminormValue::exact(SeminormKind::Variation, Some(2.0), 1.5)
            .with_witness(Witness::Chain(vec![0, 2]));
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(
            js,
            r#"{"kind":"variation","parameter":2.0,"value":1.5,"witness":[0,2]}"#
        );
        let back: SeminormValue = serde_json::from_str(&js).unwrap();
        assert_eq!(back, v);
    }
}
