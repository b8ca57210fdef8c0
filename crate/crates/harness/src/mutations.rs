//! Deliberately corrupted seminorm implementations for negative-control
//! runs. The verification battery routes oscillation evaluation and sequence
//! validation through this dispatcher; with `Mutation::None` it delegates to
//! the library, and each corruption must make the battery exit nonzero.

use osc_core::rat::{in_box, GridPoint};
use osc_core::seminorms::oscillation;
use osc_core::{Error, IncreasingSequence, ParamFamily, Result};

use crate::config::Mutation;

/// Oscillation along a sequence, possibly through a corrupted code path.
pub fn oscillation_dispatch(
    mutation: Mutation,
    fam: &ParamFamily,
    seq: &IncreasingSequence,
    r: f64,
    subdomain: Option<&[GridPoint]>,
) -> Result<f64> {
    match mutation {
        Mutation::None | Mutation::NonStrictSeq => {
            Ok(oscillation(fam, seq, r, subdomain)?.value)
        }
        Mutation::BlockBoundary => oscillation_closed_blocks(fam, seq, r, subdomain),
        Mutation::EmptySup => oscillation_anchored_empty_sup(fam, seq, r, subdomain),
    }
}

/// Sequence acceptance, possibly through a corrupted validator. Returns
/// whether the entries were accepted as a sequence.
pub fn sequence_accepted(mutation: Mutation, entries: &[GridPoint]) -> bool {
    match mutation {
        Mutation::NonStrictSeq => {
            // corrupted: nondecreasing entries slip through
            entries.len() >= 2
                && entries
                    .windows(2)
                    .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b))
        }
        _ => IncreasingSequence::new(entries.to_vec()).is_ok(),
    }
}

fn subdomain_mask(fam: &ParamFamily, subdomain: Option<&[GridPoint]>) -> Result<Option<Vec<bool>>> {
    match subdomain {
        None => Ok(None),
        Some(points) => {
            let mut mask = vec![false; fam.len()];
            for p in points {
                let pos = fam
                    .position(p)
                    .ok_or(Error::SubdomainOutsideIndexSet)?;
                mask[pos] = true;
            }
            Ok(Some(mask))
        }
    }
}

/// Off-by-one corruption: blocks include their right endpoint.
fn oscillation_closed_blocks(
    fam: &ParamFamily,
    seq: &IncreasingSequence,
    r: f64,
    subdomain: Option<&[GridPoint]>,
) -> Result<f64> {
    let mask = subdomain_mask(fam, subdomain)?;
    let anchors: Vec<usize> = seq
        .entries()
        .iter()
        .map(|e| fam.position(e).ok_or(Error::EntryOutsideIndexSet))
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    for j in 0..seq.block_count() {
        let (lo, hi) = seq.block(j);
        let base = fam.value(anchors[j]);
        let mut sup = 0.0f64;
        for (pos, t) in fam.points().iter().enumerate() {
            if let Some(m) = &mask {
                if !m[pos] {
                    continue;
                }
            }
            let closed = in_box(t, lo, hi) || t == hi;
            if closed {
                sup = sup.max((fam.value(pos) - base).norm());
            }
        }
        sum += sup.powf(r);
    }
    Ok(sum.powf(1.0 / r))
}

/// Missing empty-sup convention: an empty block contributes the anchor's
/// magnitude instead of zero.
fn oscillation_anchored_empty_sup(
    fam: &ParamFamily,
    seq: &IncreasingSequence,
    r: f64,
    subdomain: Option<&[GridPoint]>,
) -> Result<f64> {
    let mask = subdomain_mask(fam, subdomain)?;
    let anchors: Vec<usize> = seq
        .entries()
        .iter()
        .map(|e| fam.position(e).ok_or(Error::EntryOutsideIndexSet))
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    for j in 0..seq.block_count() {
        let (lo, hi) = seq.block(j);
        let base = fam.value(anchors[j]);
        let mut sup = f64::NEG_INFINITY;
        for (pos, t) in fam.points().iter().enumerate() {
            if let Some(m) = &mask {
                if !m[pos] {
                    continue;
                }
            }
            if in_box(t, lo, hi) {
                sup = sup.max((fam.value(pos) - base).norm());
            }
        }
        if sup == f64::NEG_INFINITY {
            sup = base.norm();
        }
        sum += sup.powf(r);
    }
    Ok(sum.powf(1.0 / r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use osc_core::rat::rat_int;

    #[test]
    fn healthy_dispatch_matches_library() {
        let fam = ParamFamily::from_reals(&[0.0, 1.0, 0.0, 2.0]).unwrap();
        let seq = IncreasingSequence::from_integers(&[0, 2, 3]).unwrap();
        let a = oscillation_dispatch(Mutation::None, &fam, &seq, 2.0, None).unwrap();
        let b = oscillation(&fam, &seq, 2.0, None).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn closed_blocks_differ_on_boundary_instances() {
        // value jumps exactly at the right endpoint
        let fam = ParamFamily::from_reals(&[0.0, 0.0, 5.0]).unwrap();
        let seq = IncreasingSequence::from_integers(&[0, 2]).unwrap();
        let healthy = oscillation_dispatch(Mutation::None, &fam, &seq, 2.0, None).unwrap();
        let mutated =
            oscillation_dispatch(Mutation::BlockBoundary, &fam, &seq, 2.0, None).unwrap();
        assert_eq!(healthy, 0.0);
        assert_eq!(mutated, 5.0);
    }

    #[test]
    fn empty_sup_mutation_differs_on_empty_blocks() {
        let fam = ParamFamily::from_reals(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        let seq = IncreasingSequence::from_integers(&[0, 2, 3]).unwrap();
        // subdomain keeps only t=3, so every half-open block is empty
        let sub = vec![vec![rat_int(3)]];
        let healthy =
            oscillation_dispatch(Mutation::None, &fam, &seq, 2.0, Some(&sub)).unwrap();
        let mutated =
            oscillation_dispatch(Mutation::EmptySup, &fam, &seq, 2.0, Some(&sub)).unwrap();
        assert_eq!(healthy, 0.0);
        assert!(mutated > 1.0);
    }

    #[test]
    fn non_strict_acceptance_differs() {
        let flat = vec![vec![rat_int(1)], vec![rat_int(1)], vec![rat_int(2)]];
        assert!(!sequence_accepted(Mutation::None, &flat));
        assert!(sequence_accepted(Mutation::NonStrictSeq, &flat));
        let strict = vec![vec![rat_int(0)], vec![rat_int(2)]];
        assert!(sequence_accepted(Mutation::None, &strict));
    }
}
