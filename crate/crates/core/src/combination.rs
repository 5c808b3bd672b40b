//! Dempster's rule of combination, with the conflict mass and the
//! normalization step kept explicit.
//!
//! Combination assumes the two sources are statistically independent;
//! that assumption is the caller's to make and cannot be checked here.
//! The result carries the conflict mass K, the unnormalized surviving
//! masses (which sum to 1 − K), and the normalized distribution, so the
//! effect of normalization is always inspectable. Whether the two
//! sources are *combinable* in the stronger sense of sharing a
//! conflict-free parent relation is a separate question, answered by
//! [`crate::combinability`]; the rule itself happily produces output for
//! noncombinable pairs as long as K < 1.

use std::collections::BTreeMap;

use crate::distribution::GranularDistribution;
use crate::error::{Error, Result};
use crate::frame::Granule;
use crate::rational::Rational;

/// Outcome of one conjunctive combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationResult {
    /// K: total product mass on disjoint focal pairs.
    pub conflict: Rational,
    /// Surviving mass per nonempty intersection, in canonical order;
    /// sums to 1 − K.
    pub unnormalized: Vec<(Granule, Rational)>,
    /// Unnormalized masses divided by 1 − K; `None` exactly when K = 1.
    pub normalized: Option<GranularDistribution>,
}

/// Source credibility α ∈ [0, 1] for discounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Credibility {
    alpha: Rational,
}

impl Credibility {
    pub fn new(alpha: Rational) -> Result<Self> {
        if alpha.is_negative() || alpha > Rational::one() {
            return Err(Error::CredibilityRange(alpha));
        }
        Ok(Credibility { alpha })
    }

    pub fn full() -> Self {
        Credibility {
            alpha: Rational::one(),
        }
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }
}

fn check_frames(g: &GranularDistribution, h: &GranularDistribution) -> Result<()> {
    if g.frame() != h.frame() {
        return Err(Error::FrameMismatch);
    }
    Ok(())
}

/// K = Σ p_i·q_j over all disjoint focal pairs (A_i, B_j).
pub fn conflict_mass(g: &GranularDistribution, h: &GranularDistribution) -> Result<Rational> {
    check_frames(g, h)?;
    let mut k = Rational::zero();
    for (a, p) in g.focal() {
        for (b, q) in h.focal() {
            if a.bits() & b.bits() == 0 {
                k = k + p * q;
            }
        }
    }
    Ok(k)
}

/// Conjunctive combination of two independent sources.
///
/// Every focal pair contributes p_i·q_j to its intersection; disjoint
/// pairs feed the conflict mass K instead. When K = 1 the normalized
/// result does not exist and [`Error::TotalConflict`] is returned with
/// the partial result in its payload.
pub fn dempster_combine(
    g: &GranularDistribution,
    h: &GranularDistribution,
) -> Result<CombinationResult> {
    check_frames(g, h)?;
    let frame = g.frame().clone();
    let mut conflict = Rational::zero();
    let mut surviving: BTreeMap<u64, Rational> = BTreeMap::new();
    for (a, p) in g.focal() {
        for (b, q) in h.focal() {
            let bits = a.bits() & b.bits();
            let mass = p * q;
            if bits == 0 {
                conflict = conflict + mass;
            } else {
                match surviving.entry(bits) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(mass);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let merged = e.get() + mass;
                        *e.get_mut() = merged;
                    }
                }
            }
        }
    }
    let unnormalized: Vec<(Granule, Rational)> = surviving
        .into_iter()
        .map(|(bits, mass)| (frame.granule_from_bits(bits), mass))
        .collect();
    let survived: Rational = unnormalized.iter().map(|(_, m)| m).sum();
    debug_assert!(&conflict + &survived == Rational::one());

    if conflict.is_one() {
        return Err(Error::TotalConflict {
            partial: Box::new(CombinationResult {
                conflict,
                unnormalized,
                normalized: None,
            }),
            step: None,
        });
    }
    let scale = Rational::one() - &conflict;
    let normalized = GranularDistribution::new(
        frame,
        unnormalized
            .iter()
            .map(|(g, m)| (g.clone(), m / &scale)),
    )?;
    Ok(CombinationResult {
        conflict,
        unnormalized,
        normalized: Some(normalized),
    })
}

/// Left fold of [`dempster_combine`] over one or more distributions.
///
/// Exactness makes the bracketing irrelevant for the normalized output.
/// If some step hits K = 1, the error's `step` is the index of the input
/// whose incorporation failed.
pub fn combine_n(distributions: &[GranularDistribution]) -> Result<CombinationResult> {
    let first = distributions.first().ok_or(Error::EmptyInput)?;
    let mut result = CombinationResult {
        conflict: Rational::zero(),
        unnormalized: first.focal().to_vec(),
        normalized: Some(first.clone()),
    };
    for (index, next) in distributions.iter().enumerate().skip(1) {
        let acc = result
            .normalized
            .as_ref()
            .expect("normalized result exists while folding");
        result = match dempster_combine(acc, next) {
            Ok(r) => r,
            Err(Error::TotalConflict { partial, .. }) => {
                return Err(Error::TotalConflict {
                    partial,
                    step: Some(index),
                })
            }
            Err(e) => return Err(e),
        };
    }
    Ok(result)
}

/// Classical discounting: a source of credibility α keeps fraction α of
/// every mass and cedes the rest to total ignorance. In ball-box terms,
/// with probability 1 − α the drawn ball's label is replaced by the
/// whole frame.
pub fn discount(dist: &GranularDistribution, credibility: &Credibility) -> GranularDistribution {
    let alpha = credibility.alpha();
    if alpha.is_one() {
        return dist.clone();
    }
    let frame = dist.frame().clone();
    if alpha.is_zero() {
        return GranularDistribution::vacuous(&frame);
    }
    let full = frame.full_granule();
    let mut theta_mass = Rational::one() - alpha;
    let mut entries: Vec<(Granule, Rational)> = Vec::with_capacity(dist.len() + 1);
    for (g, m) in dist.focal() {
        let scaled = alpha * m;
        if g.is_full() {
            theta_mass = theta_mass + scaled;
        } else {
            entries.push((g.clone(), scaled));
        }
    }
    entries.push((full, theta_mass));
    GranularDistribution::new(frame, entries).expect("discounted masses stay positive and sum to 1")
}
