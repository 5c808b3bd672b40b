//! Granular distributions: focal granules with exact masses summing to 1.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, Granule};
use crate::rational::Rational;

/// A mass function over a frame: pairwise-distinct nonempty granules
/// carrying strictly positive rational masses that sum to exactly 1.
///
/// Construction canonicalizes: duplicate granules are merged by summing
/// their masses, and focal elements are sorted by their membership mask,
/// so structurally equal distributions compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GranularDistribution {
    frame: Frame,
    focal: Vec<(Granule, Rational)>,
}

impl GranularDistribution {
    pub fn new<I>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Granule, Rational)>,
    {
        let mut by_mask: BTreeMap<u64, Rational> = BTreeMap::new();
        for (granule, mass) in entries {
            if *granule.frame() != frame {
                return Err(Error::FrameMismatch);
            }
            if !mass.is_positive() {
                return Err(Error::NonPositiveMass(mass));
            }
            match by_mask.entry(granule.bits()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(mass);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = e.get() + mass;
                    *e.get_mut() = merged;
                }
            }
        }
        let total: Rational = by_mask.values().sum();
        if !total.is_one() {
            return Err(Error::MassNotOne(total));
        }
        let focal = by_mask
            .into_iter()
            .map(|(bits, mass)| (frame.granule_from_bits(bits), mass))
            .collect();
        Ok(GranularDistribution { frame, focal })
    }

    /// Builds a distribution from label sets and rational text, e.g.
    /// `[(&["a"], "2/3"), (&["b"], "1/3")]`. This is the programmatic
    /// twin of the JSON input format.
    pub fn from_entries(frame: &Frame, entries: &[(&[&str], &str)]) -> Result<Self> {
        let parsed = entries
            .iter()
            .map(|(labels, mass)| {
                Ok((
                    frame.granule(labels.iter().copied())?,
                    Rational::parse(mass)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(frame.clone(), parsed)
    }

    /// Total ignorance: all mass on the whole frame.
    pub fn vacuous(frame: &Frame) -> Self {
        GranularDistribution {
            frame: frame.clone(),
            focal: vec![(frame.full_granule(), Rational::one())],
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Focal elements in canonical (mask) order.
    pub fn focal(&self) -> &[(Granule, Rational)] {
        &self.focal
    }

    pub fn len(&self) -> usize {
        self.focal.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: masses sum to 1, so there is at least one focal
    }

    /// The mass of exactly this granule (zero if it is not focal).
    pub fn mass(&self, granule: &Granule) -> Rational {
        self.focal
            .iter()
            .find(|(g, _)| g == granule)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.focal[0].0.is_full()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(text)?;
        file.into_distribution()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(DistributionFile::from(self)).expect("distribution serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DistributionFile::from(self)).expect("distribution serializes")
    }
}

impl fmt::Display for GranularDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .focal
            .iter()
            .map(|(g, m)| format!("({g}, {m})"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Wire format: `{"universe": [...], "focal": [{"set": [...], "mass": "p/q"}, ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionFile {
    universe: Vec<String>,
    focal: Vec<FocalEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FocalEntry {
    set: Vec<String>,
    mass: String,
}

impl DistributionFile {
    fn into_distribution(self) -> Result<GranularDistribution> {
        let frame = Frame::new(self.universe)?;
        let entries = self
            .focal
            .into_iter()
            .map(|e| Ok((frame.granule(&e.set)?, Rational::parse(&e.mass)?)))
            .collect::<Result<Vec<_>>>()?;
        GranularDistribution::new(frame, entries)
    }
}

impl From<&GranularDistribution> for DistributionFile {
    fn from(dist: &GranularDistribution) -> Self {
        DistributionFile {
            universe: dist.frame.labels().to_vec(),
            focal: dist
                .focal
                .iter()
                .map(|(g, m)| FocalEntry {
                    set: g.labels().iter().map(|s| s.to_string()).collect(),
                    mass: m.to_string(),
                })
                .collect(),
        }
    }
}
