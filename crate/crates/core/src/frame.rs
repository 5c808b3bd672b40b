//! Frames of discernment and set-valued cells.
//!
//! A [`Frame`] is the finite universe of attribute values. Subsets are
//! held as bitmasks over the frame's canonical element order (order of
//! first declaration), which makes intersection, containment and
//! disjointness single machine operations. [`Granule`] is the nonempty
//! subset used for focal elements and relation cells; the possibly-empty
//! [`Subset`] appears only as a query argument or intersection value.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug)]
struct FrameInner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

/// The finite universe of element labels, in canonical order.
///
/// Cloning is cheap (shared storage); equality compares label sequences,
/// so two frames declared with the same labels in the same order are the
/// same frame.
#[derive(Debug, Clone)]
pub struct Frame {
    inner: Arc<FrameInner>,
}

impl Frame {
    /// Upper bound on frame size imposed by the bitmask representation.
    pub const MAX_ELEMENTS: usize = 64;

    pub fn new<I, S>(labels: I) -> Result<Frame>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > Self::MAX_ELEMENTS {
            return Err(Error::FrameSize {
                got: labels.len(),
                max: Self::MAX_ELEMENTS,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateElement(label.clone()));
            }
        }
        Ok(Frame {
            inner: Arc::new(FrameInner { labels, index }),
        })
    }

    pub fn len(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: frames are nonempty
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.inner.index.contains_key(label)
    }

    /// Bitmask with one bit per element, all set.
    pub(crate) fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// A possibly-empty subset from labels; unknown labels are an error.
    pub fn subset<I, S>(&self, labels: I) -> Result<Subset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u64;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownElement(label.to_string()))?;
            bits |= 1 << i;
        }
        Ok(Subset {
            frame: self.clone(),
            bits,
        })
    }

    /// A nonempty subset from labels.
    pub fn granule<I, S>(&self, labels: I) -> Result<Granule>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Granule::try_from_subset(self.subset(labels)?)
    }

    pub fn empty_subset(&self) -> Subset {
        Subset {
            frame: self.clone(),
            bits: 0,
        }
    }

    pub fn full_subset(&self) -> Subset {
        Subset {
            frame: self.clone(),
            bits: self.full_mask(),
        }
    }

    /// The whole frame as a granule (the focal element of total
    /// ignorance).
    pub fn full_granule(&self) -> Granule {
        Granule {
            frame: self.clone(),
            bits: self.full_mask(),
        }
    }

    pub(crate) fn granule_from_bits(&self, bits: u64) -> Granule {
        debug_assert_ne!(bits, 0);
        debug_assert_eq!(bits & !self.full_mask(), 0);
        Granule {
            frame: self.clone(),
            bits,
        }
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }
}

impl Eq for Frame {}

fn labels_of(frame: &Frame, bits: u64) -> Vec<&str> {
    (0..frame.len())
        .filter(|i| bits & (1 << i) != 0)
        .map(|i| frame.label(i))
        .collect()
}

fn write_set(f: &mut fmt::Formatter<'_>, frame: &Frame, bits: u64) -> fmt::Result {
    write!(f, "{{{}}}", labels_of(frame, bits).join(","))
}

/// A subset of a frame, possibly empty. The empty set shows up as a
/// query or as the value of an intersection, never as a focal element.
#[derive(Debug, Clone)]
pub struct Subset {
    frame: Frame,
    bits: u64,
}

impl Subset {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub(crate) fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_full(&self) -> bool {
        self.bits == self.frame.full_mask()
    }

    pub fn contains(&self, label: &str) -> bool {
        match self.frame.index_of(label) {
            Some(i) => self.bits & (1 << i) != 0,
            None => false,
        }
    }

    /// Member labels in the frame's canonical order.
    pub fn labels(&self) -> Vec<&str> {
        labels_of(&self.frame, self.bits)
    }

    pub fn complement(&self) -> Subset {
        Subset {
            frame: self.frame.clone(),
            bits: self.frame.full_mask() & !self.bits,
        }
    }

    pub fn intersect(&self, other: &Subset) -> Result<Subset> {
        self.check_frame(&other.frame)?;
        Ok(Subset {
            frame: self.frame.clone(),
            bits: self.bits & other.bits,
        })
    }

    pub fn union(&self, other: &Subset) -> Result<Subset> {
        self.check_frame(&other.frame)?;
        Ok(Subset {
            frame: self.frame.clone(),
            bits: self.bits | other.bits,
        })
    }

    pub fn is_disjoint(&self, other: &Subset) -> Result<bool> {
        self.check_frame(&other.frame)?;
        Ok(self.bits & other.bits == 0)
    }

    pub fn subset_of(&self, other: &Subset) -> Result<bool> {
        self.check_frame(&other.frame)?;
        Ok(self.bits & !other.bits == 0)
    }

    fn check_frame(&self, other: &Frame) -> Result<()> {
        if self.frame == *other {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame && self.bits == other.bits
    }
}

impl Eq for Subset {}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, &self.frame, self.bits)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.labels())
    }
}

/// A nonempty subset of a frame: a focal element or relation cell.
#[derive(Debug, Clone)]
pub struct Granule {
    frame: Frame,
    bits: u64,
}

impl Granule {
    pub fn try_from_subset(subset: Subset) -> Result<Granule> {
        if subset.bits == 0 {
            return Err(Error::EmptyGranule);
        }
        Ok(Granule {
            frame: subset.frame,
            bits: subset.bits,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub(crate) fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: granules are nonempty
    }

    pub fn is_full(&self) -> bool {
        self.bits == self.frame.full_mask()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.as_subset_ref().contains(label)
    }

    pub fn labels(&self) -> Vec<&str> {
        labels_of(&self.frame, self.bits)
    }

    pub fn as_subset(&self) -> Subset {
        Subset {
            frame: self.frame.clone(),
            bits: self.bits,
        }
    }

    fn as_subset_ref(&self) -> Subset {
        self.as_subset()
    }

    /// Set intersection; this is the one operation whose value may be
    /// the empty set.
    pub fn intersect(&self, other: &Granule) -> Result<Subset> {
        self.as_subset().intersect(&other.as_subset())
    }

    pub fn is_disjoint(&self, other: &Granule) -> Result<bool> {
        self.as_subset().is_disjoint(&other.as_subset())
    }

    pub fn subset_of(&self, other: &Granule) -> Result<bool> {
        self.as_subset().subset_of(&other.as_subset())
    }
}

impl PartialEq for Granule {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame && self.bits == other.bits
    }
}

impl Eq for Granule {}

impl fmt::Display for Granule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, &self.frame, self.bits)
    }
}

impl Serialize for Granule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.labels())
    }
}
