//! Labels, finite label sets, and bit assignments.
//!
//! Index sets carry no intrinsic order. Whenever an order is needed to lay a
//! family out in memory (amplitude vectors, truth-table rows, bit strings on
//! the command line), the *canonical order* is used: members sorted by the
//! byte order of their text. That order is an artifact of storage, not part
//! of the data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("labels must be nonempty")]
    Empty,
}

/// Errors from reading a bit string against an ordered list of labels.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitStringError {
    #[error("expected {expected} bits, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid bit {found:?} at position {position}")]
    InvalidBit { position: usize, found: char },
    #[error("label {0} appears more than once in the bit order")]
    DuplicateLabel(Label),
}

/// An opaque identifier for a circuit position.
///
/// Labels compare by the byte order of their text; two labels are equal
/// exactly when their texts are byte-equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Self, LabelError> {
        let text = text.into();
        if text.is_empty() {
            return Err(LabelError::Empty);
        }
        Ok(Label(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<&str> for Label {
    type Error = LabelError;

    fn try_from(text: &str) -> Result<Self, LabelError> {
        Label::new(text)
    }
}

/// A finite set of labels. Iteration always follows the canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelSet(BTreeSet<Label>);

impl LabelSet {
    pub fn new() -> Self {
        LabelSet(BTreeSet::new())
    }

    /// Returns false if the label was already present.
    pub fn insert(&mut self, label: Label) -> bool {
        self.0.insert(label)
    }

    pub fn remove(&mut self, label: &Label) -> bool {
        self.0.remove(label)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.0.contains(label)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Label> {
        self.0.iter()
    }

    pub fn union(&self, other: &LabelSet) -> LabelSet {
        LabelSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &LabelSet) -> LabelSet {
        LabelSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &LabelSet) -> LabelSet {
        LabelSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_disjoint(&self, other: &LabelSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &LabelSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Position of `label` in the canonical order, if present.
    pub fn position_of(&self, label: &Label) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }
}

impl FromIterator<Label> for LabelSet {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        LabelSet(iter.into_iter().collect())
    }
}

impl IntoIterator for LabelSet {
    type Item = Label;
    type IntoIter = std::collections::btree_set::IntoIter<Label>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a LabelSet {
    type Item = &'a Label;
    type IntoIter = std::collections::btree_set::Iter<'a, Label>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, label) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{label}")?;
        }
        write!(f, "}}")
    }
}

/// The members of `labels` sorted by the byte order of their text.
///
/// Deterministic across runs; the basis convention for states and tables is
/// defined in terms of this order.
pub fn canonical_order(labels: &LabelSet) -> Vec<Label> {
    labels.iter().cloned().collect()
}

/// A total assignment of bits to a finite set of labels.
///
/// The domain is the key set; the mapping is defined nowhere else.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitAssignment(BTreeMap<Label, bool>);

impl BitAssignment {
    pub fn new() -> Self {
        BitAssignment(BTreeMap::new())
    }

    pub fn set(&mut self, label: Label, bit: bool) {
        self.0.insert(label, bit);
    }

    pub fn get(&self, label: &Label) -> Option<bool> {
        self.0.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, bool)> {
        self.0.iter().map(|(l, b)| (l, *b))
    }

    pub fn domain(&self) -> LabelSet {
        self.0.keys().cloned().collect()
    }

    /// True when the domain is exactly `labels`.
    pub fn is_total_on(&self, labels: &LabelSet) -> bool {
        self.0.len() == labels.len() && self.0.keys().all(|l| labels.contains(l))
    }

    /// The assignment restricted to the labels in `keep`.
    pub fn restrict(&self, keep: &LabelSet) -> BitAssignment {
        BitAssignment(
            self.0
                .iter()
                .filter(|(l, _)| keep.contains(l))
                .map(|(l, b)| (l.clone(), *b))
                .collect(),
        )
    }

    /// Basis index of this assignment with respect to `order`.
    ///
    /// `order[0]` is the most significant bit. Returns `None` if some label
    /// of `order` has no bit here.
    pub fn index_in(&self, order: &[Label]) -> Option<usize> {
        let mut index = 0usize;
        for label in order {
            index = (index << 1) | usize::from(self.get(label)?);
        }
        Some(index)
    }

    /// The assignment over exactly the labels of `order` encoded by `index`
    /// (big-endian, `order[0]` most significant).
    pub fn from_index(order: &[Label], index: usize) -> BitAssignment {
        debug_assert!(order.len() >= usize::BITS as usize || index < (1usize << order.len()));
        let n = order.len();
        let mut map = BTreeMap::new();
        for (k, label) in order.iter().enumerate() {
            map.insert(label.clone(), (index >> (n - 1 - k)) & 1 == 1);
        }
        BitAssignment(map)
    }

    /// Renders the bits of `order` as a `0`/`1` string.
    pub fn bit_string(&self, order: &[Label]) -> Option<String> {
        order
            .iter()
            .map(|l| self.get(l).map(|b| if b { '1' } else { '0' }))
            .collect()
    }

    /// Reads a `0`/`1` string where position `k` gives the bit of `order[k]`.
    pub fn parse_bit_string(order: &[Label], bits: &str) -> Result<BitAssignment, BitStringError> {
        let chars: Vec<char> = bits.chars().collect();
        if chars.len() != order.len() {
            return Err(BitStringError::LengthMismatch {
                expected: order.len(),
                found: chars.len(),
            });
        }
        let mut map = BTreeMap::new();
        for (position, (label, ch)) in order.iter().zip(chars).enumerate() {
            let bit = match ch {
                '0' => false,
                '1' => true,
                found => return Err(BitStringError::InvalidBit { position, found }),
            };
            if map.insert(label.clone(), bit).is_some() {
                return Err(BitStringError::DuplicateLabel(label.clone()));
            }
        }
        Ok(BitAssignment(map))
    }
}

impl FromIterator<(Label, bool)> for BitAssignment {
    fn from_iter<I: IntoIterator<Item = (Label, bool)>>(iter: I) -> Self {
        BitAssignment(iter.into_iter().collect())
    }
}

/// All assignments over `labels`, in canonical index order.
pub fn all_assignments(labels: &LabelSet) -> impl Iterator<Item = BitAssignment> {
    let order = canonical_order(labels);
    assert!(order.len() < 32, "label set too large to enumerate");
    (0..1usize << order.len()).map(move |i| BitAssignment::from_index(&order, i))
}
