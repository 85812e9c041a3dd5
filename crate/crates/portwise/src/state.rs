//! Complex state vectors over unordered finite label sets.
//!
//! A [`LabeledState`] stores one amplitude per assignment of bits to its
//! labels. The amplitude vector is laid out in the canonical basis: labels
//! sorted by byte order, the first label owning the most significant bit of
//! the basis index. Label sets are the only identity a factor has; changing
//! them is only possible through an explicit bijection ([`LabeledState::reindex`]).

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use thiserror::Error;

use crate::label::{canonical_order, BitAssignment, Label, LabelSet};
use crate::matrix::CMatrix;

/// Hard cap on state width; the representation is a dense vector of
/// `2^n` amplitudes.
pub const MAX_STATE_QUBITS: usize = 20;

/// Tolerance used by [`LabeledState::is_normalized`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitude vector has length {found}, expected {expected}")]
    AmplitudeLength { expected: usize, found: usize },
    #[error("state over {count} labels exceeds the supported maximum of {max}")]
    TooManyQubits { count: usize, max: usize },
    #[error("label sets do not match")]
    DomainMismatch,
    #[error("mapping is not defined on exactly the state's labels")]
    MappingDomainMismatch,
    #[error("mapping is not injective: {0} is hit twice")]
    NotInjective(Label),
    #[error("label sets are not disjoint: {0} appears in both")]
    LabelCollision(Label),
    #[error("target label {0} is not in the state")]
    UnknownTarget(Label),
    #[error("target label {0} is repeated")]
    DuplicateTarget(Label),
    #[error("operator is {rows}x{cols}, expected {expected}x{expected}")]
    DimensionMismatch { rows: usize, cols: usize, expected: usize },
    #[error("output label {0} collides with an untouched label")]
    OutputLabelCollision(Label),
    #[error("assignment is not total on the state's labels")]
    AssignmentMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    labels: LabelSet,
    amplitudes: Vec<Complex64>,
}

impl LabeledState {
    pub fn new(labels: LabelSet, amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n = labels.len();
        if n > MAX_STATE_QUBITS {
            return Err(StateError::TooManyQubits { count: n, max: MAX_STATE_QUBITS });
        }
        let expected = 1usize << n;
        if amplitudes.len() != expected {
            return Err(StateError::AmplitudeLength { expected, found: amplitudes.len() });
        }
        Ok(LabeledState { labels, amplitudes })
    }

    /// The scalar state over the empty label set with amplitude 1; the unit
    /// of [`tensor_merge`].
    pub fn unit_scalar() -> Self {
        LabeledState {
            labels: LabelSet::new(),
            amplitudes: vec![Complex64::ONE],
        }
    }

    /// The basis state selected by a total bit assignment.
    pub fn basis(labels: LabelSet, bits: &BitAssignment) -> Result<Self, StateError> {
        if !bits.is_total_on(&labels) {
            return Err(StateError::AssignmentMismatch);
        }
        let order = canonical_order(&labels);
        let index = bits.index_in(&order).expect("assignment is total");
        let mut state = LabeledState::zeros(labels)?;
        state.amplitudes[index] = Complex64::ONE;
        Ok(state)
    }

    /// The all-zeros basis state |0...0⟩.
    pub fn all_zeros(labels: LabelSet) -> Result<Self, StateError> {
        let mut state = LabeledState::zeros(labels)?;
        state.amplitudes[0] = Complex64::ONE;
        Ok(state)
    }

    fn zeros(labels: LabelSet) -> Result<Self, StateError> {
        let n = labels.len();
        if n > MAX_STATE_QUBITS {
            return Err(StateError::TooManyQubits { count: n, max: MAX_STATE_QUBITS });
        }
        Ok(LabeledState {
            labels,
            amplitudes: vec![Complex64::ZERO; 1usize << n],
        })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude at a total bit assignment over the state's labels.
    pub fn amplitude(&self, bits: &BitAssignment) -> Result<Complex64, StateError> {
        if !bits.is_total_on(&self.labels) {
            return Err(StateError::AssignmentMismatch);
        }
        let order = canonical_order(&self.labels);
        Ok(self.amplitudes[bits.index_in(&order).expect("assignment is total")])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    /// Largest per-amplitude distance to `other`, which must be over the
    /// same labels.
    pub fn max_deviation(&self, other: &LabeledState) -> Result<f64, StateError> {
        if self.labels != other.labels {
            return Err(StateError::DomainMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Transports the state along a bijection of labels.
    ///
    /// `mapping` must be defined on exactly the state's labels and must be
    /// injective. The amplitude at an assignment `b` of the new state equals
    /// the amplitude of `self` at `b` composed with the mapping, so applying
    /// the inverse mapping afterwards restores `self` exactly.
    pub fn reindex(&self, mapping: &BTreeMap<Label, Label>) -> Result<LabeledState, StateError> {
        let n = self.labels.len();
        if mapping.len() != n || !mapping.keys().all(|l| self.labels.contains(l)) {
            return Err(StateError::MappingDomainMismatch);
        }
        let mut images = BTreeSet::new();
        for image in mapping.values() {
            if !images.insert(image.clone()) {
                return Err(StateError::NotInjective(image.clone()));
            }
        }
        let new_labels: LabelSet = images.into_iter().collect();
        let new_order = canonical_order(&new_labels);

        // new bit position of each old bit position
        let mut new_pos = Vec::with_capacity(n);
        for label in self.labels.iter() {
            let image = &mapping[label];
            new_pos.push(new_order.iter().position(|l| l == image).expect("image present"));
        }

        let mut amplitudes = vec![Complex64::ZERO; self.amplitudes.len()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let mut j = 0usize;
            for (p, q) in new_pos.iter().enumerate() {
                if (i >> (n - 1 - p)) & 1 == 1 {
                    j |= 1 << (n - 1 - q);
                }
            }
            amplitudes[j] = *amp;
        }
        Ok(LabeledState { labels: new_labels, amplitudes })
    }

    /// Applies a local operator to the `targets_in` factors, renaming them
    /// to `targets_out`.
    ///
    /// `op` is a `2^k × 2^k` matrix whose input (column) basis is indexed by
    /// `targets_in` and output (row) basis by `targets_out`, the first listed
    /// label being the most significant bit in both cases. Labels outside
    /// `targets_in` are untouched and keep their amplitudes' roles; the output
    /// labels must not collide with them.
    pub fn apply_local(
        &self,
        targets_in: &[Label],
        op: &CMatrix,
        targets_out: &[Label],
    ) -> Result<LabeledState, StateError> {
        let n = self.labels.len();
        let k = targets_in.len();
        let dim = 1usize << k;
        if targets_out.len() != k || op.rows() != dim || op.cols() != dim {
            return Err(StateError::DimensionMismatch {
                rows: op.rows(),
                cols: op.cols(),
                expected: dim,
            });
        }

        let mut seen = BTreeSet::new();
        for t in targets_in {
            if !self.labels.contains(t) {
                return Err(StateError::UnknownTarget(t.clone()));
            }
            if !seen.insert(t.clone()) {
                return Err(StateError::DuplicateTarget(t.clone()));
            }
        }

        let target_set: LabelSet = targets_in.iter().cloned().collect();
        let rest = self.labels.difference(&target_set);
        let mut out_seen = BTreeSet::new();
        for t in targets_out {
            if rest.contains(t) {
                return Err(StateError::OutputLabelCollision(t.clone()));
            }
            if !out_seen.insert(t.clone()) {
                return Err(StateError::DuplicateTarget(t.clone()));
            }
        }

        let new_labels = rest.union(&targets_out.iter().cloned().collect());
        debug_assert_eq!(new_labels.len(), n);

        let old_order = canonical_order(&self.labels);
        let new_order = canonical_order(&new_labels);
        let old_pos = |l: &Label| old_order.iter().position(|x| x == l).expect("present");
        let new_pos = |l: &Label| new_order.iter().position(|x| x == l).expect("present");

        let in_weight: Vec<usize> = targets_in.iter().map(|t| 1usize << (n - 1 - old_pos(t))).collect();
        let out_weight: Vec<usize> = targets_out.iter().map(|t| 1usize << (n - 1 - new_pos(t))).collect();
        let rest_order = canonical_order(&rest);
        let rest_old: Vec<usize> = rest_order.iter().map(|t| 1usize << (n - 1 - old_pos(t))).collect();
        let rest_new: Vec<usize> = rest_order.iter().map(|t| 1usize << (n - 1 - new_pos(t))).collect();

        // offsets of every target sub-assignment, in operator basis order
        let mut in_offset = vec![0usize; dim];
        let mut out_offset = vec![0usize; dim];
        for j in 0..dim {
            for (slot, (wi, wo)) in in_weight.iter().zip(&out_weight).enumerate() {
                if (j >> (k - 1 - slot)) & 1 == 1 {
                    in_offset[j] += wi;
                    out_offset[j] += wo;
                }
            }
        }

        let r = n - k;
        let mut amplitudes = vec![Complex64::ZERO; self.amplitudes.len()];
        for block in 0..1usize << r {
            let mut base_old = 0usize;
            let mut base_new = 0usize;
            for (b, (wo, wn)) in rest_old.iter().zip(&rest_new).enumerate() {
                if (block >> (r - 1 - b)) & 1 == 1 {
                    base_old += wo;
                    base_new += wn;
                }
            }
            for (row, off_out) in out_offset.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for (col, off_in) in in_offset.iter().enumerate() {
                    acc += op.get(row, col) * self.amplitudes[base_old + off_in];
                }
                amplitudes[base_new + off_out] = acc;
            }
        }
        Ok(LabeledState { labels: new_labels, amplitudes })
    }
}

/// Product state over the disjoint union of two label sets.
///
/// The amplitude at an assignment is the product of the factors' amplitudes
/// at its restrictions. Since label sets are unordered, the operation is
/// symmetric: both argument orders produce the identical state.
pub fn tensor_merge(a: &LabeledState, b: &LabeledState) -> Result<LabeledState, StateError> {
    if let Some(shared) = a.labels.intersection(&b.labels).iter().next() {
        return Err(StateError::LabelCollision(shared.clone()));
    }
    let labels = a.labels.union(&b.labels);
    let n = labels.len();
    if n > MAX_STATE_QUBITS {
        return Err(StateError::TooManyQubits { count: n, max: MAX_STATE_QUBITS });
    }
    let order = canonical_order(&labels);
    let pos = |l: &Label| order.iter().position(|x| x == l).expect("present");

    let offsets = |side: &LabeledState| -> Vec<usize> {
        let m = side.labels.len();
        let weights: Vec<usize> = side.labels.iter().map(|l| 1usize << (n - 1 - pos(l))).collect();
        (0..1usize << m)
            .map(|i| {
                weights
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| (i >> (m - 1 - p)) & 1 == 1)
                    .map(|(_, w)| w)
                    .sum()
            })
            .collect()
    };
    let off_a = offsets(a);
    let off_b = offsets(b);

    let mut amplitudes = vec![Complex64::ZERO; 1usize << n];
    for (ia, &oa) in off_a.iter().enumerate() {
        let amp_a = a.amplitudes[ia];
        for (ib, &ob) in off_b.iter().enumerate() {
            amplitudes[oa + ob] = amp_a * b.amplitudes[ib];
        }
    }
    Ok(LabeledState { labels, amplitudes })
}

/// Hermitian inner product ⟨a|b⟩, conjugate-linear in the first argument.
pub fn inner_product(a: &LabeledState, b: &LabeledState) -> Result<Complex64, StateError> {
    if a.labels != b.labels {
        return Err(StateError::DomainMismatch);
    }
    Ok(a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}
