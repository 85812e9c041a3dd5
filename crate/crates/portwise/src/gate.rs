//! Gate types: unordered input/output label sets plus semantics.
//!
//! A Boolean gate carries an explicit truth table, a quantum gate a complex
//! matrix. Label sets have no order, so a matrix on its own would be
//! meaningless: quantum gate types also carry declared slot orders, and the
//! matrix is read relative to those. The declared orders are serialization
//! metadata, not mathematics — re-declaring a gate with permuted orders and a
//! correspondingly permuted matrix is the same gate.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::label::{all_assignments, canonical_order, BitAssignment, Label, LabelSet};
use crate::matrix::CMatrix;

/// Boolean gate tables are stored explicitly, one row per input assignment.
pub const MAX_GATE_ARITY: usize = 10;

/// Frobenius tolerance for accepting a gate matrix as unitary. Loose enough
/// to admit matrices written as 15-digit decimal literals.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateTypeError {
    #[error("gate has {count} input labels, more than the supported {max}")]
    TooManyInputs { count: usize, max: usize },
    #[error("truth table has {found} rows, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("truth table row is not total on the gate's labels")]
    TableRowDomain,
    #[error("label {0} is repeated in a declared slot order")]
    DuplicateLabel(Label),
    #[error("gate has {inputs} input slots but {outputs} output slots")]
    ArityMismatch { inputs: usize, outputs: usize },
    #[error("gate matrix is {rows}x{cols}, expected {expected}x{expected}")]
    MatrixShape { rows: usize, cols: usize, expected: usize },
    #[error("gate table is not bijective")]
    NotBijective,
}

/// Shared structural view of a gate: its input and output label sets.
pub trait GatePorts {
    fn input_labels(&self) -> &LabelSet;
    fn output_labels(&self) -> &LabelSet;
    /// Structural fingerprint, mixed into the owning circuit's identity.
    fn fingerprint(&self) -> u64;
}

/// A Boolean function `{0,1}^inputs → {0,1}^outputs` given by its table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanGateType {
    inputs: LabelSet,
    outputs: LabelSet,
    table: BTreeMap<BitAssignment, BitAssignment>,
}

impl BooleanGateType {
    pub fn new(
        inputs: LabelSet,
        outputs: LabelSet,
        table: BTreeMap<BitAssignment, BitAssignment>,
    ) -> Result<Self, GateTypeError> {
        if inputs.len() > MAX_GATE_ARITY {
            return Err(GateTypeError::TooManyInputs {
                count: inputs.len(),
                max: MAX_GATE_ARITY,
            });
        }
        let expected = 1usize << inputs.len();
        if table.len() != expected {
            return Err(GateTypeError::TableSize { expected, found: table.len() });
        }
        for (row, value) in &table {
            if !row.is_total_on(&inputs) || !value.is_total_on(&outputs) {
                return Err(GateTypeError::TableRowDomain);
            }
        }
        Ok(BooleanGateType { inputs, outputs, table })
    }

    /// Builds the table by evaluating `f` on every input assignment.
    pub fn from_fn(
        inputs: LabelSet,
        outputs: LabelSet,
        f: impl Fn(&BitAssignment) -> BitAssignment,
    ) -> Result<Self, GateTypeError> {
        if inputs.len() > MAX_GATE_ARITY {
            return Err(GateTypeError::TooManyInputs {
                count: inputs.len(),
                max: MAX_GATE_ARITY,
            });
        }
        let table = all_assignments(&inputs).map(|a| {
            let out = f(&a);
            (a, out)
        });
        BooleanGateType::new(inputs, outputs, table.collect())
    }

    pub fn table(&self) -> &BTreeMap<BitAssignment, BitAssignment> {
        &self.table
    }

    /// Output assignment for a total input assignment.
    pub fn apply(&self, input: &BitAssignment) -> Option<&BitAssignment> {
        self.table.get(input)
    }

    /// True when the table is a bijection onto the full output space.
    pub fn is_bijective(&self) -> bool {
        if self.inputs.len() != self.outputs.len() {
            return false;
        }
        let distinct: BTreeSet<&BitAssignment> = self.table.values().collect();
        distinct.len() == self.table.len()
    }
}

impl GatePorts for BooleanGateType {
    fn input_labels(&self) -> &LabelSet {
        &self.inputs
    }

    fn output_labels(&self) -> &LabelSet {
        &self.outputs
    }

    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        0u8.hash(&mut h);
        for l in self.inputs.iter() {
            l.as_str().hash(&mut h);
        }
        for l in self.outputs.iter() {
            l.as_str().hash(&mut h);
        }
        for (row, value) in &self.table {
            for (l, b) in row.iter() {
                l.as_str().hash(&mut h);
                b.hash(&mut h);
            }
            for (l, b) in value.iter() {
                l.as_str().hash(&mut h);
                b.hash(&mut h);
            }
        }
        h.finish()
    }
}

/// A gate acting on qubit factors by a complex matrix.
///
/// The matrix has `2^k` rows and columns, `k` being the common slot count.
/// Columns are indexed by assignments to `input_order` and rows by
/// assignments to `output_order`, first slot most significant.
///
/// Construction checks shape only; whether the matrix is actually unitary is
/// a circuit-level check, so that ill-specified gates can be diagnosed
/// rather than refused representation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumGateType {
    inputs: LabelSet,
    input_order: Vec<Label>,
    outputs: LabelSet,
    output_order: Vec<Label>,
    matrix: CMatrix,
}

impl QuantumGateType {
    pub fn new(
        input_order: Vec<Label>,
        output_order: Vec<Label>,
        matrix: CMatrix,
    ) -> Result<Self, GateTypeError> {
        let inputs = distinct_set(&input_order)?;
        let outputs = distinct_set(&output_order)?;
        if inputs.len() != outputs.len() {
            return Err(GateTypeError::ArityMismatch {
                inputs: inputs.len(),
                outputs: outputs.len(),
            });
        }
        if inputs.len() > MAX_GATE_ARITY {
            return Err(GateTypeError::TooManyInputs {
                count: inputs.len(),
                max: MAX_GATE_ARITY,
            });
        }
        let expected = 1usize << inputs.len();
        if matrix.rows() != expected || matrix.cols() != expected {
            return Err(GateTypeError::MatrixShape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                expected,
            });
        }
        Ok(QuantumGateType { inputs, input_order, outputs, output_order, matrix })
    }

    /// Lifts a bijective Boolean gate to the permutation matrix acting the
    /// same way on basis states. Slot orders are the canonical orders of the
    /// Boolean gate's label sets.
    pub fn from_boolean(gate: &BooleanGateType) -> Result<Self, GateTypeError> {
        if !gate.is_bijective() {
            return Err(GateTypeError::NotBijective);
        }
        let input_order = canonical_order(gate.input_labels());
        let output_order = canonical_order(gate.output_labels());
        let dim = 1usize << input_order.len();
        let mut matrix = CMatrix::zeros(dim, dim);
        for (row, value) in gate.table() {
            let col = row.index_in(&input_order).expect("table row is total");
            let out = value.index_in(&output_order).expect("table value is total");
            matrix.set(out, col, num_complex::Complex64::ONE);
        }
        QuantumGateType::new(input_order, output_order, matrix)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn input_order(&self) -> &[Label] {
        &self.input_order
    }

    pub fn output_order(&self) -> &[Label] {
        &self.output_order
    }

    pub fn arity(&self) -> usize {
        self.input_order.len()
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.matrix.unitarity_deviation()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= UNITARITY_TOLERANCE
    }
}

impl GatePorts for QuantumGateType {
    fn input_labels(&self) -> &LabelSet {
        &self.inputs
    }

    fn output_labels(&self) -> &LabelSet {
        &self.outputs
    }

    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        1u8.hash(&mut h);
        for l in &self.input_order {
            l.as_str().hash(&mut h);
        }
        for l in &self.output_order {
            l.as_str().hash(&mut h);
        }
        for r in 0..self.matrix.rows() {
            for c in 0..self.matrix.cols() {
                let z = self.matrix.get(r, c);
                z.re.to_bits().hash(&mut h);
                z.im.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

fn distinct_set(order: &[Label]) -> Result<LabelSet, GateTypeError> {
    let mut set = LabelSet::new();
    for l in order {
        if !set.insert(l.clone()) {
            return Err(GateTypeError::DuplicateLabel(l.clone()));
        }
    }
    Ok(set)
}
