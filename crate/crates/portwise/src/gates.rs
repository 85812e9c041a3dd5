//! Ready-made gate types for common reversible and quantum gates.
//!
//! These are conveniences for building circuits in code; every one of them
//! can also be written out longhand in a circuit document. Slot labels are
//! passed in by the caller because gate types are reused across gates with
//! different wiring.
//!
//! # Panics
//!
//! All constructors panic on empty labels or repeated labels; they are meant
//! for literal label arguments.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::gate::{BooleanGateType, QuantumGateType};
use crate::label::{BitAssignment, Label, LabelSet};
use crate::matrix::CMatrix;

fn lbl(s: &str) -> Label {
    Label::new(s).expect("gate slot labels must be nonempty")
}

fn lset(names: &[&str]) -> LabelSet {
    names.iter().map(|s| lbl(s)).collect()
}

fn bit(bits: &BitAssignment, name: &str) -> bool {
    bits.get(&lbl(name)).expect("slot label present")
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One-bit identity, `output = input`.
pub fn wire(input: &str, output: &str) -> BooleanGateType {
    let out = lbl(output);
    BooleanGateType::from_fn(lset(&[input]), lset(&[output]), move |bits| {
        [(out.clone(), bit(bits, input))].into_iter().collect()
    })
    .expect("well-formed table")
}

/// One-bit negation.
pub fn not(input: &str, output: &str) -> BooleanGateType {
    let out = lbl(output);
    BooleanGateType::from_fn(lset(&[input]), lset(&[output]), move |bits| {
        [(out.clone(), !bit(bits, input))].into_iter().collect()
    })
    .expect("well-formed table")
}

pub fn and(a: &str, b: &str, output: &str) -> BooleanGateType {
    let out = lbl(output);
    BooleanGateType::from_fn(lset(&[a, b]), lset(&[output]), move |bits| {
        [(out.clone(), bit(bits, a) && bit(bits, b))].into_iter().collect()
    })
    .expect("well-formed table")
}

pub fn xor(a: &str, b: &str, output: &str) -> BooleanGateType {
    let out = lbl(output);
    BooleanGateType::from_fn(lset(&[a, b]), lset(&[output]), move |bits| {
        [(out.clone(), bit(bits, a) ^ bit(bits, b))].into_iter().collect()
    })
    .expect("well-formed table")
}

/// Reversible controlled-not: `(a, b) ↦ (a, a ⊕ b)`.
pub fn cnot_table(inputs: [&str; 2], outputs: [&str; 2]) -> BooleanGateType {
    let [ia, ib] = inputs;
    let [oa, ob] = outputs.map(lbl);
    BooleanGateType::from_fn(lset(&inputs), lset(&outputs), move |bits| {
        let a = bit(bits, ia);
        let b = bit(bits, ib);
        [(oa.clone(), a), (ob.clone(), a ^ b)].into_iter().collect()
    })
    .expect("well-formed table")
}

/// Toffoli gate: the third bit flips when the first two are set.
pub fn toffoli(inputs: [&str; 3], outputs: [&str; 3]) -> BooleanGateType {
    let [ia, ib, ic] = inputs;
    let [oa, ob, oc] = outputs.map(lbl);
    BooleanGateType::from_fn(lset(&inputs), lset(&outputs), move |bits| {
        let a = bit(bits, ia);
        let b = bit(bits, ib);
        let cc = bit(bits, ic);
        [(oa.clone(), a), (ob.clone(), b), (oc.clone(), cc ^ (a && b))]
            .into_iter()
            .collect()
    })
    .expect("well-formed table")
}

/// Fredkin gate: the last two bits swap when the first is set.
pub fn fredkin(inputs: [&str; 3], outputs: [&str; 3]) -> BooleanGateType {
    let [ia, ib, ic] = inputs;
    let [oa, ob, oc] = outputs.map(lbl);
    BooleanGateType::from_fn(lset(&inputs), lset(&outputs), move |bits| {
        let a = bit(bits, ia);
        let b = bit(bits, ib);
        let cc = bit(bits, ic);
        let (x, y) = if a { (cc, b) } else { (b, cc) };
        [(oa.clone(), a), (ob.clone(), x), (oc.clone(), y)].into_iter().collect()
    })
    .expect("well-formed table")
}

fn quantum(inputs: Vec<Label>, outputs: Vec<Label>, rows: Vec<Vec<Complex64>>) -> QuantumGateType {
    let matrix = CMatrix::from_rows(rows).expect("well-formed matrix literal");
    QuantumGateType::new(inputs, outputs, matrix).expect("well-formed gate")
}

pub fn hadamard(input: &str, output: &str) -> QuantumGateType {
    let s = FRAC_1_SQRT_2;
    quantum(
        vec![lbl(input)],
        vec![lbl(output)],
        vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]],
    )
}

pub fn pauli_x(input: &str, output: &str) -> QuantumGateType {
    quantum(
        vec![lbl(input)],
        vec![lbl(output)],
        vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
    )
}

pub fn pauli_z(input: &str, output: &str) -> QuantumGateType {
    quantum(
        vec![lbl(input)],
        vec![lbl(output)],
        vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
    )
}

/// Phase gate `diag(1, e^{iθ})`.
pub fn phase(theta: f64, input: &str, output: &str) -> QuantumGateType {
    quantum(
        vec![lbl(input)],
        vec![lbl(output)],
        vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(theta.cos(), theta.sin())],
        ],
    )
}

/// Controlled-not; the first slot is the control.
pub fn cnot(inputs: [&str; 2], outputs: [&str; 2]) -> QuantumGateType {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    quantum(
        inputs.map(lbl).to_vec(),
        outputs.map(lbl).to_vec(),
        vec![
            vec![l, o, o, o],
            vec![o, l, o, o],
            vec![o, o, o, l],
            vec![o, o, l, o],
        ],
    )
}

pub fn swap(inputs: [&str; 2], outputs: [&str; 2]) -> QuantumGateType {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    quantum(
        inputs.map(lbl).to_vec(),
        outputs.map(lbl).to_vec(),
        vec![
            vec![l, o, o, o],
            vec![o, o, l, o],
            vec![o, l, o, o],
            vec![o, o, o, l],
        ],
    )
}
