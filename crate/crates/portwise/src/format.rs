//! The circuit document format.
//!
//! Documents are JSON. A document declares its kind (`"boolean"` or
//! `"quantum"`), its input and output node labels, its gates, and its wires.
//! Wire endpoints use the reference grammar of [`NodeRef`]: `in:w` and
//! `out:w` for circuit nodes, `gate.label:in` / `gate.label:out` for ports.
//!
//! Gate semantics are explicit: Boolean gates carry truth-table rows as pairs
//! of bit strings read against the gate's `input_labels` / `output_labels`
//! orders; quantum gates carry a row-major matrix of `[re, im]` pairs in the
//! same basis convention (first listed label = most significant bit). No
//! expression syntax exists — write `0.7071067811865476`, not `1/sqrt(2)`.
//!
//! Parsing is total: malformed input yields positioned diagnostics, never a
//! panic. A successfully parsed circuit always passes [`Circuit::validate`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{BooleanCircuit, Circuit, QuantumCircuit, ValidationReport};
use crate::gate::{BooleanGateType, GatePorts, QuantumGateType};
use crate::label::{canonical_order, BitAssignment, Label, LabelSet};
use crate::matrix::CMatrix;
use crate::node::{GateId, NodeRef};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    kind: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    #[serde(default)]
    gates: Vec<DocumentGate>,
    #[serde(default)]
    wires: Vec<DocumentWire>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentGate {
    name: String,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentWire {
    consumer: String,
    producer: String,
}

/// A positioned problem found while reading a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Path-style location, e.g. `gates[2]` or `wires[0]`; empty for
    /// document-level problems.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.location.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.location, self.message)
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid circuit document:\n{}", format_diagnostics(.0))]
    Semantic(Vec<Diagnostic>),
}

fn format_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

/// A parsed circuit of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyCircuit {
    Boolean(BooleanCircuit),
    Quantum(QuantumCircuit),
}

impl AnyCircuit {
    pub fn kind_name(&self) -> &'static str {
        match self {
            AnyCircuit::Boolean(_) => "boolean",
            AnyCircuit::Quantum(_) => "quantum",
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            AnyCircuit::Boolean(c) => c.validate(),
            AnyCircuit::Quantum(c) => c.validate(),
        }
    }

    pub fn as_boolean(&self) -> Option<&BooleanCircuit> {
        match self {
            AnyCircuit::Boolean(c) => Some(c),
            AnyCircuit::Quantum(_) => None,
        }
    }

    pub fn as_quantum(&self) -> Option<&QuantumCircuit> {
        match self {
            AnyCircuit::Quantum(c) => Some(c),
            AnyCircuit::Boolean(_) => None,
        }
    }

    pub fn gate_count(&self) -> usize {
        match self {
            AnyCircuit::Boolean(c) => c.gate_count(),
            AnyCircuit::Quantum(c) => c.gate_count(),
        }
    }
}

/// Parses a circuit document, returning a validated circuit or every
/// diagnostic found.
pub fn parse_document(text: &str) -> Result<AnyCircuit, DocumentError> {
    let document: Document = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    document_to_circuit(&document)
}

fn document_to_circuit(document: &Document) -> Result<AnyCircuit, DocumentError> {
    let is_quantum = match document.kind.as_str() {
        "boolean" => false,
        "quantum" => true,
        other => {
            return Err(DocumentError::Semantic(vec![Diagnostic {
                location: "kind".into(),
                message: format!(
                    "unknown circuit kind {other:?}; expected \"boolean\" or \"quantum\""
                ),
            }]));
        }
    };

    let mut errors: Vec<Diagnostic> = Vec::new();
    let inputs = node_label_set("inputs", &document.inputs, &mut errors);
    let outputs = node_label_set("outputs", &document.outputs, &mut errors);

    // gates, each parsed to the matching semantics
    let mut bool_gates: BTreeMap<GateId, BooleanGateType> = BTreeMap::new();
    let mut quantum_gates: BTreeMap<GateId, QuantumGateType> = BTreeMap::new();
    for (i, gate) in document.gates.iter().enumerate() {
        let location = format!("gates[{i}]");
        let Some(id) = parse_gate_id(&location, &gate.name, &mut errors) else {
            continue;
        };
        if bool_gates.contains_key(&id) || quantum_gates.contains_key(&id) {
            errors.push(Diagnostic {
                location,
                message: format!("duplicate gate name {:?}", gate.name),
            });
            continue;
        }
        let input_order = parse_order(&location, "input_labels", &gate.input_labels, &mut errors);
        let output_order =
            parse_order(&location, "output_labels", &gate.output_labels, &mut errors);
        let (Some(input_order), Some(output_order)) = (input_order, output_order) else {
            continue;
        };
        match (is_quantum, &gate.table, &gate.matrix) {
            (false, Some(rows), None) => {
                if let Some(parsed) =
                    parse_table(&location, &input_order, &output_order, rows, &mut errors)
                {
                    bool_gates.insert(id, parsed);
                }
            }
            (true, None, Some(rows)) => {
                if let Some(parsed) =
                    parse_matrix(&location, &input_order, &output_order, rows, &mut errors)
                {
                    quantum_gates.insert(id, parsed);
                }
            }
            (false, _, Some(_)) => errors.push(Diagnostic {
                location,
                message: "boolean circuits take \"table\" semantics, not \"matrix\"".into(),
            }),
            (true, Some(_), _) => errors.push(Diagnostic {
                location,
                message: "quantum circuits take \"matrix\" semantics, not \"table\"".into(),
            }),
            (false, None, None) => errors.push(Diagnostic {
                location,
                message: "boolean gate is missing its \"table\"".into(),
            }),
            (true, None, None) => errors.push(Diagnostic {
                location,
                message: "quantum gate is missing its \"matrix\"".into(),
            }),
        }
    }

    // wires
    let mut provider: BTreeMap<NodeRef, NodeRef> = BTreeMap::new();
    for (i, wire) in document.wires.iter().enumerate() {
        let location = format!("wires[{i}]");
        let consumer = match wire.consumer.parse::<NodeRef>() {
            Ok(node) => node,
            Err(e) => {
                errors.push(Diagnostic { location: location.clone(), message: e.to_string() });
                continue;
            }
        };
        let producer = match wire.producer.parse::<NodeRef>() {
            Ok(node) => node,
            Err(e) => {
                errors.push(Diagnostic { location: location.clone(), message: e.to_string() });
                continue;
            }
        };
        if !consumer.is_consumer() {
            errors.push(Diagnostic {
                location: location.clone(),
                message: format!("{consumer} cannot appear on the consumer side"),
            });
            continue;
        }
        if !producer.is_producer() {
            errors.push(Diagnostic {
                location: location.clone(),
                message: format!("{producer} cannot appear on the producer side"),
            });
            continue;
        }
        if provider.insert(consumer.clone(), producer).is_some() {
            errors.push(Diagnostic {
                location,
                message: format!("consumer {consumer} is wired twice"),
            });
        }
    }

    if !errors.is_empty() {
        return Err(DocumentError::Semantic(errors));
    }
    let (inputs, outputs) = (inputs.expect("no errors"), outputs.expect("no errors"));

    let circuit = if is_quantum {
        AnyCircuit::Quantum(Circuit::new(inputs, outputs, quantum_gates, provider))
    } else {
        AnyCircuit::Boolean(Circuit::new(inputs, outputs, bool_gates, provider))
    };
    let report = circuit.validate();
    if !report.is_valid() {
        return Err(DocumentError::Semantic(
            report
                .issues()
                .iter()
                .map(|issue| Diagnostic { location: String::new(), message: issue.to_string() })
                .collect(),
        ));
    }
    Ok(circuit)
}

fn node_label_set(
    field: &str,
    names: &[String],
    errors: &mut Vec<Diagnostic>,
) -> Option<LabelSet> {
    let mut set = LabelSet::new();
    let mut ok = true;
    for (i, name) in names.iter().enumerate() {
        match Label::new(name.clone()) {
            Ok(label) => {
                if !set.insert(label) {
                    errors.push(Diagnostic {
                        location: format!("{field}[{i}]"),
                        message: format!("duplicate node label {name:?}"),
                    });
                    ok = false;
                }
            }
            Err(e) => {
                errors.push(Diagnostic {
                    location: format!("{field}[{i}]"),
                    message: e.to_string(),
                });
                ok = false;
            }
        }
    }
    ok.then_some(set)
}

fn parse_gate_id(
    location: &str,
    name: &str,
    errors: &mut Vec<Diagnostic>,
) -> Option<GateId> {
    match GateId::new(name) {
        Ok(id) => Some(id),
        Err(e) => {
            errors.push(Diagnostic { location: location.to_owned(), message: e.to_string() });
            None
        }
    }
}

fn parse_order(
    location: &str,
    field: &str,
    names: &[String],
    errors: &mut Vec<Diagnostic>,
) -> Option<Vec<Label>> {
    let mut order = Vec::with_capacity(names.len());
    let mut seen = BTreeSet::new();
    for (i, name) in names.iter().enumerate() {
        match Label::new(name.clone()) {
            Ok(label) => {
                if !seen.insert(label.clone()) {
                    errors.push(Diagnostic {
                        location: format!("{location}.{field}[{i}]"),
                        message: format!("duplicate slot label {name:?}"),
                    });
                    return None;
                }
                order.push(label);
            }
            Err(e) => {
                errors.push(Diagnostic {
                    location: format!("{location}.{field}[{i}]"),
                    message: e.to_string(),
                });
                return None;
            }
        }
    }
    Some(order)
}

fn parse_table(
    location: &str,
    input_order: &[Label],
    output_order: &[Label],
    rows: &[[String; 2]],
    errors: &mut Vec<Diagnostic>,
) -> Option<BooleanGateType> {
    let mut table = BTreeMap::new();
    for (i, [input, output]) in rows.iter().enumerate() {
        let row_location = format!("{location}.table[{i}]");
        let key = match BitAssignment::parse_bit_string(input_order, input) {
            Ok(bits) => bits,
            Err(e) => {
                errors.push(Diagnostic { location: row_location, message: e.to_string() });
                return None;
            }
        };
        let value = match BitAssignment::parse_bit_string(output_order, output) {
            Ok(bits) => bits,
            Err(e) => {
                errors.push(Diagnostic { location: row_location, message: e.to_string() });
                return None;
            }
        };
        if table.insert(key, value).is_some() {
            errors.push(Diagnostic {
                location: row_location,
                message: format!("duplicate table row for input {input:?}"),
            });
            return None;
        }
    }
    match BooleanGateType::new(
        input_order.iter().cloned().collect(),
        output_order.iter().cloned().collect(),
        table,
    ) {
        Ok(gate) => Some(gate),
        Err(e) => {
            errors.push(Diagnostic { location: location.to_owned(), message: e.to_string() });
            None
        }
    }
}

fn parse_matrix(
    location: &str,
    input_order: &[Label],
    output_order: &[Label],
    rows: &[Vec<[f64; 2]>],
    errors: &mut Vec<Diagnostic>,
) -> Option<QuantumGateType> {
    let complex_rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| row.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        .collect();
    let matrix = match CMatrix::from_rows(complex_rows) {
        Ok(m) => m,
        Err(e) => {
            errors.push(Diagnostic {
                location: format!("{location}.matrix"),
                message: e.to_string(),
            });
            return None;
        }
    };
    match QuantumGateType::new(input_order.to_vec(), output_order.to_vec(), matrix) {
        Ok(gate) => Some(gate),
        Err(e) => {
            errors.push(Diagnostic { location: location.to_owned(), message: e.to_string() });
            None
        }
    }
}

/// Renders a circuit as a document, canonically ordered: node lists and
/// Boolean slot orders canonical, gates by name, wires by consumer, table
/// rows by input bits. Reparsing yields a structurally equal circuit.
pub fn serialize_circuit(circuit: &AnyCircuit) -> String {
    let document = match circuit {
        AnyCircuit::Boolean(c) => boolean_document(c),
        AnyCircuit::Quantum(c) => quantum_document(c),
    };
    let mut text = serde_json::to_string_pretty(&document).expect("documents serialize");
    text.push('\n');
    text
}

fn common_fields<G: GatePorts>(circuit: &Circuit<G>, kind: &str) -> Document {
    Document {
        kind: kind.to_owned(),
        inputs: circuit.inputs().iter().map(|l| l.as_str().to_owned()).collect(),
        outputs: circuit.outputs().iter().map(|l| l.as_str().to_owned()).collect(),
        gates: Vec::new(),
        wires: circuit
            .provider()
            .iter()
            .map(|(consumer, producer)| DocumentWire {
                consumer: consumer.to_string(),
                producer: producer.to_string(),
            })
            .collect(),
    }
}

fn boolean_document(circuit: &BooleanCircuit) -> Document {
    let mut document = common_fields(circuit, "boolean");
    for (id, gate) in circuit.gates() {
        let input_order = canonical_order(gate.input_labels());
        let output_order = canonical_order(gate.output_labels());
        let table = gate
            .table()
            .iter()
            .map(|(row, value)| {
                [
                    row.bit_string(&input_order).expect("row is total"),
                    value.bit_string(&output_order).expect("value is total"),
                ]
            })
            .collect();
        document.gates.push(DocumentGate {
            name: id.as_str().to_owned(),
            input_labels: input_order.iter().map(|l| l.as_str().to_owned()).collect(),
            output_labels: output_order.iter().map(|l| l.as_str().to_owned()).collect(),
            table: Some(table),
            matrix: None,
        });
    }
    document
}

fn quantum_document(circuit: &QuantumCircuit) -> Document {
    let mut document = common_fields(circuit, "quantum");
    for (id, gate) in circuit.gates() {
        let m = gate.matrix();
        let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| [m.get(r, c).re, m.get(r, c).im]).collect())
            .collect();
        document.gates.push(DocumentGate {
            name: id.as_str().to_owned(),
            input_labels: gate.input_order().iter().map(|l| l.as_str().to_owned()).collect(),
            output_labels: gate.output_order().iter().map(|l| l.as_str().to_owned()).collect(),
            table: None,
            matrix: Some(rows),
        });
    }
    document
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: &str = r#"{
        "kind": "boolean",
        "inputs": ["w"],
        "outputs": ["w"],
        "gates": [],
        "wires": [{"consumer": "out:w", "producer": "in:w"}]
    }"#;

    #[test]
    fn minimal_identity_document_parses() {
        let circuit = parse_document(IDENTITY).unwrap();
        assert_eq!(circuit.kind_name(), "boolean");
        assert_eq!(circuit.gate_count(), 0);
        assert!(circuit.validate().is_valid());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_document("{\n  \"kind\": \"boolean\",,\n}").unwrap_err();
        match err {
            DocumentError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn missing_wire_is_a_semantic_error() {
        let text = r#"{
            "kind": "boolean",
            "inputs": ["w"],
            "outputs": ["w"],
            "gates": [],
            "wires": []
        }"#;
        let err = parse_document(text).unwrap_err();
        match err {
            DocumentError::Semantic(diags) => {
                assert!(diags
                    .iter()
                    .any(|d| d.message.contains("consumer out:w has no provider")));
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_semantics_for_kind_is_rejected() {
        let text = r#"{
            "kind": "quantum",
            "inputs": ["q"],
            "outputs": ["q"],
            "gates": [{
                "name": "g",
                "input_labels": ["a"],
                "output_labels": ["b"],
                "table": [["0", "0"], ["1", "1"]]
            }],
            "wires": [
                {"consumer": "g.a:in", "producer": "in:q"},
                {"consumer": "out:q", "producer": "g.b:out"}
            ]
        }"#;
        let err = parse_document(text).unwrap_err();
        match err {
            DocumentError::Semantic(diags) => {
                assert!(diags.iter().any(|d| d.location == "gates[0]"
                    && d.message.contains("\"matrix\" semantics")));
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_wires_are_rejected() {
        let text = r#"{
            "kind": "boolean",
            "inputs": ["a", "b"],
            "outputs": ["w"],
            "gates": [],
            "wires": [
                {"consumer": "out:w", "producer": "in:a"},
                {"consumer": "out:w", "producer": "in:b"}
            ]
        }"#;
        let err = parse_document(text).unwrap_err();
        match err {
            DocumentError::Semantic(diags) => {
                assert!(diags.iter().any(|d| d.message.contains("wired twice")));
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_preserves_structure() {
        let bell_doc = r#"{
            "kind": "quantum",
            "inputs": ["c", "t"],
            "outputs": ["c", "t"],
            "gates": [
                {
                    "name": "h",
                    "input_labels": ["a"],
                    "output_labels": ["a"],
                    "matrix": [
                        [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
                        [[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]]
                    ]
                },
                {
                    "name": "cn",
                    "input_labels": ["c", "t"],
                    "output_labels": ["c", "t"],
                    "matrix": [
                        [[1,0],[0,0],[0,0],[0,0]],
                        [[0,0],[1,0],[0,0],[0,0]],
                        [[0,0],[0,0],[0,0],[1,0]],
                        [[0,0],[0,0],[1,0],[0,0]]
                    ]
                }
            ],
            "wires": [
                {"consumer": "h.a:in", "producer": "in:c"},
                {"consumer": "cn.c:in", "producer": "h.a:out"},
                {"consumer": "cn.t:in", "producer": "in:t"},
                {"consumer": "out:c", "producer": "cn.c:out"},
                {"consumer": "out:t", "producer": "cn.t:out"}
            ]
        }"#;
        let circuit = parse_document(bell_doc).unwrap();
        assert_eq!(circuit.kind_name(), "quantum");
        assert_eq!(circuit.gate_count(), 2);
        let rendered = serialize_circuit(&circuit);
        let reparsed = parse_document(&rendered).unwrap();
        assert_eq!(reparsed, circuit);
    }

    #[test]
    fn boolean_round_trip_reorders_canonically() {
        // declared slot order differs from canonical; structure survives
        let text = r#"{
            "kind": "boolean",
            "inputs": ["x"],
            "outputs": ["y"],
            "gates": [{
                "name": "g",
                "input_labels": ["b", "a"],
                "output_labels": ["o"],
                "table": [["00", "0"], ["01", "1"], ["10", "1"], ["11", "0"]]
            }],
            "wires": [
                {"consumer": "g.a:in", "producer": "in:x"},
                {"consumer": "g.b:in", "producer": "in:x"},
                {"consumer": "out:y", "producer": "g.o:out"}
            ]
        }"#;
        let circuit = parse_document(text).unwrap();
        let rendered = serialize_circuit(&circuit);
        let reparsed = parse_document(&rendered).unwrap();
        assert_eq!(reparsed, circuit);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "kind": "boolean",
            "inputs": ["w"],
            "outputs": ["w"],
            "wirse": []
        }"#;
        assert!(matches!(parse_document(text), Err(DocumentError::Syntax { .. })));
    }

    #[test]
    fn unknown_kind_is_reported() {
        let err = parse_document(r#"{"kind": "analog", "inputs": [], "outputs": []}"#)
            .unwrap_err();
        match err {
            DocumentError::Semantic(diags) => {
                assert_eq!(diags[0].location, "kind");
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }
}
