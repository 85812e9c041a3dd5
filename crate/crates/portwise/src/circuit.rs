//! The circuit data model and its validators.
//!
//! A circuit is a finite set of input nodes, a finite set of output nodes, a
//! family of typed gates, and a provider function `π` mapping every consumer
//! to the producer expected to supply its value. Well-formedness asks that
//! `π` be total on consumers, land in producers, and induce an acyclic
//! direct-prerequisite relation between gates.
//!
//! The same structure carries Boolean or quantum gate types; the checks that
//! differ between the two worlds (`check_balanced`, `check_quantum`) are
//! defined on the respective aliases.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::gate::{BooleanGateType, GatePorts, QuantumGateType};
use crate::label::{Label, LabelSet};
use crate::node::{GateId, NodeRef};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("unknown gate {0}")]
    UnknownGate(GateId),
    #[error("provider function is not injective: {producer} feeds more than one consumer")]
    NotInjective { producer: NodeRef },
    #[error("gate {0} has a non-bijective table")]
    NotBalanced(GateId),
}

/// One structural violation found by [`Circuit::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    /// A consumer the provider function never mentions.
    MissingProvider { consumer: NodeRef },
    /// A provider-function key that is not a consumer of this circuit
    /// (wrong shape, unknown gate, or unknown port label).
    NotAConsumer { node: NodeRef },
    /// A provider-function value that is not a producer of this circuit.
    NotAProducer { consumer: NodeRef, provider: NodeRef },
    /// Gates forming a cycle in the direct-prerequisite relation.
    Cycle { gates: Vec<GateId> },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::MissingProvider { consumer } => {
                write!(f, "consumer {consumer} has no provider")
            }
            ValidationIssue::NotAConsumer { node } => {
                write!(f, "{node} is not a consumer of this circuit")
            }
            ValidationIssue::NotAProducer { consumer, provider } => {
                write!(f, "consumer {consumer} is wired to {provider}, which is not a producer of this circuit")
            }
            ValidationIssue::Cycle { gates } => {
                write!(f, "prerequisite cycle: ")?;
                for (i, g) in gates.iter().enumerate() {
                    if i > 0 {
                        write!(f, " -> ")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn issues(&self) -> &[ValidationIssue] {
        &self.issues
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            writeln!(f, "circuit is well-formed")
        } else {
            for issue in &self.issues {
                writeln!(f, "{issue}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BalanceIssue {
    /// A gate whose table is not a bijection.
    NotBijective { gate: GateId },
    /// A producer no consumer uses (the provider function is not onto).
    UnusedProducer { producer: NodeRef },
    /// A producer used by more than one consumer (fan-out).
    SharedProducer { producer: NodeRef, consumers: Vec<NodeRef> },
}

impl fmt::Display for BalanceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BalanceIssue::NotBijective { gate } => write!(f, "gate {gate} is not bijective"),
            BalanceIssue::UnusedProducer { producer } => {
                write!(f, "producer {producer} is never consumed")
            }
            BalanceIssue::SharedProducer { producer, consumers } => {
                write!(f, "producer {producer} feeds {} consumers:", consumers.len())?;
                for c in consumers {
                    write!(f, " {c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Result of [`Circuit::check_balanced`]. On success the per-gate arities and
/// the node counts it records are forced to match pairwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedReport {
    issues: Vec<BalanceIssue>,
    gate_arities: BTreeMap<GateId, (usize, usize)>,
    input_count: usize,
    output_count: usize,
}

impl BalancedReport {
    pub fn is_balanced(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn issues(&self) -> &[BalanceIssue] {
        &self.issues
    }

    /// `(input slots, output slots)` per gate.
    pub fn gate_arities(&self) -> &BTreeMap<GateId, (usize, usize)> {
        &self.gate_arities
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn output_count(&self) -> usize {
        self.output_count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumIssue {
    /// A producer wired to two or more consumers; duplication of a value.
    FanOut { producer: NodeRef, consumers: Vec<NodeRef> },
    /// A producer never consumed.
    DanglingProducer { producer: NodeRef },
    /// A gate whose matrix is not unitary within tolerance.
    NotUnitary { gate: GateId, deviation: f64 },
}

impl fmt::Display for QuantumIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantumIssue::FanOut { producer, consumers } => {
                write!(f, "fan-out: producer {producer} feeds {} consumers:", consumers.len())?;
                for c in consumers {
                    write!(f, " {c}")?;
                }
                Ok(())
            }
            QuantumIssue::DanglingProducer { producer } => {
                write!(f, "dangling producer {producer} is never consumed")
            }
            QuantumIssue::NotUnitary { gate, deviation } => {
                write!(f, "gate {gate} is not unitary: deviation {deviation:.3e}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantumReport {
    issues: Vec<QuantumIssue>,
}

impl QuantumReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn issues(&self) -> &[QuantumIssue] {
        &self.issues
    }
}

impl fmt::Display for QuantumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            writeln!(f, "circuit is a well-formed quantum circuit")
        } else {
            for issue in &self.issues {
                writeln!(f, "{issue}")?;
            }
            Ok(())
        }
    }
}

/// A circuit over gate type `G`.
///
/// Immutable after construction. Construction itself performs no validation;
/// call [`Circuit::validate`] (the document parser does this for you).
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<G> {
    inputs: LabelSet,
    outputs: LabelSet,
    gates: BTreeMap<GateId, G>,
    provider: BTreeMap<NodeRef, NodeRef>,
    fingerprint: u64,
}

pub type BooleanCircuit = Circuit<BooleanGateType>;
pub type QuantumCircuit = Circuit<QuantumGateType>;

impl<G: GatePorts> Circuit<G> {
    pub fn new(
        inputs: LabelSet,
        outputs: LabelSet,
        gates: BTreeMap<GateId, G>,
        provider: BTreeMap<NodeRef, NodeRef>,
    ) -> Self {
        let mut h = DefaultHasher::new();
        for l in inputs.iter() {
            l.as_str().hash(&mut h);
        }
        0xfeedu16.hash(&mut h);
        for l in outputs.iter() {
            l.as_str().hash(&mut h);
        }
        for (id, gate) in &gates {
            id.as_str().hash(&mut h);
            gate.fingerprint().hash(&mut h);
        }
        for (consumer, producer) in &provider {
            consumer.to_string().hash(&mut h);
            producer.to_string().hash(&mut h);
        }
        let fingerprint = h.finish();
        Circuit { inputs, outputs, gates, provider, fingerprint }
    }

    pub fn builder() -> CircuitBuilder<G> {
        CircuitBuilder::new()
    }

    pub fn inputs(&self) -> &LabelSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &LabelSet {
        &self.outputs
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn gate_ids(&self) -> impl Iterator<Item = &GateId> {
        self.gates.keys()
    }

    pub fn gates(&self) -> impl Iterator<Item = (&GateId, &G)> {
        self.gates.iter()
    }

    pub fn gate(&self, id: &GateId) -> Option<&G> {
        self.gates.get(id)
    }

    pub fn provider(&self) -> &BTreeMap<NodeRef, NodeRef> {
        &self.provider
    }

    pub fn provider_of(&self, consumer: &NodeRef) -> Option<&NodeRef> {
        self.provider.get(consumer)
    }

    /// Structural identity, used to tie stages to the circuit they were made
    /// from. Structurally equal circuits share a fingerprint.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Every consumer position: output nodes and gate input ports.
    pub fn consumers(&self) -> BTreeSet<NodeRef> {
        let mut set: BTreeSet<NodeRef> = self
            .outputs
            .iter()
            .map(|w| NodeRef::OutputNode(w.clone()))
            .collect();
        for (id, gate) in &self.gates {
            for l in gate.input_labels().iter() {
                set.insert(NodeRef::InputPort(id.clone(), l.clone()));
            }
        }
        set
    }

    /// Every producer position: input nodes and gate output ports.
    pub fn producers(&self) -> BTreeSet<NodeRef> {
        let mut set: BTreeSet<NodeRef> = self
            .inputs
            .iter()
            .map(|w| NodeRef::InputNode(w.clone()))
            .collect();
        for (id, gate) in &self.gates {
            for l in gate.output_labels().iter() {
                set.insert(NodeRef::OutputPort(id.clone(), l.clone()));
            }
        }
        set
    }

    /// Checks the defining requirements: the provider function is total on
    /// consumers, maps into producers, and the direct-prerequisite relation
    /// is acyclic. Reports every violation; never panics on malformed input.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let consumers = self.consumers();
        let producers = self.producers();

        for consumer in &consumers {
            if !self.provider.contains_key(consumer) {
                issues.push(ValidationIssue::MissingProvider { consumer: consumer.clone() });
            }
        }
        for (consumer, provider) in &self.provider {
            if !consumers.contains(consumer) {
                issues.push(ValidationIssue::NotAConsumer { node: consumer.clone() });
                continue;
            }
            if !producers.contains(provider) {
                issues.push(ValidationIssue::NotAProducer {
                    consumer: consumer.clone(),
                    provider: provider.clone(),
                });
            }
        }

        for cycle in self.find_cycles() {
            issues.push(ValidationIssue::Cycle { gates: cycle });
        }

        ValidationReport { issues }
    }

    /// Gates `g` with `g ≺ h`: providers of `h`'s input ports that are
    /// output ports of `g`.
    pub fn direct_prerequisites(&self, h: &GateId) -> Result<BTreeSet<GateId>, CircuitError> {
        let gate = self.gates.get(h).ok_or_else(|| CircuitError::UnknownGate(h.clone()))?;
        let mut set = BTreeSet::new();
        for l in gate.input_labels().iter() {
            let port = NodeRef::InputPort(h.clone(), l.clone());
            if let Some(NodeRef::OutputPort(g, _)) = self.provider.get(&port) {
                set.insert(g.clone());
            }
        }
        Ok(set)
    }

    /// The set of providers of `g`'s input ports. Smaller than the port
    /// count when the provider function repeats itself (fan-out).
    pub fn providers_of_gate(&self, g: &GateId) -> Result<BTreeSet<NodeRef>, CircuitError> {
        let gate = self.gates.get(g).ok_or_else(|| CircuitError::UnknownGate(g.clone()))?;
        let mut set = BTreeSet::new();
        for l in gate.input_labels().iter() {
            let port = NodeRef::InputPort(g.clone(), l.clone());
            if let Some(p) = self.provider.get(&port) {
                set.insert(p.clone());
            }
        }
        Ok(set)
    }

    /// Adds a fresh output node for every producer the provider function
    /// misses, extending it to a bijection. Idempotent; circuits whose
    /// provider function is already onto are returned unchanged.
    pub fn complete_outputs(&self) -> Result<Circuit<G>, CircuitError>
    where
        G: Clone,
    {
        let mut used: BTreeMap<&NodeRef, usize> = BTreeMap::new();
        for provider in self.provider.values() {
            *used.entry(provider).or_default() += 1;
        }
        if let Some((producer, _)) = used.iter().find(|(_, &count)| count > 1) {
            return Err(CircuitError::NotInjective { producer: (*producer).clone() });
        }

        let missing: Vec<NodeRef> = self
            .producers()
            .into_iter()
            .filter(|p| !used.contains_key(p))
            .collect();
        if missing.is_empty() {
            return Ok(self.clone());
        }

        let mut outputs = self.outputs.clone();
        let mut provider = self.provider.clone();
        let mut counter = 0usize;
        for producer in missing {
            let fresh = loop {
                let candidate = Label::new(format!("_drop{counter}")).expect("nonempty");
                counter += 1;
                if !outputs.contains(&candidate) {
                    break candidate;
                }
            };
            outputs.insert(fresh.clone());
            provider.insert(NodeRef::OutputNode(fresh), producer);
        }
        Ok(Circuit::new(self.inputs.clone(), outputs, self.gates.clone(), provider))
    }

    /// Cycles in the direct-prerequisite relation, one per back edge found.
    fn find_cycles(&self) -> Vec<Vec<GateId>> {
        // edges: gate -> gates it directly requires
        let mut edges: BTreeMap<&GateId, BTreeSet<GateId>> = BTreeMap::new();
        for (id, gate) in &self.gates {
            let mut deps = BTreeSet::new();
            for l in gate.input_labels().iter() {
                let port = NodeRef::InputPort(id.clone(), l.clone());
                if let Some(NodeRef::OutputPort(g, _)) = self.provider.get(&port) {
                    if self.gates.contains_key(g) {
                        deps.insert(g.clone());
                    }
                }
            }
            edges.insert(id, deps);
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut marks: BTreeMap<&GateId, Mark> = self.gates.keys().map(|g| (g, Mark::New)).collect();
        let mut cycles = Vec::new();

        for start in self.gates.keys() {
            if marks[start] != Mark::New {
                continue;
            }
            // iterative DFS; the path stack holds the active chain
            let mut stack: Vec<(&GateId, Vec<GateId>)> =
                vec![(start, edges[start].iter().cloned().collect())];
            marks.insert(start, Mark::Active);
            let mut path = vec![start.clone()];
            loop {
                let next = match stack.last_mut() {
                    Some((_, pending)) => pending.pop(),
                    None => break,
                };
                match next {
                    Some(next) => {
                        let Some((next_ref, _)) = self.gates.get_key_value(&next) else {
                            continue;
                        };
                        match marks[next_ref] {
                            Mark::New => {
                                marks.insert(next_ref, Mark::Active);
                                path.push(next_ref.clone());
                                stack.push((next_ref, edges[next_ref].iter().cloned().collect()));
                            }
                            Mark::Active => {
                                // back edge: the cycle is the path tail from `next`
                                let from = path.iter().position(|g| *g == next).unwrap_or(0);
                                cycles.push(path[from..].to_vec());
                            }
                            Mark::Done => {}
                        }
                    }
                    None => {
                        let (node, _) = stack.pop().expect("frame present");
                        marks.insert(node, Mark::Done);
                        path.pop();
                    }
                }
            }
        }
        cycles
    }

    /// How many consumers each producer feeds; shared by the balance and
    /// quantum checks.
    fn consumer_count_per_producer(&self) -> BTreeMap<NodeRef, Vec<NodeRef>> {
        let mut map: BTreeMap<NodeRef, Vec<NodeRef>> = BTreeMap::new();
        for (consumer, producer) in &self.provider {
            map.entry(producer.clone()).or_default().push(consumer.clone());
        }
        map
    }
}

impl BooleanCircuit {
    /// A circuit is balanced when every gate table and the provider function
    /// are bijective. On success the recorded gate arities and node counts
    /// match pairwise — a consequence, not an extra condition.
    pub fn check_balanced(&self) -> BalancedReport {
        let mut issues = Vec::new();
        let mut gate_arities = BTreeMap::new();
        for (id, gate) in &self.gates {
            gate_arities
                .insert(id.clone(), (gate.input_labels().len(), gate.output_labels().len()));
            if !gate.is_bijective() {
                issues.push(BalanceIssue::NotBijective { gate: id.clone() });
            }
        }

        let uses = self.consumer_count_per_producer();
        for (producer, consumers) in &uses {
            if consumers.len() > 1 {
                issues.push(BalanceIssue::SharedProducer {
                    producer: producer.clone(),
                    consumers: consumers.clone(),
                });
            }
        }
        for producer in self.producers() {
            if !uses.contains_key(&producer) {
                issues.push(BalanceIssue::UnusedProducer { producer });
            }
        }

        let report = BalancedReport {
            issues,
            gate_arities,
            input_count: self.inputs.len(),
            output_count: self.outputs.len(),
        };
        if report.is_balanced() {
            debug_assert!(report.gate_arities.values().all(|(i, o)| i == o));
            debug_assert_eq!(report.input_count, report.output_count);
        }
        report
    }
}

impl QuantumCircuit {
    /// Quantum well-formedness: the provider function is a bijection (no
    /// fan-out, nothing dangling) and every gate matrix is unitary within
    /// [`crate::gate::UNITARITY_TOLERANCE`].
    pub fn check_quantum(&self) -> QuantumReport {
        let mut issues = Vec::new();

        let uses = self.consumer_count_per_producer();
        for (producer, consumers) in &uses {
            if consumers.len() > 1 {
                issues.push(QuantumIssue::FanOut {
                    producer: producer.clone(),
                    consumers: consumers.clone(),
                });
            }
        }
        for producer in self.producers() {
            if !uses.contains_key(&producer) {
                issues.push(QuantumIssue::DanglingProducer { producer });
            }
        }

        for (id, gate) in &self.gates {
            let deviation = gate.unitarity_deviation();
            if deviation > crate::gate::UNITARITY_TOLERANCE {
                issues.push(QuantumIssue::NotUnitary { gate: id.clone(), deviation });
            }
        }

        QuantumReport { issues }
    }
}

/// Re-types a balanced Boolean circuit as the quantum circuit whose gates are
/// the permutation matrices of the Boolean tables. Wiring and node sets are
/// unchanged.
pub fn lift_balanced(circuit: &BooleanCircuit) -> Result<QuantumCircuit, CircuitError> {
    let mut gates = BTreeMap::new();
    for (id, gate) in circuit.gates() {
        let lifted = QuantumGateType::from_boolean(gate)
            .map_err(|_| CircuitError::NotBalanced(id.clone()))?;
        gates.insert(id.clone(), lifted);
    }
    Ok(Circuit::new(
        circuit.inputs().clone(),
        circuit.outputs().clone(),
        gates,
        circuit.provider().clone(),
    ))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("malformed circuit description:\n{}", messages.join("\n"))]
    Malformed { messages: Vec<String> },
    #[error("circuit failed validation:\n{report}")]
    Invalid { report: ValidationReport },
}

/// Incremental construction with wire references in the document grammar.
///
/// ```
/// use portwise::{circuit::Circuit, gates};
///
/// let bell = Circuit::builder()
///     .input("c")
///     .input("t")
///     .output("c")
///     .output("t")
///     .gate("h", gates::hadamard("a", "a"))
///     .gate("cn", gates::cnot(["c", "t"], ["c", "t"]))
///     .wire("h.a:in", "in:c")
///     .wire("cn.c:in", "h.a:out")
///     .wire("cn.t:in", "in:t")
///     .wire("out:c", "cn.c:out")
///     .wire("out:t", "cn.t:out")
///     .build()
///     .unwrap();
/// assert_eq!(bell.gate_count(), 2);
/// ```
pub struct CircuitBuilder<G> {
    inputs: LabelSet,
    outputs: LabelSet,
    gates: BTreeMap<GateId, G>,
    provider: BTreeMap<NodeRef, NodeRef>,
    errors: Vec<String>,
}

impl<G: GatePorts> CircuitBuilder<G> {
    pub fn new() -> Self {
        CircuitBuilder {
            inputs: LabelSet::new(),
            outputs: LabelSet::new(),
            gates: BTreeMap::new(),
            provider: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    pub fn input(mut self, label: &str) -> Self {
        match Label::new(label) {
            Ok(l) => {
                if !self.inputs.insert(l) {
                    self.errors.push(format!("duplicate input node {label:?}"));
                }
            }
            Err(e) => self.errors.push(format!("input node {label:?}: {e}")),
        }
        self
    }

    pub fn output(mut self, label: &str) -> Self {
        match Label::new(label) {
            Ok(l) => {
                if !self.outputs.insert(l) {
                    self.errors.push(format!("duplicate output node {label:?}"));
                }
            }
            Err(e) => self.errors.push(format!("output node {label:?}: {e}")),
        }
        self
    }

    pub fn gate(mut self, name: &str, gate: G) -> Self {
        match GateId::new(name) {
            Ok(id) => {
                if self.gates.insert(id, gate).is_some() {
                    self.errors.push(format!("duplicate gate {name:?}"));
                }
            }
            Err(e) => self.errors.push(format!("gate {name:?}: {e}")),
        }
        self
    }

    /// Wires `consumer` to read from `producer`; both in the wire-reference
    /// grammar (`in:w`, `out:w`, `gate.label:in`, `gate.label:out`).
    pub fn wire(mut self, consumer: &str, producer: &str) -> Self {
        let c = match consumer.parse::<NodeRef>() {
            Ok(node) => node,
            Err(e) => {
                self.errors.push(e.to_string());
                return self;
            }
        };
        let p = match producer.parse::<NodeRef>() {
            Ok(node) => node,
            Err(e) => {
                self.errors.push(e.to_string());
                return self;
            }
        };
        if self.provider.insert(c.clone(), p).is_some() {
            self.errors.push(format!("consumer {c} is wired twice"));
        }
        self
    }

    /// Assembles and validates the circuit.
    pub fn build(self) -> Result<Circuit<G>, BuildError> {
        if !self.errors.is_empty() {
            return Err(BuildError::Malformed { messages: self.errors });
        }
        let circuit = Circuit::new(self.inputs, self.outputs, self.gates, self.provider);
        let report = circuit.validate();
        if !report.is_valid() {
            return Err(BuildError::Invalid { report });
        }
        Ok(circuit)
    }
}

impl<G: GatePorts> Default for CircuitBuilder<G> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn lbl(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn gid(s: &str) -> GateId {
        GateId::new(s).unwrap()
    }

    pub(crate) fn bell() -> QuantumCircuit {
        Circuit::builder()
            .input("c")
            .input("t")
            .output("c")
            .output("t")
            .gate("h", gates::hadamard("a", "a"))
            .gate("cn", gates::cnot(["c", "t"], ["c", "t"]))
            .wire("h.a:in", "in:c")
            .wire("cn.c:in", "h.a:out")
            .wire("cn.t:in", "in:t")
            .wire("out:c", "cn.c:out")
            .wire("out:t", "cn.t:out")
            .build()
            .unwrap()
    }

    #[test]
    fn identity_circuit_is_valid() {
        let c: BooleanCircuit = Circuit::builder()
            .input("w")
            .output("w")
            .wire("out:w", "in:w")
            .build()
            .unwrap();
        assert!(c.validate().is_valid());
        assert_eq!(c.gate_count(), 0);
    }

    #[test]
    fn self_loop_is_reported_as_a_one_cycle() {
        let c: BooleanCircuit = Circuit::new(
            LabelSet::new(),
            LabelSet::new(),
            [(gid("g"), gates::not("x", "y"))].into_iter().collect(),
            [(
                NodeRef::InputPort(gid("g"), lbl("x")),
                NodeRef::OutputPort(gid("g"), lbl("y")),
            )]
            .into_iter()
            .collect(),
        );
        let report = c.validate();
        assert!(!report.is_valid());
        assert!(report
            .issues()
            .iter()
            .any(|i| matches!(i, ValidationIssue::Cycle { gates } if gates == &vec![gid("g")])));
    }

    #[test]
    fn mutual_recursion_is_reported_as_a_two_cycle() {
        let c: BooleanCircuit = Circuit::new(
            LabelSet::new(),
            LabelSet::new(),
            [(gid("g"), gates::not("x", "y")), (gid("h"), gates::not("x", "y"))]
                .into_iter()
                .collect(),
            [
                (
                    NodeRef::InputPort(gid("g"), lbl("x")),
                    NodeRef::OutputPort(gid("h"), lbl("y")),
                ),
                (
                    NodeRef::InputPort(gid("h"), lbl("x")),
                    NodeRef::OutputPort(gid("g"), lbl("y")),
                ),
            ]
            .into_iter()
            .collect(),
        );
        let report = c.validate();
        let cycle = report
            .issues()
            .iter()
            .find_map(|i| match i {
                ValidationIssue::Cycle { gates } => Some(gates.clone()),
                _ => None,
            })
            .expect("cycle reported");
        let mut sorted = cycle.clone();
        sorted.sort();
        assert_eq!(sorted, vec![gid("g"), gid("h")]);
    }

    #[test]
    fn missing_and_retargeted_wires_are_reported() {
        let c: BooleanCircuit = Circuit::new(
            [lbl("w")].into_iter().collect(),
            [lbl("w")].into_iter().collect(),
            BTreeMap::new(),
            // wired to another consumer instead of a producer
            [(NodeRef::OutputNode(lbl("w")), NodeRef::OutputNode(lbl("w")))]
                .into_iter()
                .collect(),
        );
        let report = c.validate();
        assert!(report
            .issues()
            .iter()
            .any(|i| matches!(i, ValidationIssue::NotAProducer { .. })));

        let missing: BooleanCircuit = Circuit::new(
            [lbl("w")].into_iter().collect(),
            [lbl("w")].into_iter().collect(),
            BTreeMap::new(),
            BTreeMap::new(),
        );
        assert!(missing
            .validate()
            .issues()
            .iter()
            .any(|i| matches!(i, ValidationIssue::MissingProvider { .. })));
    }

    #[test]
    fn direct_prerequisites_in_the_two_gate_circuit() {
        let bell = bell();
        assert_eq!(
            bell.direct_prerequisites(&gid("cn")).unwrap(),
            [gid("h")].into_iter().collect()
        );
        assert_eq!(bell.direct_prerequisites(&gid("h")).unwrap(), BTreeSet::new());
        assert!(matches!(
            bell.direct_prerequisites(&gid("nope")),
            Err(CircuitError::UnknownGate(_))
        ));
    }

    #[test]
    fn providers_of_gate_collapses_fanout() {
        let bell = bell();
        let providers = bell.providers_of_gate(&gid("cn")).unwrap();
        assert_eq!(providers.len(), 2);
        assert!(providers.contains(&NodeRef::OutputPort(gid("h"), lbl("a"))));
        assert!(providers.contains(&NodeRef::InputNode(lbl("t"))));

        // two ports of one gate reading the same producer collapse to one
        let fanout: BooleanCircuit = Circuit::builder()
            .input("x")
            .output("s")
            .gate("x2", gates::xor("a", "b", "s"))
            .wire("x2.a:in", "in:x")
            .wire("x2.b:in", "in:x")
            .wire("out:s", "x2.s:out")
            .build()
            .unwrap();
        assert_eq!(fanout.providers_of_gate(&gid("x2")).unwrap().len(), 1);
    }

    #[test]
    fn balanced_check_accepts_reversible_wiring() {
        let c: BooleanCircuit = Circuit::builder()
            .input("a")
            .input("b")
            .input("c")
            .output("x")
            .output("y")
            .output("z")
            .gate("t", gates::toffoli(["p", "q", "r"], ["p", "q", "r"]))
            .wire("t.p:in", "in:a")
            .wire("t.q:in", "in:b")
            .wire("t.r:in", "in:c")
            .wire("out:x", "t.p:out")
            .wire("out:y", "t.q:out")
            .wire("out:z", "t.r:out")
            .build()
            .unwrap();
        let report = c.check_balanced();
        assert!(report.is_balanced());
        assert_eq!(report.gate_arities()[&gid("t")], (3, 3));
        assert_eq!((report.input_count(), report.output_count()), (3, 3));
    }

    #[test]
    fn and_gate_breaks_balance() {
        let c: BooleanCircuit = Circuit::builder()
            .input("a")
            .input("b")
            .output("c")
            .gate("g", gates::and("a", "b", "c"))
            .wire("g.a:in", "in:a")
            .wire("g.b:in", "in:b")
            .wire("out:c", "g.c:out")
            .build()
            .unwrap();
        let report = c.check_balanced();
        assert!(!report.is_balanced());
        assert!(report
            .issues()
            .iter()
            .any(|i| matches!(i, BalanceIssue::NotBijective { gate } if gate == &gid("g"))));
    }

    #[test]
    fn quantum_check_flags_fanout_by_producer() {
        let c: QuantumCircuit = Circuit::builder()
            .input("q")
            .output("a")
            .output("b")
            .wire("out:a", "in:q")
            .wire("out:b", "in:q")
            .build()
            .unwrap();
        let report = c.check_quantum();
        let fanout = report
            .issues()
            .iter()
            .find_map(|i| match i {
                QuantumIssue::FanOut { producer, consumers } => Some((producer, consumers.len())),
                _ => None,
            })
            .expect("fan-out reported");
        assert_eq!(fanout, (&NodeRef::InputNode(lbl("q")), 2));
    }

    #[test]
    fn quantum_check_flags_nonunitary_gates() {
        let mut damped = crate::matrix::CMatrix::identity(2);
        damped.set(1, 1, num_complex::Complex64::new(0.999, 0.0));
        let gate = QuantumGateType::new(vec![lbl("a")], vec![lbl("b")], damped).unwrap();
        let c: QuantumCircuit = Circuit::builder()
            .input("q")
            .output("q")
            .gate("g", gate)
            .wire("g.a:in", "in:q")
            .wire("out:q", "g.b:out")
            .build()
            .unwrap();
        let report = c.check_quantum();
        assert!(report
            .issues()
            .iter()
            .any(|i| matches!(i, QuantumIssue::NotUnitary { deviation, .. } if *deviation > 1e-9)));
    }

    #[test]
    fn complete_outputs_adds_fresh_nodes_for_dangling_producers() {
        // h's output is never consumed and input r is never consumed
        let c: QuantumCircuit = Circuit::builder()
            .input("q")
            .input("r")
            .gate("h", gates::hadamard("a", "a"))
            .wire("h.a:in", "in:q")
            .build()
            .unwrap();
        assert!(!c.check_quantum().is_valid());
        let completed = c.complete_outputs().unwrap();
        assert_eq!(completed.outputs().len(), 2);
        assert!(completed.outputs().contains(&lbl("_drop0")));
        assert!(completed.check_quantum().is_valid());
        // idempotent
        let again = completed.complete_outputs().unwrap();
        assert_eq!(again, completed);
    }

    #[test]
    fn complete_outputs_rejects_fanout() {
        let c: BooleanCircuit = Circuit::builder()
            .input("x")
            .output("a")
            .output("b")
            .wire("out:a", "in:x")
            .wire("out:b", "in:x")
            .build()
            .unwrap();
        assert!(matches!(
            c.complete_outputs(),
            Err(CircuitError::NotInjective { .. })
        ));
    }

    #[test]
    fn lifted_balanced_circuit_passes_quantum_checks() {
        let c: BooleanCircuit = Circuit::builder()
            .input("a")
            .input("b")
            .output("a")
            .output("b")
            .gate("cx", gates::cnot_table(["p", "q"], ["p", "q"]))
            .wire("cx.p:in", "in:a")
            .wire("cx.q:in", "in:b")
            .wire("out:a", "cx.p:out")
            .wire("out:b", "cx.q:out")
            .build()
            .unwrap();
        let lifted = lift_balanced(&c).unwrap();
        assert!(lifted.validate().is_valid());
        assert!(lifted.check_quantum().is_valid());
    }
}
