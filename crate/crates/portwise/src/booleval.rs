//! Boolean evaluation.
//!
//! Given an input assignment, every node of a valid Boolean circuit carries a
//! unique bit: inputs carry their given bits, consumers retrieve (copy) the
//! bit of their provider, and a gate's output ports carry its table applied
//! to its input ports. [`eval_nodes`] computes that valuation; it exists and
//! is unique because the prerequisite relation is well-founded.
//!
//! [`eval_stage`] evaluates the same circuit stage by stage instead: firing
//! the gates of a stage in any coherent order and reading off the bits at the
//! stage's exits. The two views agree — `eval_stage` equals the restriction
//! of the node valuation to the exits — which the tests check bit-exactly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::BooleanCircuit;
use crate::gate::GatePorts;
use crate::label::{all_assignments, BitAssignment, Label};
use crate::node::{GateId, NodeRef};
use crate::stage::{Stage, StageError};

/// Enumerating the computed function touches `2^|inputs|` assignments.
pub const MAX_TABLE_INPUTS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("input assignment is not total on the circuit's input nodes")]
    InputMismatch,
    #[error("circuit has {count} inputs; enumeration supports at most {max}")]
    TooManyInputs { count: usize, max: usize },
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error("circuit is malformed: {0}")]
    InvalidCircuit(String),
}

/// A total assignment of bits to every node of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeValuation {
    values: BTreeMap<NodeRef, bool>,
}

impl NodeValuation {
    pub fn get(&self, node: &NodeRef) -> Option<bool> {
        self.values.get(node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeRef, bool)> {
        self.values.iter().map(|(n, b)| (n, *b))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The bits at the circuit's output nodes, keyed by output label.
    pub fn output_assignment(&self, circuit: &BooleanCircuit) -> BitAssignment {
        circuit
            .outputs()
            .iter()
            .map(|w| {
                let bit = self
                    .get(&NodeRef::OutputNode(w.clone()))
                    .expect("valuation is total");
                (w.clone(), bit)
            })
            .collect()
    }
}

/// Evaluates every gate of `within` (all gates when `None`), memoized,
/// demand-driven with an explicit expand/compute stack.
fn eval_gates(
    circuit: &BooleanCircuit,
    input: &BitAssignment,
    within: Option<&std::collections::BTreeSet<GateId>>,
) -> Result<BTreeMap<GateId, BitAssignment>, EvalError> {
    let mut memo: BTreeMap<GateId, BitAssignment> = BTreeMap::new();
    let in_scope = |g: &GateId| within.map_or(true, |set| set.contains(g));
    let roots: Vec<GateId> = circuit.gate_ids().filter(|g| in_scope(g)).cloned().collect();

    // gates expanded but not yet computed; revisiting one means a cycle
    let mut gray: std::collections::BTreeSet<GateId> = std::collections::BTreeSet::new();
    for root in roots {
        if memo.contains_key(&root) {
            continue;
        }
        let mut stack: Vec<(GateId, bool)> = vec![(root, false)];
        while let Some((g, deps_done)) = stack.pop() {
            if memo.contains_key(&g) {
                continue;
            }
            if deps_done {
                gray.remove(&g);
                let gate = circuit.gate(&g).expect("gate exists");
                let mut bits = BitAssignment::new();
                for l in gate.input_labels().iter() {
                    let port = NodeRef::InputPort(g.clone(), l.clone());
                    let provider = circuit.provider_of(&port).ok_or_else(|| {
                        EvalError::InvalidCircuit(format!("consumer {port} has no provider"))
                    })?;
                    bits.set(l.clone(), producer_bit(input, &memo, provider)?);
                }
                let out = gate.apply(&bits).ok_or_else(|| {
                    EvalError::InvalidCircuit(format!("gate {g} has an incomplete table"))
                })?;
                memo.insert(g, out.clone());
            } else {
                if !gray.insert(g.clone()) {
                    return Err(EvalError::InvalidCircuit(format!(
                        "prerequisite cycle through gate {g}"
                    )));
                }
                let deps = circuit
                    .direct_prerequisites(&g)
                    .map_err(|e| EvalError::InvalidCircuit(e.to_string()))?;
                stack.push((g, true));
                for d in deps {
                    if memo.contains_key(&d) {
                        continue;
                    }
                    if gray.contains(&d) {
                        return Err(EvalError::InvalidCircuit(format!(
                            "prerequisite cycle through gate {d}"
                        )));
                    }
                    stack.push((d, false));
                }
            }
        }
    }
    Ok(memo)
}

fn producer_bit(
    input: &BitAssignment,
    memo: &BTreeMap<GateId, BitAssignment>,
    producer: &NodeRef,
) -> Result<bool, EvalError> {
    match producer {
        NodeRef::InputNode(w) => input
            .get(w)
            .ok_or_else(|| EvalError::InvalidCircuit(format!("no input bit for {w}"))),
        NodeRef::OutputPort(g, m) => {
            let out = memo
                .get(g)
                .ok_or_else(|| EvalError::InvalidCircuit(format!("gate {g} not evaluated")))?;
            out.get(m)
                .ok_or_else(|| EvalError::InvalidCircuit(format!("gate {g} has no output {m}")))
        }
        other => Err(EvalError::InvalidCircuit(format!("{other} is not a producer"))),
    }
}

/// The unique valuation extending `input`: inputs carry their given bits,
/// consumers copy their providers, gate outputs apply the gate tables.
/// Defined on every node, including those unreachable from the outputs.
pub fn eval_nodes(
    circuit: &BooleanCircuit,
    input: &BitAssignment,
) -> Result<NodeValuation, EvalError> {
    if !input.is_total_on(circuit.inputs()) {
        return Err(EvalError::InputMismatch);
    }
    let memo = eval_gates(circuit, input, None)?;

    let mut values = BTreeMap::new();
    for w in circuit.inputs().iter() {
        values.insert(
            NodeRef::InputNode(w.clone()),
            input.get(w).expect("total on inputs"),
        );
    }
    for (g, out) in &memo {
        for (m, bit) in out.iter() {
            values.insert(NodeRef::OutputPort(g.clone(), m.clone()), bit);
        }
    }
    // consumers copy their providers
    for consumer in circuit.consumers() {
        let provider = circuit.provider_of(&consumer).ok_or_else(|| {
            EvalError::InvalidCircuit(format!("consumer {consumer} has no provider"))
        })?;
        let bit = producer_bit(input, &memo, provider)?;
        values.insert(consumer, bit);
    }
    Ok(NodeValuation { values })
}

/// The function computed by the circuit: for every assignment to the input
/// nodes, the bits appearing at the output nodes.
pub fn computed_function(
    circuit: &BooleanCircuit,
) -> Result<BTreeMap<BitAssignment, BitAssignment>, EvalError> {
    let n = circuit.inputs().len();
    if n > MAX_TABLE_INPUTS {
        return Err(EvalError::TooManyInputs { count: n, max: MAX_TABLE_INPUTS });
    }
    let mut table = BTreeMap::new();
    for input in all_assignments(circuit.inputs()) {
        let valuation = eval_nodes(circuit, &input)?;
        let output = valuation.output_assignment(circuit);
        table.insert(input, output);
    }
    Ok(table)
}

/// Stage-wise evaluation: fires the gates of `stage` in a coherent order and
/// returns the bits at the stage's exits.
///
/// Exit bits are keyed by the serialized port labels of the exit producers
/// (`in:w`, `out:gate:label`), so the empty stage returns `input` with its
/// labels wrapped as `in:...`. Per-wire bits may be copied on fan-out, so
/// this is computed as the valuation of the fired sub-circuit restricted to
/// the exits; it agrees with [`eval_nodes`] restricted the same way.
pub fn eval_stage(
    circuit: &BooleanCircuit,
    input: &BitAssignment,
    stage: &Stage,
) -> Result<BitAssignment, EvalError> {
    if !input.is_total_on(circuit.inputs()) {
        return Err(EvalError::InputMismatch);
    }
    let exits = circuit.exits(stage)?;
    // fire exactly the stage's gates, in canonical coherent order
    let order = circuit.canonical_schedule_of(stage)?;
    let mut memo: BTreeMap<GateId, BitAssignment> = BTreeMap::new();
    for g in &order {
        let gate = circuit
            .gate(g)
            .ok_or_else(|| EvalError::InvalidCircuit(format!("unknown gate {g}")))?;
        let mut bits = BitAssignment::new();
        for l in gate.input_labels().iter() {
            let port = NodeRef::InputPort(g.clone(), l.clone());
            let provider = circuit.provider_of(&port).ok_or_else(|| {
                EvalError::InvalidCircuit(format!("consumer {port} has no provider"))
            })?;
            bits.set(l.clone(), producer_bit(input, &memo, provider)?);
        }
        let out = gate.apply(&bits).ok_or_else(|| {
            EvalError::InvalidCircuit(format!("gate {g} has an incomplete table"))
        })?;
        memo.insert(g.clone(), out.clone());
    }

    let mut result = BitAssignment::new();
    for exit in exits.iter() {
        let key: Label = exit.port_label().expect("exits are producers");
        result.set(key, producer_bit(input, &memo, exit)?);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::gates;
    use crate::label::LabelSet;

    fn lbl(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn gid(s: &str) -> GateId {
        GateId::new(s).unwrap()
    }

    fn bits(pairs: &[(&str, bool)]) -> BitAssignment {
        pairs.iter().map(|(l, b)| (lbl(l), *b)).collect()
    }

    fn identity_circuit() -> BooleanCircuit {
        Circuit::builder().input("w").output("w").wire("out:w", "in:w").build().unwrap()
    }

    fn not_circuit() -> BooleanCircuit {
        Circuit::builder()
            .input("w")
            .output("w")
            .gate("inv", gates::not("x", "y"))
            .wire("inv.x:in", "in:w")
            .wire("out:w", "inv.y:out")
            .build()
            .unwrap()
    }

    /// XOR and AND reading the same two inputs through fan-out.
    fn half_adder() -> BooleanCircuit {
        Circuit::builder()
            .input("x")
            .input("y")
            .output("sum")
            .output("carry")
            .gate("xr", gates::xor("a", "b", "s"))
            .gate("nd", gates::and("a", "b", "c"))
            .wire("xr.a:in", "in:x")
            .wire("xr.b:in", "in:y")
            .wire("nd.a:in", "in:x")
            .wire("nd.b:in", "in:y")
            .wire("out:sum", "xr.s:out")
            .wire("out:carry", "nd.c:out")
            .build()
            .unwrap()
    }

    #[test]
    fn identity_circuit_passes_its_bit_through() {
        let c = identity_circuit();
        let v = eval_nodes(&c, &bits(&[("w", true)])).unwrap();
        assert_eq!(v.get(&NodeRef::OutputNode(lbl("w"))), Some(true));
    }

    #[test]
    fn not_gate_inverts() {
        let c = not_circuit();
        let v = eval_nodes(&c, &bits(&[("w", false)])).unwrap();
        assert_eq!(v.get(&NodeRef::OutputNode(lbl("w"))), Some(true));
        assert_eq!(v.get(&NodeRef::InputPort(gid("inv"), lbl("x"))), Some(false));
        assert_eq!(v.get(&NodeRef::OutputPort(gid("inv"), lbl("y"))), Some(true));
    }

    #[test]
    fn half_adder_on_one_one() {
        let c = half_adder();
        let v = eval_nodes(&c, &bits(&[("x", true), ("y", true)])).unwrap();
        let out = v.output_assignment(&c);
        assert_eq!(out.get(&lbl("sum")), Some(false));
        assert_eq!(out.get(&lbl("carry")), Some(true));
    }

    #[test]
    fn half_adder_matches_hand_table() {
        let c = half_adder();
        let table = computed_function(&c).unwrap();
        let expect = [
            ((false, false), (false, false)),
            ((false, true), (true, false)),
            ((true, false), (true, false)),
            ((true, true), (false, true)),
        ];
        for ((x, y), (sum, carry)) in expect {
            let got = &table[&bits(&[("x", x), ("y", y)])];
            assert_eq!(got.get(&lbl("sum")), Some(sum));
            assert_eq!(got.get(&lbl("carry")), Some(carry));
        }
    }

    #[test]
    fn empty_circuit_computes_the_unique_empty_function() {
        let c: BooleanCircuit = Circuit::new(
            LabelSet::new(),
            LabelSet::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        );
        let table = computed_function(&c).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[&BitAssignment::new()], BitAssignment::new());
    }

    #[test]
    fn valuation_covers_nodes_unreachable_from_outputs() {
        // nd's output feeds nothing; its ports must still be valued
        let c: BooleanCircuit = Circuit::builder()
            .input("x")
            .input("y")
            .output("sum")
            .gate("xr", gates::xor("a", "b", "s"))
            .gate("nd", gates::and("a", "b", "c"))
            .wire("xr.a:in", "in:x")
            .wire("xr.b:in", "in:y")
            .wire("nd.a:in", "in:x")
            .wire("nd.b:in", "in:y")
            .wire("out:sum", "xr.s:out")
            .build()
            .unwrap();
        let v = eval_nodes(&c, &bits(&[("x", true), ("y", true)])).unwrap();
        assert_eq!(v.get(&NodeRef::OutputPort(gid("nd"), lbl("c"))), Some(true));
    }

    #[test]
    fn toffoli_circuit_computes_a_bijection() {
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
        assert!(c.check_balanced().is_balanced());
        let table = computed_function(&c).unwrap();
        let images: std::collections::BTreeSet<_> = table.values().collect();
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn empty_stage_returns_the_input_under_port_labels() {
        let c = half_adder();
        let a = bits(&[("x", true), ("y", false)]);
        let got = eval_stage(&c, &a, &c.empty_stage()).unwrap();
        assert_eq!(got, bits(&[("in:x", true), ("in:y", false)]));
    }

    #[test]
    fn full_stage_carries_the_outputs_on_provider_ports() {
        let c = half_adder();
        let a = bits(&[("x", true), ("y", true)]);
        let got = eval_stage(&c, &a, &c.full_stage()).unwrap();
        assert_eq!(got, bits(&[("out:xr:s", false), ("out:nd:c", true)]));
        // agrees with the node valuation composed with the output wiring
        let v = eval_nodes(&c, &a).unwrap();
        assert_eq!(
            v.output_assignment(&c),
            bits(&[("sum", false), ("carry", true)])
        );
    }

    #[test]
    fn single_gate_stage_of_the_not_circuit() {
        let c = not_circuit();
        let z = c.stage([gid("inv")].into_iter().collect()).unwrap();
        let got = eval_stage(&c, &bits(&[("w", false)]), &z).unwrap();
        assert_eq!(got, bits(&[("out:inv:y", true)]));
    }

    #[test]
    fn eval_stage_agrees_with_node_valuation_on_every_stage() {
        let c = half_adder();
        for input in all_assignments(c.inputs()) {
            let v = eval_nodes(&c, &input).unwrap();
            for stage in c.all_stages(100).unwrap() {
                let stage_bits = eval_stage(&c, &input, &stage).unwrap();
                for exit in c.exits(&stage).unwrap().iter() {
                    let key = exit.port_label().unwrap();
                    assert_eq!(stage_bits.get(&key), v.get(exit));
                }
                assert_eq!(stage_bits.len(), c.exits(&stage).unwrap().len());
            }
        }
    }

    #[test]
    fn determinism_two_runs_are_identical() {
        let c = half_adder();
        let a = bits(&[("x", false), ("y", true)]);
        assert_eq!(eval_nodes(&c, &a).unwrap(), eval_nodes(&c, &a).unwrap());
    }

    #[test]
    fn wrong_input_domain_is_rejected() {
        let c = not_circuit();
        assert_eq!(
            eval_nodes(&c, &bits(&[("nope", true)])),
            Err(EvalError::InputMismatch)
        );
    }
}
