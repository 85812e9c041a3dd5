//! Brute-force reference implementations.
//!
//! These recompute what the main evaluators compute, by deliberately
//! different means, and exist to cross-check them:
//!
//! * [`brute_force_unitary`] multiplies out explicit matrices — Kronecker
//!   products of identities with gate matrices, conjugated by explicit wire
//!   permutation matrices — instead of index arithmetic on amplitude arrays.
//! * [`brute_force_truth_table`] evaluates Boolean circuits by a blind
//!   fixpoint sweep with no topological ordering.
//! * [`exhaustive_schedule_check`] connects every coherent enumeration to the
//!   canonical one through adjacent transpositions, checking coherence and
//!   state agreement at every link.
//!
//! They are exponentially slower than the main paths and capped accordingly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{BooleanCircuit, QuantumCircuit};
use crate::gate::GatePorts;
use crate::label::{all_assignments, canonical_order, BitAssignment, Label};
use crate::matrix::CMatrix;
use crate::node::{GateId, NodeRef};
use crate::quantumsim::{self, SimError};
use crate::stage::StageError;
use crate::state::LabeledState;

/// Explicit matrices are `2^inputs` square; keep them small.
pub const MAX_ORACLE_UNITARY_INPUTS: usize = 8;

/// The fixpoint sweep enumerates `2^inputs` assignments.
pub const MAX_ORACLE_TABLE_INPUTS: usize = 16;

/// Interchange chains are built for every coherent enumeration; `7! = 5040`.
pub const MAX_INTERCHANGE_GATES: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("circuit has {count} inputs; the matrix oracle supports at most {max}")]
    TooManyQubits { count: usize, max: usize },
    #[error("circuit has {count} inputs; the table oracle supports at most {max}")]
    TooManyInputs { count: usize, max: usize },
    #[error("circuit has {count} gates; the interchange oracle supports at most {max}")]
    TooManyGates { count: usize, max: usize },
    #[error("circuit is malformed: {0}")]
    InvalidCircuit(String),
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// An explicit operator between two explicitly ordered label bases.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    /// Column basis labels, most significant first.
    pub in_labels: Vec<Label>,
    /// Row basis labels, most significant first.
    pub out_labels: Vec<Label>,
    pub matrix: CMatrix,
}

/// Permutation matrix that rewrites amplitude indices from the `from` wire
/// order to the `to` wire order (same label set, first label most
/// significant).
fn wire_permutation(from: &[Label], to: &[Label]) -> CMatrix {
    let n = from.len();
    debug_assert_eq!(to.len(), n);
    // to-position of each from-position
    let dest_pos: Vec<usize> = from
        .iter()
        .map(|l| to.iter().position(|t| t == l).expect("same label set"))
        .collect();
    let dim = 1usize << n;
    let mut dest_of_src = vec![0usize; dim];
    for (src, dest) in dest_of_src.iter_mut().enumerate() {
        let mut index = 0usize;
        for (p, q) in dest_pos.iter().enumerate() {
            if (src >> (n - 1 - p)) & 1 == 1 {
                index |= 1 << (n - 1 - q);
            }
        }
        *dest = index;
    }
    CMatrix::permutation(&dest_of_src)
}

/// Multiplies out the whole-circuit operator as explicit matrices.
///
/// For each gate in the canonical schedule the current wires are permuted so
/// the gate's providers sit in the lowest slots, `I ⊗ U` is formed as an
/// explicit Kronecker product, applied by matrix multiplication, and the
/// result is permuted back to the canonical wire order. This shares no code
/// with the simulator's amplitude-indexing path.
pub fn brute_force_unitary(circuit: &QuantumCircuit) -> Result<DenseOperator, OracleError> {
    let validation = circuit.validate();
    if !validation.is_valid() {
        return Err(OracleError::InvalidCircuit(format!(
            "{} structural violation(s)",
            validation.issues().len()
        )));
    }
    let quantum = circuit.check_quantum();
    if !quantum.is_valid() {
        return Err(OracleError::InvalidCircuit(format!(
            "{} quantum issue(s)",
            quantum.issues().len()
        )));
    }
    let n = circuit.inputs().len();
    if n > MAX_ORACLE_UNITARY_INPUTS {
        return Err(OracleError::TooManyQubits { count: n, max: MAX_ORACLE_UNITARY_INPUTS });
    }

    let in_labels = canonical_order(circuit.inputs());
    // wires carry port labels; the provider bijection keeps their count fixed
    let mut wires: Vec<Label> = in_labels
        .iter()
        .map(|w| NodeRef::InputNode(w.clone()).port_label().expect("producer"))
        .collect();
    wires.sort();
    let mut matrix = CMatrix::identity(1 << n);

    for gate_id in circuit.canonical_schedule() {
        let gate = circuit
            .gate(&gate_id)
            .ok_or_else(|| OracleError::InvalidCircuit(format!("unknown gate {gate_id}")))?;
        let arity = gate.arity();

        let mut targets = Vec::with_capacity(arity);
        for slot in gate.input_order() {
            let port = NodeRef::InputPort(gate_id.clone(), slot.clone());
            let provider = circuit.provider_of(&port).ok_or_else(|| {
                OracleError::InvalidCircuit(format!("consumer {port} has no provider"))
            })?;
            targets.push(provider.port_label().ok_or_else(|| {
                OracleError::InvalidCircuit(format!("{provider} is not a producer"))
            })?);
        }
        let rest: Vec<Label> =
            wires.iter().filter(|w| !targets.contains(*w)).cloned().collect();
        if rest.len() + targets.len() != wires.len() {
            return Err(OracleError::InvalidCircuit(format!(
                "providers of gate {gate_id} are not live wires"
            )));
        }

        // [rest..., targets...]: targets occupy the least significant slots
        let mut gathered = rest.clone();
        gathered.extend(targets.iter().cloned());
        let gather = wire_permutation(&wires, &gathered);

        let factor = CMatrix::identity(1 << rest.len()).kron(gate.matrix());

        let outputs: Vec<Label> = gate
            .output_order()
            .iter()
            .map(|m| {
                NodeRef::OutputPort(gate_id.clone(), m.clone())
                    .port_label()
                    .expect("output ports are producers")
            })
            .collect();
        let mut produced = rest;
        produced.extend(outputs);
        let mut sorted = produced.clone();
        sorted.sort();
        let scatter = wire_permutation(&produced, &sorted);

        matrix = scatter.mul(&factor).mul(&gather).mul(&matrix);
        wires = sorted;
    }

    Ok(DenseOperator { in_labels, out_labels: wires, matrix })
}

/// Evaluates every input of a Boolean circuit by sweeping all nodes until no
/// value changes; no topological order is consulted. Well-foundedness makes
/// each sweep value at least one new producer, so the sweep count is bounded.
pub fn brute_force_truth_table(
    circuit: &BooleanCircuit,
) -> Result<BTreeMap<BitAssignment, BitAssignment>, OracleError> {
    let n = circuit.inputs().len();
    if n > MAX_ORACLE_TABLE_INPUTS {
        return Err(OracleError::TooManyInputs { count: n, max: MAX_ORACLE_TABLE_INPUTS });
    }
    let consumers = circuit.consumers();
    let gate_ids: Vec<GateId> = circuit.gate_ids().cloned().collect();
    let sweep_limit = circuit.producers().len() + consumers.len() + 2;

    let mut table = BTreeMap::new();
    for input in all_assignments(circuit.inputs()) {
        let mut values: BTreeMap<NodeRef, bool> = circuit
            .inputs()
            .iter()
            .map(|w| {
                (NodeRef::InputNode(w.clone()), input.get(w).expect("total on inputs"))
            })
            .collect();

        let mut sweeps = 0usize;
        loop {
            let mut changed = false;
            // consumers copy providers
            for consumer in &consumers {
                if values.contains_key(consumer) {
                    continue;
                }
                let provider = circuit.provider_of(consumer).ok_or_else(|| {
                    OracleError::InvalidCircuit(format!("consumer {consumer} has no provider"))
                })?;
                if let Some(&bit) = values.get(provider) {
                    values.insert(consumer.clone(), bit);
                    changed = true;
                }
            }
            // gates fire once all their input ports are valued
            for gate_id in &gate_ids {
                let gate = circuit.gate(gate_id).expect("gate exists");
                let first_out = gate.output_labels().iter().next();
                let already = match first_out {
                    Some(m) => values
                        .contains_key(&NodeRef::OutputPort(gate_id.clone(), m.clone())),
                    None => true,
                };
                if already {
                    continue;
                }
                let mut bits = BitAssignment::new();
                let mut complete = true;
                for l in gate.input_labels().iter() {
                    match values.get(&NodeRef::InputPort(gate_id.clone(), l.clone())) {
                        Some(&b) => bits.set(l.clone(), b),
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                if !complete {
                    continue;
                }
                let out = gate.apply(&bits).ok_or_else(|| {
                    OracleError::InvalidCircuit(format!("gate {gate_id} has an incomplete table"))
                })?;
                for (m, bit) in out.iter() {
                    values.insert(NodeRef::OutputPort(gate_id.clone(), m.clone()), bit);
                }
                changed = true;
            }
            if !changed {
                break;
            }
            sweeps += 1;
            if sweeps > sweep_limit {
                return Err(OracleError::InvalidCircuit(
                    "fixpoint sweep did not settle; is the circuit acyclic?".into(),
                ));
            }
        }

        let mut output = BitAssignment::new();
        for w in circuit.outputs().iter() {
            let bit = values.get(&NodeRef::OutputNode(w.clone())).ok_or_else(|| {
                OracleError::InvalidCircuit(format!("output {w} never settled"))
            })?;
            output.set(w.clone(), *bit);
        }
        table.insert(input, output);
    }
    Ok(table)
}

/// Report of [`exhaustive_schedule_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleCheckReport {
    schedule_count: usize,
    chain_lengths: Vec<usize>,
    max_deviation: f64,
}

impl ScheduleCheckReport {
    pub fn schedule_count(&self) -> usize {
        self.schedule_count
    }

    /// Adjacent-transposition distance from each coherent enumeration to the
    /// canonical one, in enumeration order.
    pub fn chain_lengths(&self) -> &[usize] {
        &self.chain_lengths
    }

    pub fn max_chain_length(&self) -> usize {
        self.chain_lengths.iter().copied().max().unwrap_or(0)
    }

    /// Largest final-state deviation from the canonical schedule seen at any
    /// link of any chain.
    pub fn max_deviation(&self) -> f64 {
        self.max_deviation
    }

    pub fn passed(&self) -> bool {
        self.max_deviation <= quantumsim::AMPLITUDE_TOLERANCE
    }
}

/// Chain of enumerations from `from` to `to`, consecutive entries differing
/// by one adjacent swap. Both endpoints must be permutations of the same
/// gates; when both are coherent every link is coherent too, since a gate is
/// only moved left past gates that follow it in `to` and therefore cannot be
/// its prerequisites.
fn transposition_chain(from: &[GateId], to: &[GateId]) -> Vec<Vec<GateId>> {
    let mut current = from.to_vec();
    let mut chain = vec![current.clone()];
    for settled in 0..to.len() {
        let wanted = &to[settled];
        let position = current[settled..]
            .iter()
            .position(|g| g == wanted)
            .expect("same gate multiset")
            + settled;
        for swap_at in (settled + 1..=position).rev() {
            current.swap(swap_at - 1, swap_at);
            chain.push(current.clone());
        }
    }
    chain
}

/// Verifies, for every coherent enumeration, that a chain of coherent
/// adjacent transpositions reaches the canonical enumeration, and that the
/// final state agrees along the way.
pub fn exhaustive_schedule_check(
    circuit: &QuantumCircuit,
    input: &LabeledState,
) -> Result<ScheduleCheckReport, OracleError> {
    if circuit.gate_count() > MAX_INTERCHANGE_GATES {
        return Err(OracleError::TooManyGates {
            count: circuit.gate_count(),
            max: MAX_INTERCHANGE_GATES,
        });
    }
    let schedules = circuit.enumerate_schedules(crate::stage::DEFAULT_ENUMERATION_CAP)?;
    let canonical = circuit.canonical_schedule();

    let mut finals: BTreeMap<Vec<GateId>, LabeledState> = BTreeMap::new();
    let mut final_of = |schedule: &[GateId]| -> Result<LabeledState, OracleError> {
        if let Some(state) = finals.get(schedule) {
            return Ok(state.clone());
        }
        let trace = quantumsim::simulate(
            circuit,
            input,
            &quantumsim::SimulateOptions {
                schedule: Some(schedule.to_vec()),
                keep_intermediate: false,
            },
        )?;
        let state = trace.final_state().clone();
        finals.insert(schedule.to_vec(), state.clone());
        Ok(state)
    };

    let reference = final_of(&canonical)?;
    let mut chain_lengths = Vec::with_capacity(schedules.len());
    let mut max_deviation: f64 = 0.0;
    for schedule in &schedules {
        let chain = transposition_chain(schedule, &canonical);
        chain_lengths.push(chain.len() - 1);
        for link in &chain {
            let coherent = circuit.is_coherent(link)?;
            if !coherent {
                return Err(OracleError::InvalidCircuit(format!(
                    "interchange chain left the coherent enumerations at {link:?}"
                )));
            }
            let state = final_of(link)?;
            let deviation = state
                .max_deviation(&reference)
                .map_err(|e| OracleError::Sim(SimError::State(e)))?;
            max_deviation = max_deviation.max(deviation);
        }
    }
    Ok(ScheduleCheckReport {
        schedule_count: schedules.len(),
        chain_lengths,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::booleval::computed_function;
    use crate::circuit::Circuit;
    use crate::gates;
    use crate::quantumsim::circuit_unitary;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn lbl(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn gid(s: &str) -> GateId {
        GateId::new(s).unwrap()
    }

    fn bell() -> QuantumCircuit {
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
    fn empty_circuit_oracle_is_a_relabeling_permutation() {
        let c: QuantumCircuit = Circuit::builder()
            .input("a")
            .input("b")
            .output("x")
            .output("y")
            .wire("out:x", "in:b")
            .wire("out:y", "in:a")
            .build()
            .unwrap();
        let op = brute_force_unitary(&c).unwrap();
        // no gates: exits are the inputs themselves, identity on their basis
        assert!(op.matrix.max_entry_distance(&CMatrix::identity(4)).unwrap() <= 1e-12);
        assert_eq!(op.in_labels, vec![lbl("a"), lbl("b")]);
        assert_eq!(op.out_labels, vec![lbl("in:a"), lbl("in:b")]);
    }

    #[test]
    fn single_gate_oracle_is_that_gate() {
        let c: QuantumCircuit = Circuit::builder()
            .input("q")
            .output("q")
            .gate("h", gates::hadamard("a", "a"))
            .wire("h.a:in", "in:q")
            .wire("out:q", "h.a:out")
            .build()
            .unwrap();
        let op = brute_force_unitary(&c).unwrap();
        assert!(op
            .matrix
            .max_entry_distance(gates::hadamard("a", "a").matrix())
            .unwrap()
            <= 1e-12);
    }

    #[test]
    fn bell_oracle_matches_the_simulator_unitary() {
        let bell = bell();
        let oracle = brute_force_unitary(&bell).unwrap();
        let main = circuit_unitary(&bell, &bell.full_stage()).unwrap();
        assert!(oracle.matrix.max_entry_distance(&main).unwrap() <= 1e-10);
        let s = FRAC_1_SQRT_2;
        assert!((oracle.matrix.get(0, 0).re - s).abs() <= 1e-12);
        assert!((oracle.matrix.get(3, 0).re - s).abs() <= 1e-12);
        assert!((oracle.matrix.get(0, 2).re - s).abs() <= 1e-12);
    }

    #[test]
    fn identity_and_not_truth_tables() {
        let identity: BooleanCircuit =
            Circuit::builder().input("w").output("w").wire("out:w", "in:w").build().unwrap();
        let table = brute_force_truth_table(&identity).unwrap();
        for (input, output) in &table {
            assert_eq!(input.get(&lbl("w")), output.get(&lbl("w")));
        }

        let not: BooleanCircuit = Circuit::builder()
            .input("w")
            .output("w")
            .gate("inv", gates::not("x", "y"))
            .wire("inv.x:in", "in:w")
            .wire("out:w", "inv.y:out")
            .build()
            .unwrap();
        let table = brute_force_truth_table(&not).unwrap();
        for (input, output) in &table {
            assert_eq!(input.get(&lbl("w")), output.get(&lbl("w")).map(|b| !b));
        }
    }

    #[test]
    fn half_adder_oracle_matches_hand_enumeration_and_main_path() {
        let c: BooleanCircuit = Circuit::builder()
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
            .unwrap();
        let oracle = brute_force_truth_table(&c).unwrap();
        let ones: BitAssignment = [(lbl("x"), true), (lbl("y"), true)].into_iter().collect();
        assert_eq!(oracle[&ones].get(&lbl("sum")), Some(false));
        assert_eq!(oracle[&ones].get(&lbl("carry")), Some(true));
        assert_eq!(oracle, computed_function(&c).unwrap());
    }

    #[test]
    fn chain_circuit_needs_no_interchanges() {
        let c: QuantumCircuit = Circuit::builder()
            .input("q")
            .output("q")
            .gate("g1", gates::hadamard("a", "a"))
            .gate("g2", gates::phase(0.3, "a", "a"))
            .wire("g1.a:in", "in:q")
            .wire("g2.a:in", "g1.a:out")
            .wire("out:q", "g2.a:out")
            .build()
            .unwrap();
        let input = LabeledState::all_zeros(c.inputs().clone()).unwrap();
        let report = exhaustive_schedule_check(&c, &input).unwrap();
        assert_eq!(report.schedule_count(), 1);
        assert_eq!(report.max_chain_length(), 0);
        assert_eq!(report.max_deviation(), 0.0);
    }

    #[test]
    fn two_independent_gates_are_one_swap_apart() {
        let c: QuantumCircuit = Circuit::builder()
            .input("a")
            .input("b")
            .output("a")
            .output("b")
            .gate("p", gates::hadamard("x", "x"))
            .gate("q", gates::pauli_x("x", "x"))
            .wire("p.x:in", "in:a")
            .wire("q.x:in", "in:b")
            .wire("out:a", "p.x:out")
            .wire("out:b", "q.x:out")
            .build()
            .unwrap();
        let input = LabeledState::all_zeros(c.inputs().clone()).unwrap();
        let report = exhaustive_schedule_check(&c, &input).unwrap();
        assert_eq!(report.schedule_count(), 2);
        assert_eq!(report.chain_lengths(), &[0, 1]);
        assert!(report.passed());
    }

    #[test]
    fn three_independent_gates_connect_all_six_schedules() {
        let mut builder = Circuit::<crate::gate::QuantumGateType>::builder();
        for (i, wire) in ["a", "b", "c"].iter().enumerate() {
            builder = builder
                .input(wire)
                .output(wire)
                .gate(&format!("g{i}"), gates::phase(0.1 + i as f64, "x", "x"))
                .wire(&format!("g{i}.x:in"), &format!("in:{wire}"))
                .wire(&format!("out:{wire}"), &format!("g{i}.x:out"));
        }
        let c = builder.build().unwrap();
        let input = LabeledState::all_zeros(c.inputs().clone()).unwrap();
        let report = exhaustive_schedule_check(&c, &input).unwrap();
        assert_eq!(report.schedule_count(), 6);
        assert_eq!(report.max_chain_length(), 3); // bubble distance of the reversal
        assert!(report.max_deviation() <= 1e-10);
    }

    #[test]
    fn transposition_chain_is_a_sequence_of_adjacent_swaps() {
        let from: Vec<GateId> = ["c", "b", "a"].iter().map(|s| gid(s)).collect();
        let to: Vec<GateId> = ["a", "b", "c"].iter().map(|s| gid(s)).collect();
        let chain = transposition_chain(&from, &to);
        assert_eq!(chain.first().unwrap(), &from);
        assert_eq!(chain.last().unwrap(), &to);
        for pair in chain.windows(2) {
            let differing: Vec<usize> =
                (0..3).filter(|&i| pair[0][i] != pair[1][i]).collect();
            assert_eq!(differing.len(), 2);
            assert_eq!(differing[1], differing[0] + 1);
        }
    }

    #[test]
    fn gate_caps_are_enforced() {
        let mut builder = Circuit::<crate::gate::QuantumGateType>::builder();
        for i in 0..8 {
            let wire = format!("w{i}");
            builder = builder
                .input(&wire)
                .output(&wire)
                .gate(&format!("g{i}"), gates::pauli_x("x", "x"))
                .wire(&format!("g{i}.x:in"), &format!("in:{wire}"))
                .wire(&format!("out:{wire}"), &format!("g{i}.x:out"));
        }
        let c = builder.build().unwrap();
        let input = LabeledState::all_zeros(c.inputs().clone()).unwrap();
        assert!(matches!(
            exhaustive_schedule_check(&c, &input),
            Err(OracleError::TooManyGates { count: 8, max: 7 })
        ));
    }

    #[test]
    fn truth_table_cap_is_enforced() {
        let inputs: Vec<String> = (0..17).map(|i| format!("w{i:02}")).collect();
        let mut builder = Circuit::<crate::gate::BooleanGateType>::builder();
        for w in &inputs {
            builder = builder.input(w).output(w).wire(&format!("out:{w}"), &format!("in:{w}"));
        }
        let c = builder.build().unwrap();
        assert!(matches!(
            brute_force_truth_table(&c),
            Err(OracleError::TooManyInputs { count: 17, max: 16 })
        ));
    }
}
