//! Stages: prerequisite-closed gate sets and the exits calculus.
//!
//! A stage models "the gates that have already fired". Its exits are the
//! producers whose values are live at that moment: inputs and outputs of
//! fired gates not yet consumed by fired gates. Advancing a ready gate
//! updates the exits incrementally; enumerating every prerequisite-respecting
//! gate order underpins the schedule-invariance checks.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::circuit::Circuit;
use crate::gate::GatePorts;
use crate::label::LabelSet;
use crate::node::{GateId, NodeRef};

/// Default guard for enumeration sizes; linear extension counts grow
/// factorially.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StageError {
    #[error("unknown gate {0}")]
    UnknownGate(GateId),
    #[error("stage belongs to a different circuit")]
    ForeignStage,
    #[error("gate set is not closed under prerequisites: contains {gate} but not {missing}")]
    NotAStage { gate: GateId, missing: GateId },
    #[error("gate {0} is not ready at this stage")]
    NotReady(GateId),
    #[error("sequence is not a permutation of the circuit's gates")]
    NotAPermutation,
    #[error("enumeration exceeds the cap of {cap}")]
    EnumerationOverflow { cap: usize },
}

/// A set of gates closed under direct prerequisites, tied to the circuit it
/// was built from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Stage {
    circuit: u64,
    gates: BTreeSet<GateId>,
}

impl Stage {
    pub fn gates(&self) -> &BTreeSet<GateId> {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn contains(&self, gate: &GateId) -> bool {
        self.gates.contains(gate)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.gates.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

/// The live producers of a stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExitSet {
    nodes: BTreeSet<NodeRef>,
}

impl ExitSet {
    pub fn nodes(&self) -> &BTreeSet<NodeRef> {
        &self.nodes
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeRef> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: &NodeRef) -> bool {
        self.nodes.contains(node)
    }

    /// The factor labels of a state over these exits (see
    /// [`NodeRef::port_label`]).
    pub fn state_labels(&self) -> LabelSet {
        self.nodes
            .iter()
            .map(|n| n.port_label().expect("exits are producers"))
            .collect()
    }

    pub fn into_nodes(self) -> BTreeSet<NodeRef> {
        self.nodes
    }
}

impl fmt::Display for ExitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl<G: GatePorts> Circuit<G> {
    /// The stage at which nothing has fired.
    pub fn empty_stage(&self) -> Stage {
        Stage { circuit: self.fingerprint(), gates: BTreeSet::new() }
    }

    /// The stage after every gate has fired.
    pub fn full_stage(&self) -> Stage {
        Stage {
            circuit: self.fingerprint(),
            gates: self.gate_ids().cloned().collect(),
        }
    }

    /// Checks closure under direct prerequisites and wraps the set.
    pub fn stage(&self, gates: BTreeSet<GateId>) -> Result<Stage, StageError> {
        for gate in &gates {
            for missing in self.prerequisites_of(gate)? {
                if !gates.contains(&missing) {
                    return Err(StageError::NotAStage { gate: gate.clone(), missing });
                }
            }
        }
        Ok(Stage { circuit: self.fingerprint(), gates })
    }

    /// True when `gates` is closed under direct prerequisites.
    pub fn is_stage(&self, gates: &BTreeSet<GateId>) -> Result<bool, StageError> {
        for gate in gates {
            for p in self.prerequisites_of(gate)? {
                if !gates.contains(&p) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn prerequisites_of(&self, gate: &GateId) -> Result<BTreeSet<GateId>, StageError> {
        self.direct_prerequisites(gate)
            .map_err(|_| StageError::UnknownGate(gate.clone()))
    }

    fn check_owned(&self, stage: &Stage) -> Result<(), StageError> {
        if stage.circuit != self.fingerprint() {
            return Err(StageError::ForeignStage);
        }
        Ok(())
    }

    /// The exits of a stage: input nodes and output ports of fired gates,
    /// minus everything consumed by fired gates. `exits(∅)` is the input
    /// nodes; the exits of the full stage are the providers of the output
    /// nodes (plus anything dangling).
    pub fn exits(&self, stage: &Stage) -> Result<ExitSet, StageError> {
        self.check_owned(stage)?;
        let mut nodes: BTreeSet<NodeRef> = self
            .inputs()
            .iter()
            .map(|w| NodeRef::InputNode(w.clone()))
            .collect();
        for gate in &stage.gates {
            let ports = self
                .gate(gate)
                .ok_or_else(|| StageError::UnknownGate(gate.clone()))?;
            for m in ports.output_labels().iter() {
                nodes.insert(NodeRef::OutputPort(gate.clone(), m.clone()));
            }
        }
        for gate in &stage.gates {
            for consumed in self
                .providers_of_gate(gate)
                .map_err(|_| StageError::UnknownGate(gate.clone()))?
            {
                nodes.remove(&consumed);
            }
        }
        Ok(ExitSet { nodes })
    }

    /// Gates not yet fired whose direct prerequisites have all fired.
    pub fn ready_gates(&self, stage: &Stage) -> Result<BTreeSet<GateId>, StageError> {
        self.check_owned(stage)?;
        let mut ready = BTreeSet::new();
        for gate in self.gate_ids() {
            if stage.contains(gate) {
                continue;
            }
            if self.prerequisites_of(gate)?.is_subset(&stage.gates) {
                ready.insert(gate.clone());
            }
        }
        Ok(ready)
    }

    /// Fires a ready gate: returns the enlarged stage and its exits, computed
    /// incrementally as `(exits − providers of g) ∪ output ports of g`.
    pub fn advance(&self, stage: &Stage, gate: &GateId) -> Result<(Stage, ExitSet), StageError> {
        self.check_owned(stage)?;
        let ports = self
            .gate(gate)
            .ok_or_else(|| StageError::UnknownGate(gate.clone()))?;
        if stage.contains(gate) || !self.prerequisites_of(gate)?.is_subset(&stage.gates) {
            return Err(StageError::NotReady(gate.clone()));
        }

        let mut nodes = self.exits(stage)?.into_nodes();
        for consumed in self
            .providers_of_gate(gate)
            .map_err(|_| StageError::UnknownGate(gate.clone()))?
        {
            nodes.remove(&consumed);
        }
        for m in ports.output_labels().iter() {
            nodes.insert(NodeRef::OutputPort(gate.clone(), m.clone()));
        }

        let mut gates = stage.gates.clone();
        gates.insert(gate.clone());
        Ok((Stage { circuit: stage.circuit, gates }, ExitSet { nodes }))
    }

    /// True when `sequence` is a permutation of all gates in which every
    /// prerequisite precedes its dependents. Coherence with the direct
    /// relation and with its transitive closure coincide.
    pub fn is_coherent(&self, sequence: &[GateId]) -> Result<bool, StageError> {
        if sequence.len() != self.gate_count() {
            return Err(StageError::NotAPermutation);
        }
        let mut position = std::collections::BTreeMap::new();
        for (i, g) in sequence.iter().enumerate() {
            if self.gate(g).is_none() || position.insert(g.clone(), i).is_some() {
                return Err(StageError::NotAPermutation);
            }
        }
        for (i, g) in sequence.iter().enumerate() {
            for p in self.prerequisites_of(g)? {
                if position[&p] >= i {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Lazily yields every coherent enumeration of all gates exactly once,
    /// in lexicographic order of gate names.
    pub fn coherent_enumerations(&self) -> CoherentEnumerations<'_, G> {
        CoherentEnumerations::new(self)
    }

    /// Collects coherent enumerations, refusing to return more than `cap`.
    pub fn enumerate_schedules(&self, cap: usize) -> Result<Vec<Vec<GateId>>, StageError> {
        let mut out = Vec::new();
        for schedule in self.coherent_enumerations() {
            if out.len() == cap {
                return Err(StageError::EnumerationOverflow { cap });
            }
            out.push(schedule);
        }
        Ok(out)
    }

    /// The enumeration that always fires the least-named ready gate; used as
    /// the default schedule everywhere.
    pub fn canonical_schedule(&self) -> Vec<GateId> {
        self.canonical_schedule_within(&self.gate_ids().cloned().collect())
    }

    /// Canonical coherent ordering of the gates of a stage. Prerequisites of
    /// stage gates are stage gates, so the restriction is self-contained.
    pub fn canonical_schedule_of(&self, stage: &Stage) -> Result<Vec<GateId>, StageError> {
        self.check_owned(stage)?;
        Ok(self.canonical_schedule_within(&stage.gates))
    }

    fn canonical_schedule_within(&self, gates: &BTreeSet<GateId>) -> Vec<GateId> {
        let mut fired: BTreeSet<GateId> = BTreeSet::new();
        let mut order = Vec::with_capacity(gates.len());
        while order.len() < gates.len() {
            let next = gates.iter().find(|g| {
                !fired.contains(*g)
                    && self
                        .prerequisites_of(g)
                        .map(|ps| ps.is_subset(&fired))
                        .unwrap_or(false)
            });
            match next {
                Some(g) => {
                    fired.insert(g.clone());
                    order.push(g.clone());
                }
                // unreachable for valid circuits; avoid spinning on cycles
                None => break,
            }
        }
        order
    }

    /// Every stage of the circuit, i.e. every prerequisite-closed gate set,
    /// in deterministic order. Guarded by `cap` since there can be up to
    /// `2^gates` of them.
    pub fn all_stages(&self, cap: usize) -> Result<Vec<Stage>, StageError> {
        let mut seen: BTreeSet<BTreeSet<GateId>> = BTreeSet::new();
        let mut queue: Vec<BTreeSet<GateId>> = vec![BTreeSet::new()];
        seen.insert(BTreeSet::new());
        while let Some(gates) = queue.pop() {
            let stage = Stage { circuit: self.fingerprint(), gates: gates.clone() };
            for g in self.ready_gates(&stage)? {
                let mut enlarged = gates.clone();
                enlarged.insert(g);
                if seen.insert(enlarged.clone()) {
                    if seen.len() > cap {
                        return Err(StageError::EnumerationOverflow { cap });
                    }
                    queue.push(enlarged);
                }
            }
        }
        Ok(seen
            .into_iter()
            .map(|gates| Stage { circuit: self.fingerprint(), gates })
            .collect())
    }
}

/// Backtracking iterator over all linear extensions of the prerequisite
/// order. Each level picks the next gate among those ready, trying
/// candidates in name order.
pub struct CoherentEnumerations<'c, G> {
    circuit: &'c Circuit<G>,
    stack: Vec<Frame>,
    prefix: Vec<GateId>,
    fired: BTreeSet<GateId>,
    total: usize,
    started: bool,
    exhausted: bool,
}

struct Frame {
    choices: Vec<GateId>,
    next: usize,
}

impl<'c, G: GatePorts> CoherentEnumerations<'c, G> {
    fn new(circuit: &'c Circuit<G>) -> Self {
        CoherentEnumerations {
            circuit,
            stack: Vec::new(),
            prefix: Vec::new(),
            fired: BTreeSet::new(),
            total: circuit.gate_count(),
            started: false,
            exhausted: false,
        }
    }

    fn ready_choices(&self) -> Vec<GateId> {
        self.circuit
            .gate_ids()
            .filter(|g| {
                !self.fired.contains(*g)
                    && self
                        .circuit
                        .direct_prerequisites(g)
                        .map(|ps| ps.is_subset(&self.fired))
                        .unwrap_or(false)
            })
            .cloned()
            .collect()
    }
}

impl<'c, G: GatePorts> Iterator for CoherentEnumerations<'c, G> {
    type Item = Vec<GateId>;

    fn next(&mut self) -> Option<Vec<GateId>> {
        if self.exhausted {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.total == 0 {
                self.exhausted = true;
                return Some(Vec::new());
            }
            let choices = self.ready_choices();
            self.stack.push(Frame { choices, next: 0 });
        }
        loop {
            let Some(top) = self.stack.last_mut() else {
                self.exhausted = true;
                return None;
            };
            if top.next < top.choices.len() {
                let gate = top.choices[top.next].clone();
                top.next += 1;
                self.prefix.push(gate.clone());
                self.fired.insert(gate);
                if self.prefix.len() == self.total {
                    let complete = self.prefix.clone();
                    let last = self.prefix.pop().expect("nonempty prefix");
                    self.fired.remove(&last);
                    return Some(complete);
                }
                let choices = self.ready_choices();
                self.stack.push(Frame { choices, next: 0 });
            } else {
                self.stack.pop();
                if let Some(gate) = self.prefix.pop() {
                    self.fired.remove(&gate);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BooleanCircuit, Circuit, QuantumCircuit};
    use crate::gates;
    use crate::label::Label;

    fn gid(s: &str) -> GateId {
        GateId::new(s).unwrap()
    }

    fn lbl(s: &str) -> Label {
        Label::new(s).unwrap()
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

    /// Three NOT gates in a row on one wire.
    fn chain3() -> BooleanCircuit {
        Circuit::builder()
            .input("w")
            .output("w")
            .gate("g1", gates::not("x", "y"))
            .gate("g2", gates::not("x", "y"))
            .gate("g3", gates::not("x", "y"))
            .wire("g1.x:in", "in:w")
            .wire("g2.x:in", "g1.y:out")
            .wire("g3.x:in", "g2.y:out")
            .wire("out:w", "g3.y:out")
            .build()
            .unwrap()
    }

    /// Two NOT gates on independent wires.
    fn parallel2() -> BooleanCircuit {
        Circuit::builder()
            .input("a")
            .input("b")
            .output("a")
            .output("b")
            .gate("p", gates::not("x", "y"))
            .gate("q", gates::not("x", "y"))
            .wire("p.x:in", "in:a")
            .wire("q.x:in", "in:b")
            .wire("out:a", "p.y:out")
            .wire("out:b", "q.y:out")
            .build()
            .unwrap()
    }

    #[test]
    fn empty_and_full_sets_are_stages() {
        let bell = bell();
        assert!(bell.is_stage(&BTreeSet::new()).unwrap());
        assert!(bell.is_stage(&[gid("h"), gid("cn")].into_iter().collect()).unwrap());
        // {cn} misses its prerequisite h
        assert!(!bell.is_stage(&[gid("cn")].into_iter().collect()).unwrap());
        assert!(matches!(
            bell.stage([gid("cn")].into_iter().collect()),
            Err(StageError::NotAStage { .. })
        ));
    }

    #[test]
    fn exits_of_empty_stage_are_the_input_nodes() {
        let bell = bell();
        let exits = bell.exits(&bell.empty_stage()).unwrap();
        let expected: BTreeSet<NodeRef> =
            [NodeRef::InputNode(lbl("c")), NodeRef::InputNode(lbl("t"))].into_iter().collect();
        assert_eq!(exits.nodes(), &expected);
    }

    #[test]
    fn exits_of_full_stage_are_the_output_providers() {
        let bell = bell();
        let exits = bell.exits(&bell.full_stage()).unwrap();
        let expected: BTreeSet<NodeRef> = [
            NodeRef::OutputPort(gid("cn"), lbl("c")),
            NodeRef::OutputPort(gid("cn"), lbl("t")),
        ]
        .into_iter()
        .collect();
        assert_eq!(exits.nodes(), &expected);
    }

    #[test]
    fn exits_after_first_gate_mix_ports_and_inputs() {
        let bell = bell();
        let z = bell.stage([gid("h")].into_iter().collect()).unwrap();
        let exits = bell.exits(&z).unwrap();
        let expected: BTreeSet<NodeRef> =
            [NodeRef::OutputPort(gid("h"), lbl("a")), NodeRef::InputNode(lbl("t"))]
                .into_iter()
                .collect();
        assert_eq!(exits.nodes(), &expected);
    }

    #[test]
    fn ready_gates_respect_prerequisites() {
        let bell = bell();
        assert_eq!(
            bell.ready_gates(&bell.empty_stage()).unwrap(),
            [gid("h")].into_iter().collect()
        );
        assert_eq!(bell.ready_gates(&bell.full_stage()).unwrap(), BTreeSet::new());

        let parallel = parallel2();
        assert_eq!(
            parallel.ready_gates(&parallel.empty_stage()).unwrap(),
            [gid("p"), gid("q")].into_iter().collect()
        );
    }

    #[test]
    fn advance_matches_recomputed_exits() {
        let bell = bell();
        let (z1, exits1) = bell.advance(&bell.empty_stage(), &gid("h")).unwrap();
        assert_eq!(exits1, bell.exits(&z1).unwrap());
        let (z2, exits2) = bell.advance(&z1, &gid("cn")).unwrap();
        assert_eq!(exits2, bell.exits(&z2).unwrap());
        assert_eq!(exits2.len(), 2);
        assert!(matches!(
            bell.advance(&bell.empty_stage(), &gid("cn")),
            Err(StageError::NotReady(_))
        ));
        assert!(matches!(bell.advance(&z1, &gid("h")), Err(StageError::NotReady(_))));
    }

    #[test]
    fn advancing_an_isolated_gate_keeps_exits_unchanged_modulo_its_ports() {
        // gate with no inputs and no outputs
        let trivial = crate::gate::BooleanGateType::from_fn(
            LabelSet::new(),
            LabelSet::new(),
            |_| crate::label::BitAssignment::new(),
        )
        .unwrap();
        let c: BooleanCircuit = Circuit::builder()
            .input("w")
            .output("w")
            .gate("g", trivial)
            .wire("out:w", "in:w")
            .build()
            .unwrap();
        let before = c.exits(&c.empty_stage()).unwrap();
        let (_, after) = c.advance(&c.empty_stage(), &gid("g")).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn stages_from_other_circuits_are_rejected() {
        let bell = bell();
        let other = chain3();
        assert_eq!(bell.exits(&other.empty_stage()), Err(StageError::ForeignStage));
    }

    #[test]
    fn chain_has_one_enumeration() {
        let c = chain3();
        let all: Vec<_> = c.coherent_enumerations().collect();
        assert_eq!(all, vec![vec![gid("g1"), gid("g2"), gid("g3")]]);
    }

    #[test]
    fn independent_gates_have_both_orders() {
        let c = parallel2();
        let all: Vec<_> = c.coherent_enumerations().collect();
        assert_eq!(
            all,
            vec![vec![gid("p"), gid("q")], vec![gid("q"), gid("p")]]
        );
    }

    #[test]
    fn empty_circuit_has_exactly_the_empty_enumeration() {
        let c: BooleanCircuit =
            Circuit::builder().input("w").output("w").wire("out:w", "in:w").build().unwrap();
        let all: Vec<_> = c.coherent_enumerations().collect();
        assert_eq!(all, vec![Vec::<GateId>::new()]);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let c = parallel2();
        assert_eq!(c.enumerate_schedules(10).unwrap().len(), 2);
        assert_eq!(
            c.enumerate_schedules(1),
            Err(StageError::EnumerationOverflow { cap: 1 })
        );
    }

    #[test]
    fn coherence_checks() {
        let bell = bell();
        assert!(bell.is_coherent(&[gid("h"), gid("cn")]).unwrap());
        assert!(!bell.is_coherent(&[gid("cn"), gid("h")]).unwrap());
        assert_eq!(bell.is_coherent(&[gid("h")]), Err(StageError::NotAPermutation));
        assert_eq!(
            bell.is_coherent(&[gid("h"), gid("h")]),
            Err(StageError::NotAPermutation)
        );
    }

    #[test]
    fn all_stages_of_the_two_gate_chain() {
        let bell = bell();
        let stages = bell.all_stages(100).unwrap();
        // ∅, {h}, {h,cn}
        assert_eq!(stages.len(), 3);
        let parallel = parallel2();
        assert_eq!(parallel.all_stages(100).unwrap().len(), 4);
    }

    #[test]
    fn canonical_schedule_prefers_name_order() {
        let parallel = parallel2();
        assert_eq!(parallel.canonical_schedule(), vec![gid("p"), gid("q")]);
        let bell = bell();
        assert_eq!(bell.canonical_schedule(), vec![gid("h"), gid("cn")]);
    }
}
