//! Quantum semantics: the global state carried by a stage's exits.
//!
//! There is no per-node state in the quantum world — entanglement forbids
//! it — so evaluation assigns a state vector to every *stage*, over the
//! factors named by the stage's exits. Firing a ready gate applies its
//! operator to the factors it consumes and renames them to its output
//! ports; everything else is untouched. The final state is independent of
//! the firing order, which [`check_schedule_invariance`] verifies
//! empirically against every coherent enumeration.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{QuantumCircuit, QuantumReport};
use crate::label::Label;
use crate::node::{GateId, NodeRef};
use crate::stage::{Stage, StageError};
use crate::state::{LabeledState, StateError};

/// Per-amplitude tolerance for state agreement.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-10;

/// Cap for materializing whole-circuit operators column by column.
pub const MAX_UNITARY_INPUTS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("circuit is not a valid quantum circuit: {summary}")]
    InvalidCircuit { summary: String },
    #[error("input state labels do not match the circuit's input nodes")]
    InputMismatch,
    #[error("schedule is not coherent with the prerequisite order")]
    IncoherentSchedule,
    #[error("circuit has {count} inputs; operators are materialized only up to {max}")]
    TooManyQubits { count: usize, max: usize },
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Rejects circuits that fail structural validation or the quantum checks;
/// everything downstream relies on the provider function being a bijection
/// and the gates being unitary.
fn ensure_simulable(circuit: &QuantumCircuit) -> Result<(), SimError> {
    let validation = circuit.validate();
    if !validation.is_valid() {
        return Err(SimError::InvalidCircuit {
            summary: format!("{} structural violation(s)", validation.issues().len()),
        });
    }
    let report: QuantumReport = circuit.check_quantum();
    if !report.is_valid() {
        let first = report.issues().first().expect("invalid report has issues");
        return Err(SimError::InvalidCircuit {
            summary: format!("{} issue(s), first: {first}", report.issues().len()),
        });
    }
    Ok(())
}

/// Rewrites a state over the circuit's raw input labels into the port-label
/// namespace (`in:w`) used along the computation.
fn enter_input_ports(
    circuit: &QuantumCircuit,
    input: &LabeledState,
) -> Result<LabeledState, SimError> {
    if input.labels() != circuit.inputs() {
        return Err(SimError::InputMismatch);
    }
    let mapping: BTreeMap<Label, Label> = circuit
        .inputs()
        .iter()
        .map(|w| {
            let port = NodeRef::InputNode(w.clone()).port_label().expect("producer");
            (w.clone(), port)
        })
        .collect();
    Ok(input.reindex(&mapping)?)
}

/// Applies one gate to a state whose labels include the gate's providers.
fn fire_gate(
    circuit: &QuantumCircuit,
    state: &LabeledState,
    gate_id: &GateId,
) -> Result<LabeledState, SimError> {
    let gate = circuit
        .gate(gate_id)
        .ok_or(StageError::UnknownGate(gate_id.clone()))?;
    let mut targets_in = Vec::with_capacity(gate.arity());
    for slot in gate.input_order() {
        let port = NodeRef::InputPort(gate_id.clone(), slot.clone());
        let provider = circuit.provider_of(&port).ok_or_else(|| SimError::InvalidCircuit {
            summary: format!("consumer {port} has no provider"),
        })?;
        targets_in.push(provider.port_label().ok_or_else(|| SimError::InvalidCircuit {
            summary: format!("{provider} is not a producer"),
        })?);
    }
    let targets_out: Vec<Label> = gate
        .output_order()
        .iter()
        .map(|m| {
            NodeRef::OutputPort(gate_id.clone(), m.clone())
                .port_label()
                .expect("output ports are producers")
        })
        .collect();
    Ok(state.apply_local(&targets_in, gate.matrix(), &targets_out)?)
}

/// The state at a stage: the input state pushed through the stage's gates in
/// any coherent order. The result lives over the stage's exit port labels and
/// does not depend on the order chosen.
pub fn state_at_stage(
    circuit: &QuantumCircuit,
    input: &LabeledState,
    stage: &Stage,
) -> Result<LabeledState, SimError> {
    ensure_simulable(circuit)?;
    let order = circuit.canonical_schedule_of(stage)?;
    let mut state = enter_input_ports(circuit, input)?;
    for gate_id in &order {
        state = fire_gate(circuit, &state, gate_id)?;
    }
    debug_assert_eq!(state.labels(), &circuit.exits(stage)?.state_labels());
    Ok(state)
}

/// Options for [`simulate`].
#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    /// Firing order; the canonical schedule when absent. Must be a coherent
    /// enumeration of all gates.
    pub schedule: Option<Vec<GateId>>,
    /// Keep the state after every prefix stage, not only the final one.
    pub keep_intermediate: bool,
}

/// A run of the whole circuit under one schedule.
///
/// `states` holds one state per prefix stage when intermediate retention was
/// requested, otherwise just the final state. Norms are recorded at every
/// step regardless, so norm conservation is checkable without the memory
/// cost of a full trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    schedule: Vec<GateId>,
    states: Vec<LabeledState>,
    step_norms: Vec<f64>,
}

impl SimulationTrace {
    pub fn schedule(&self) -> &[GateId] {
        &self.schedule
    }

    pub fn states(&self) -> &[LabeledState] {
        &self.states
    }

    pub fn final_state(&self) -> &LabeledState {
        self.states.last().expect("at least the final state is kept")
    }

    /// Norm after each prefix stage, starting with the input state's.
    pub fn step_norms(&self) -> &[f64] {
        &self.step_norms
    }

    /// Largest drift of a step norm from the input norm.
    pub fn max_norm_drift(&self) -> f64 {
        let reference = self.step_norms.first().copied().unwrap_or(0.0);
        self.step_norms
            .iter()
            .map(|n| (n - reference).abs())
            .fold(0.0, f64::max)
    }
}

/// Runs the circuit on `input` under a chosen (or canonical) schedule.
pub fn simulate(
    circuit: &QuantumCircuit,
    input: &LabeledState,
    options: &SimulateOptions,
) -> Result<SimulationTrace, SimError> {
    ensure_simulable(circuit)?;
    let schedule = match &options.schedule {
        Some(schedule) => {
            if !circuit.is_coherent(schedule)? {
                return Err(SimError::IncoherentSchedule);
            }
            schedule.clone()
        }
        None => circuit.canonical_schedule(),
    };
    run_schedule(circuit, input, &schedule, options.keep_intermediate)
}

fn run_schedule(
    circuit: &QuantumCircuit,
    input: &LabeledState,
    schedule: &[GateId],
    keep_intermediate: bool,
) -> Result<SimulationTrace, SimError> {
    let mut state = enter_input_ports(circuit, input)?;
    let mut step_norms = vec![state.norm()];
    let mut states = Vec::new();
    if keep_intermediate {
        states.push(state.clone());
    }
    for gate_id in schedule {
        state = fire_gate(circuit, &state, gate_id)?;
        step_norms.push(state.norm());
        if keep_intermediate {
            states.push(state.clone());
        }
    }
    if !keep_intermediate {
        states.push(state);
    }
    Ok(SimulationTrace { schedule: schedule.to_vec(), states, step_norms })
}

/// Materializes the operator taking input states to their states at `stage`,
/// one basis column at a time. Rows follow the canonical order of the exit
/// port labels, columns the canonical order of the input nodes.
pub fn circuit_unitary(
    circuit: &QuantumCircuit,
    stage: &Stage,
) -> Result<crate::matrix::CMatrix, SimError> {
    ensure_simulable(circuit)?;
    let n = circuit.inputs().len();
    if n > MAX_UNITARY_INPUTS {
        return Err(SimError::TooManyQubits { count: n, max: MAX_UNITARY_INPUTS });
    }
    let order = circuit.canonical_schedule_of(stage)?;
    let input_order = crate::label::canonical_order(circuit.inputs());
    let rows = 1usize << circuit.exits(stage)?.len();
    let mut matrix = crate::matrix::CMatrix::zeros(rows, 1 << n);
    for col in 0..1usize << n {
        let bits = crate::label::BitAssignment::from_index(&input_order, col);
        let basis = LabeledState::basis(circuit.inputs().clone(), &bits)?;
        let mut state = enter_input_ports(circuit, &basis)?;
        for gate_id in &order {
            state = fire_gate(circuit, &state, gate_id)?;
        }
        matrix.set_column(col, state.amplitudes());
    }
    Ok(matrix)
}

/// Outcome of running every coherent enumeration of a circuit on one input.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    schedule_count: usize,
    max_deviation: f64,
    max_norm_drift: f64,
}

impl InvarianceReport {
    pub fn schedule_count(&self) -> usize {
        self.schedule_count
    }

    /// Largest pairwise per-amplitude deviation between final states.
    pub fn max_deviation(&self) -> f64 {
        self.max_deviation
    }

    /// Largest per-step norm drift seen in any of the runs.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    pub fn passed(&self) -> bool {
        self.max_deviation <= AMPLITUDE_TOLERANCE
    }
}

/// Simulates the circuit under every coherent enumeration (at most `cap`)
/// and compares all final states pairwise.
pub fn check_schedule_invariance(
    circuit: &QuantumCircuit,
    input: &LabeledState,
    cap: usize,
) -> Result<InvarianceReport, SimError> {
    ensure_simulable(circuit)?;
    let schedules = circuit.enumerate_schedules(cap)?;
    let mut finals = Vec::with_capacity(schedules.len());
    let mut max_norm_drift: f64 = 0.0;
    for schedule in &schedules {
        let trace = run_schedule(circuit, input, schedule, false)?;
        max_norm_drift = max_norm_drift.max(trace.max_norm_drift());
        finals.push(trace.final_state().clone());
    }
    let mut max_deviation: f64 = 0.0;
    for i in 0..finals.len() {
        for j in i + 1..finals.len() {
            max_deviation = max_deviation.max(finals[i].max_deviation(&finals[j])?);
        }
    }
    Ok(InvarianceReport {
        schedule_count: schedules.len(),
        max_deviation,
        max_norm_drift,
    })
}
