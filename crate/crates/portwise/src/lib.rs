//! Circuits over unordered label sets.
//!
//! `portwise` models Boolean and quantum circuits without any of the
//! ordering conveniences usual in circuit tools: input and output nodes form
//! plain finite sets, gates have unordered sets of input and output labels,
//! and the wiring is a single *provider function* from consumers (output
//! nodes, gate input ports) to producers (input nodes, gate output ports).
//! Everything order-like — amplitude layouts, truth-table rows, bit strings
//! on a command line — is derived from one storage convention, the canonical
//! byte order of labels, and never carries meaning of its own.
//!
//! What you can do with a circuit:
//!
//! * validate it ([`circuit::Circuit::validate`]) and check the stricter
//!   balanced / quantum disciplines ([`circuit::BooleanCircuit::check_balanced`],
//!   [`circuit::QuantumCircuit::check_quantum`]);
//! * evaluate Boolean circuits node by node ([`booleval::eval_nodes`]) or
//!   stage by stage ([`booleval::eval_stage`]);
//! * evolve quantum states stage by stage ([`quantumsim::state_at_stage`],
//!   [`quantumsim::simulate`]) and materialize whole-circuit operators
//!   ([`quantumsim::circuit_unitary`]);
//! * enumerate schedules ([`circuit::Circuit::coherent_enumerations`]) and
//!   confirm that the outcome never depends on the one chosen
//!   ([`quantumsim::check_schedule_invariance`]);
//! * cross-check all of the above against deliberately independent
//!   brute-force implementations ([`oracle`]).
//!
//! The `examples/` directory demonstrates each capability as a small
//! runnable program; the `portwise` binary exposes the same operations over
//! circuit document files (see [`format`]).
//!
//! ```
//! use portwise::{circuit::Circuit, gates, quantumsim, state::LabeledState};
//!
//! let circuit = Circuit::builder()
//!     .input("q")
//!     .output("q")
//!     .gate("h", gates::hadamard("a", "a"))
//!     .wire("h.a:in", "in:q")
//!     .wire("out:q", "h.a:out")
//!     .build()
//!     .unwrap();
//! let zero = LabeledState::all_zeros(circuit.inputs().clone()).unwrap();
//! let trace = quantumsim::simulate(&circuit, &zero, &Default::default()).unwrap();
//! assert!((trace.final_state().amplitudes()[0].re - 0.7071067811865476).abs() < 1e-12);
//! ```

pub mod booleval;
pub mod circuit;
pub mod format;
pub mod gate;
pub mod gates;
pub mod label;
pub mod matrix;
pub mod node;
pub mod oracle;
pub mod quantumsim;
pub mod stage;
pub mod state;

pub use circuit::{BooleanCircuit, Circuit, CircuitBuilder, QuantumCircuit};
pub use format::{parse_document, serialize_circuit, AnyCircuit, DocumentError};
pub use gate::{BooleanGateType, QuantumGateType};
pub use label::{canonical_order, BitAssignment, Label, LabelSet};
pub use matrix::CMatrix;
pub use node::{GateId, NodeRef};
pub use stage::{ExitSet, Stage};
pub use state::{inner_product, tensor_merge, LabeledState};
