//! Command-line front end: every subcommand reads a circuit document and
//! calls into the library. Exit codes: 0 success, 1 validation or check
//! failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use portwise::booleval;
use portwise::label::{canonical_order, BitAssignment};
use portwise::node::{GateId, NodeRef};
use portwise::oracle;
use portwise::quantumsim::{self, SimulateOptions, AMPLITUDE_TOLERANCE};
use portwise::stage::DEFAULT_ENUMERATION_CAP;
use portwise::state::LabeledState;
use portwise::{parse_document, serialize_circuit, AnyCircuit};

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "portwise",
    version,
    about = "Validate, evaluate, and simulate circuits over unordered label sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural validation plus the balance / quantum checks.
    Validate { file: PathBuf },
    /// Evaluate a Boolean circuit on one input.
    Eval {
        file: PathBuf,
        /// Input bits, one per input node in canonical label order.
        #[arg(long)]
        input: String,
    },
    /// Print the full truth table of a Boolean circuit.
    Table { file: PathBuf },
    /// Run a quantum circuit on a basis state and print amplitudes.
    Simulate {
        file: PathBuf,
        /// Input bits, one per input node in canonical label order.
        #[arg(long)]
        input: String,
        /// Comma-separated gate firing order; canonical order when omitted.
        #[arg(long)]
        schedule: Option<String>,
        /// Print the state after every firing, not only the final state.
        #[arg(long)]
        trace: bool,
    },
    /// Print the whole-circuit operator, row-major.
    Unitary { file: PathBuf },
    /// List the coherent gate enumerations (schedules).
    Schedules {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        limit: usize,
    },
    /// List every stage with its exit set.
    Stages { file: PathBuf },
    /// Cross-check the circuit against brute-force reference evaluators.
    Verify { file: PathBuf },
    /// Extend the provider function to a bijection and print the document.
    Complete { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Validate { file } => with_circuit(&file, cmd_validate),
        Command::Eval { file, input } => with_circuit(&file, |c| cmd_eval(c, &input)),
        Command::Table { file } => with_circuit(&file, cmd_table),
        Command::Simulate { file, input, schedule, trace } => {
            with_circuit(&file, |c| cmd_simulate(c, &input, schedule.as_deref(), trace))
        }
        Command::Unitary { file } => with_circuit(&file, cmd_unitary),
        Command::Schedules { file, limit } => with_circuit(&file, |c| cmd_schedules(c, limit)),
        Command::Stages { file } => with_circuit(&file, cmd_stages),
        Command::Verify { file } => with_circuit(&file, cmd_verify),
        Command::Complete { file } => with_circuit(&file, cmd_complete),
    }
}

fn with_circuit(path: &Path, command: impl FnOnce(&AnyCircuit) -> u8) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    match parse_document(&text) {
        Ok(circuit) => command(&circuit),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_validate(circuit: &AnyCircuit) -> u8 {
    println!("kind: {}", circuit.kind_name());
    println!("structure: ok");
    match circuit {
        AnyCircuit::Boolean(c) => {
            let report = c.check_balanced();
            if report.is_balanced() {
                println!(
                    "balanced: yes ({} = {} nodes, gate arities match)",
                    report.input_count(),
                    report.output_count()
                );
            } else {
                println!("balanced: no");
                for issue in report.issues() {
                    println!("  {issue}");
                }
            }
            EXIT_OK
        }
        AnyCircuit::Quantum(c) => {
            let report = c.check_quantum();
            if report.is_valid() {
                println!("quantum: ok");
                EXIT_OK
            } else {
                println!("quantum: invalid");
                for issue in report.issues() {
                    println!("  {issue}");
                }
                EXIT_FAILED
            }
        }
    }
}

fn cmd_eval(circuit: &AnyCircuit, input: &str) -> u8 {
    let Some(c) = circuit.as_boolean() else {
        eprintln!("error: eval requires a boolean circuit");
        return EXIT_USAGE;
    };
    let order = canonical_order(c.inputs());
    let bits = match BitAssignment::parse_bit_string(&order, input) {
        Ok(bits) => bits,
        Err(e) => {
            eprintln!("error: --input: {e}");
            return EXIT_USAGE;
        }
    };
    match booleval::eval_nodes(c, &bits) {
        Ok(valuation) => {
            let out = valuation.output_assignment(c);
            let out_order = canonical_order(c.outputs());
            println!("{}", out.bit_string(&out_order).expect("total on outputs"));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_table(circuit: &AnyCircuit) -> u8 {
    let Some(c) = circuit.as_boolean() else {
        eprintln!("error: table requires a boolean circuit");
        return EXIT_USAGE;
    };
    let in_order = canonical_order(c.inputs());
    let out_order = canonical_order(c.outputs());
    println!("# inputs: {}", join_labels(in_order.iter().map(|l| l.as_str())));
    println!("# outputs: {}", join_labels(out_order.iter().map(|l| l.as_str())));
    match booleval::computed_function(c) {
        Ok(table) => {
            for (input, output) in &table {
                println!(
                    "{} -> {}",
                    input.bit_string(&in_order).expect("total"),
                    output.bit_string(&out_order).expect("total")
                );
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_simulate(circuit: &AnyCircuit, input: &str, schedule: Option<&str>, trace: bool) -> u8 {
    let Some(c) = circuit.as_quantum() else {
        eprintln!("error: simulate requires a quantum circuit");
        return EXIT_USAGE;
    };
    let order = canonical_order(c.inputs());
    let bits = match BitAssignment::parse_bit_string(&order, input) {
        Ok(bits) => bits,
        Err(e) => {
            eprintln!("error: --input: {e}");
            return EXIT_USAGE;
        }
    };
    let state = match LabeledState::basis(c.inputs().clone(), &bits) {
        Ok(state) => state,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILED;
        }
    };
    let schedule = match schedule {
        None => None,
        Some(text) => {
            let mut gates = Vec::new();
            for name in text.split(',') {
                match GateId::new(name.trim()) {
                    Ok(id) => gates.push(id),
                    Err(e) => {
                        eprintln!("error: --schedule: {e}");
                        return EXIT_USAGE;
                    }
                }
            }
            Some(gates)
        }
    };
    let options = SimulateOptions { schedule, keep_intermediate: trace };
    match quantumsim::simulate(c, &state, &options) {
        Ok(run) => {
            if trace {
                for (step, state) in run.states().iter().enumerate() {
                    if step == 0 {
                        println!("-- stage 0: input");
                    } else {
                        println!("-- stage {step}: after {}", run.schedule()[step - 1]);
                    }
                    print_state(state);
                }
            } else {
                print_state(run.final_state());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_unitary(circuit: &AnyCircuit) -> u8 {
    let Some(c) = circuit.as_quantum() else {
        eprintln!("error: unitary requires a quantum circuit");
        return EXIT_USAGE;
    };
    match quantumsim::circuit_unitary(c, &c.full_stage()) {
        Ok(matrix) => {
            let exits = c.exits(&c.full_stage()).expect("full stage is owned");
            println!(
                "# columns: {}",
                join_labels(c.inputs().iter().map(|l| l.as_str()))
            );
            println!(
                "# rows: {}",
                join_labels(exits.state_labels().iter().map(rendered_label))
            );
            for r in 0..matrix.rows() {
                let row: Vec<String> =
                    (0..matrix.cols()).map(|cix| format_complex(matrix.get(r, cix))).collect();
                println!("{}", row.join(" "));
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_schedules(circuit: &AnyCircuit, limit: usize) -> u8 {
    let result = match circuit {
        AnyCircuit::Boolean(c) => c.enumerate_schedules(limit),
        AnyCircuit::Quantum(c) => c.enumerate_schedules(limit),
    };
    match result {
        Ok(schedules) => {
            for schedule in &schedules {
                println!("{}", join_labels(schedule.iter().map(|g| g.as_str())));
            }
            println!("total: {}", schedules.len());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_stages(circuit: &AnyCircuit) -> u8 {
    fn list<G: portwise::gate::GatePorts>(c: &portwise::Circuit<G>) -> Result<(), String> {
        let stages = c.all_stages(DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
        for stage in &stages {
            let exits = c.exits(stage).map_err(|e| e.to_string())?;
            let names: Vec<String> = stage.gates().iter().map(|g| g.to_string()).collect();
            let exit_names: Vec<String> = exits.iter().map(|n| n.to_string()).collect();
            println!("{{{}}} exits: {}", names.join(","), exit_names.join(" "));
        }
        Ok(())
    }
    let outcome = match circuit {
        AnyCircuit::Boolean(c) => list(c),
        AnyCircuit::Quantum(c) => list(c),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_verify(circuit: &AnyCircuit) -> u8 {
    match circuit {
        AnyCircuit::Boolean(c) => {
            let oracle_table = match oracle::brute_force_truth_table(c) {
                Ok(table) => table,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_FAILED;
                }
            };
            let main_table = match booleval::computed_function(c) {
                Ok(table) => table,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_FAILED;
                }
            };
            let matches = oracle_table == main_table;
            println!(
                "truth table: {} rows, fixpoint oracle vs node evaluation: {}",
                main_table.len(),
                if matches { "exact match" } else { "MISMATCH" }
            );
            if matches {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        AnyCircuit::Quantum(c) => {
            let mut ok = true;
            let dense = match oracle::brute_force_unitary(c) {
                Ok(op) => op,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_FAILED;
                }
            };
            let main = match quantumsim::circuit_unitary(c, &c.full_stage()) {
                Ok(matrix) => matrix,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_FAILED;
                }
            };
            match main.max_entry_distance(&dense.matrix) {
                Some(deviation) => {
                    let pass = deviation <= AMPLITUDE_TOLERANCE;
                    ok &= pass;
                    println!(
                        "operator: simulator vs matrix oracle, max entry deviation {deviation:.3e} (tolerance {AMPLITUDE_TOLERANCE:.0e}): {}",
                        if pass { "ok" } else { "FAILED" }
                    );
                }
                None => {
                    println!("operator: dimension mismatch between simulator and oracle: FAILED");
                    ok = false;
                }
            }
            let unit_dev = main.unitarity_deviation();
            let unit_pass = unit_dev <= portwise::gate::UNITARITY_TOLERANCE;
            ok &= unit_pass;
            println!(
                "operator: unitarity deviation {unit_dev:.3e} (tolerance {:.0e}): {}",
                portwise::gate::UNITARITY_TOLERANCE,
                if unit_pass { "ok" } else { "FAILED" }
            );
            if c.gate_count() <= oracle::MAX_INTERCHANGE_GATES {
                let zeros = LabeledState::all_zeros(c.inputs().clone()).expect("state fits");
                match oracle::exhaustive_schedule_check(c, &zeros) {
                    Ok(report) => {
                        let pass = report.passed();
                        ok &= pass;
                        println!(
                            "schedules: {} coherent enumerations, interchange chains up to {} swaps, max state deviation {:.3e}: {}",
                            report.schedule_count(),
                            report.max_chain_length(),
                            report.max_deviation(),
                            if pass { "ok" } else { "FAILED" }
                        );
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        ok = false;
                    }
                }
            } else {
                println!(
                    "schedules: skipped ({} gates exceed the interchange oracle's cap of {})",
                    c.gate_count(),
                    oracle::MAX_INTERCHANGE_GATES
                );
            }
            if ok {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
    }
}

fn cmd_complete(circuit: &AnyCircuit) -> u8 {
    let completed = match circuit {
        AnyCircuit::Boolean(c) => c.complete_outputs().map(AnyCircuit::Boolean),
        AnyCircuit::Quantum(c) => c.complete_outputs().map(AnyCircuit::Quantum),
    };
    match completed {
        Ok(circuit) => {
            print!("{}", serialize_circuit(&circuit));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

/// Renders a state: one header line with the factor labels in canonical
/// order, then one line per basis vector with its amplitude to 12 digits.
fn print_state(state: &LabeledState) {
    let labels = canonical_order(state.labels());
    println!("labels: {}", join_labels(labels.iter().map(rendered_label)));
    let n = labels.len();
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let bits: String =
            (0..n).map(|k| if (index >> (n - 1 - k)) & 1 == 1 { '1' } else { '0' }).collect();
        println!("{bits} {}", format_complex(*amp));
    }
}

/// Input-node port labels print as the bare input label; everything else
/// prints as stored.
fn rendered_label(label: &portwise::Label) -> &str {
    match NodeRef::parse_port_label(label.as_str()) {
        Some(NodeRef::InputNode(_)) => &label.as_str()[3..],
        _ => label.as_str(),
    }
}

fn join_labels<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    parts.collect::<Vec<_>>().join(" ")
}

/// `a+bi` with 12 digits after the point; negative zeros are normalized.
fn format_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{re:.12}-{:.12}i", -im)
    } else {
        format!("{re:.12}+{im:.12}i")
    }
}
