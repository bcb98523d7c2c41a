//! The particle-conserving excitation gates, applied to small registers.

use geomvqe::statevector::{run_circuit, Circuit, Gate, GateKind, Statevector};

fn show(state: &Statevector, label: &str) {
    print!("{label}:");
    let n = state.n_qubits();
    for i in 0..state.amplitudes().len() {
        let a = state.amplitude(i);
        if a.norm() > 1e-12 {
            print!(" {:+.4}|{:0width$b}>", a.re, i, width = n);
        }
    }
    println!();
}

fn main() {
    // single excitation rotates the {|01>, |10>} block
    let mut s = Statevector::from_bitstring("10");
    s.apply_single_excitation(0.3, (0, 1));
    show(&s, "G(0.3)|10>");

    // double excitation rotates the {|1100>, |0011>} block
    let mut s = Statevector::from_bitstring("1100");
    s.apply_double_excitation(0.5, (0, 1, 2, 3));
    show(&s, "G2(0.5)|1100>");

    // two double excitations on a 6-qubit register prepare a three-term
    // superposition of the reference with two doubly-excited configurations
    let mut circuit = Circuit::hartree_fock(6, 2);
    circuit.gates.push(Gate {
        kind: GateKind::Double,
        qubits: vec![0, 1, 2, 3],
        angle_index: 0,
    });
    circuit.gates.push(Gate {
        kind: GateKind::Double,
        qubits: vec![0, 1, 4, 5],
        angle_index: 1,
    });
    let state = run_circuit(&circuit, &[0.2, 0.4]);
    show(&state, "two-gate state");
    println!("norm stays 1: {:.12}", state.norm());
}
