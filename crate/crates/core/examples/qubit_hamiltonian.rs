//! Build the 4-qubit hydrogen Hamiltonian, print its Pauli terms, and
//! compare the Hartree-Fock and exact ground-state energies.

use geomvqe::fci::ground_state;
use geomvqe::hamiltonian::{molecular_hamiltonian, hamiltonian_derivative};
use geomvqe::molecule::Molecule;
use geomvqe::pauli::PauliSum;
use geomvqe::statevector::Statevector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mol = Molecule::parse(
        "charge = 0\nunit = angstrom\ngeometry:\n  H 0 0 0\n  H 0 0 0.735\n",
    )?;

    let h = molecular_hamiltonian(&mol, mol.coordinates())?;
    println!("{} Pauli terms on {} qubits:", h.n_terms(), h.n_qubits());
    print!("{}", h.to_text());

    // round-trip through the text format
    let parsed = PauliSum::parse(&h.to_text(), h.n_qubits())?;
    assert_eq!(parsed.to_text(), h.to_text());

    let hf = Statevector::from_bitstring("1100");
    println!("\n<HF|H|HF>    = {:+.10} Ha", hf.expectation(&h)?);
    let (e0, _) = ground_state(&h, 2)?;
    println!("exact ground = {e0:+.10} Ha");

    // derivative observable along the bond axis
    let dh = hamiltonian_derivative(&mol, mol.coordinates(), 5, 0.01)?;
    println!(
        "\nd/dz_1 observable has {} terms; <HF|dH|HF> = {:+.6} Ha/Bohr",
        dh.n_terms(),
        hf.expectation(&dh)?
    );
    Ok(())
}
