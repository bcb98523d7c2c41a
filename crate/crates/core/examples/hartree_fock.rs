//! Run the restricted Hartree-Fock solver on water and print the
//! mean-field summary.

use geomvqe::basis::shells_for_molecule;
use geomvqe::integrals::compute_ao_integrals;
use geomvqe::molecule::{nuclear_repulsion, Molecule};
use geomvqe::scf::{freeze_core, mo_transform, run_rhf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mol = Molecule::parse(
        "charge = 0\nbasis = sto-3g\nfrozen_core = true\nunit = angstrom\n\
         geometry:\n  O 0 0 0\n  H 0.79 0 0.61\n  H -0.79 0 0.61\n",
    )?;

    let shells = shells_for_molecule(&mol);
    println!("{} shells expand to an AO basis of size 7", shells.len());

    let ints = compute_ao_integrals(&mol, &shells);
    let scf = run_rhf(&mol, &ints)?;
    println!("converged in {} iterations", scf.iterations);
    println!("nuclear repulsion : {:>14.8} Ha", nuclear_repulsion(&mol));
    println!("total HF energy   : {:>14.8} Ha", scf.hf_energy);
    println!("orbital energies  :");
    for (i, e) in scf.orbital_energies.iter().enumerate() {
        let label = if i < mol.n_electrons() / 2 { "occupied" } else { "virtual " };
        println!("  {i}  {label}  {e:+.8} Ha");
    }

    // active-space reduction: the oxygen 1s pair is folded into a constant
    let mo = mo_transform(&scf, &ints)?;
    let asi = freeze_core(&mol, &mo, &scf)?;
    println!(
        "\nactive space: {} electrons in {} spatial orbitals ({} qubits)",
        asi.n_active_electrons,
        asi.n_active_orbitals,
        2 * asi.n_active_orbitals
    );
    println!("core energy  : {:>14.8} Ha", asi.core_energy);
    Ok(())
}
