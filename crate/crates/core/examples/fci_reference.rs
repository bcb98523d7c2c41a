//! Exact-diagonalization reference: sector ground states and an exact
//! geometry optimization for H2.

use geomvqe::fci::{fci_geometry_optimize, ground_state, ground_state_full, SectorBasis};
use geomvqe::hamiltonian::molecular_hamiltonian;
use geomvqe::molecule::Molecule;
use geomvqe::vqe::OptimizerConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mol = Molecule::parse(
        "charge = 0\nunit = angstrom\ngeometry:\n  H 0 0 0\n  H 0 0 0.80\n",
    )?;

    let basis = SectorBasis::new(4, 2)?;
    println!(
        "two electrons on four qubits span a {}-state sector",
        basis.dimension()
    );

    let h = molecular_hamiltonian(&mol, mol.coordinates())?;
    let (e_sector, _) = ground_state(&h, 2)?;
    let (e_full, _) = ground_state_full(&h)?;
    println!("sector ground energy : {e_sector:.12} Ha");
    println!("full-space cross-check: {e_full:.12} Ha");

    let traj = fci_geometry_optimize(&mol, mol.coordinates(), &OptimizerConfig::default())?;
    let geo = traj.final_geometry.as_ref().unwrap();
    println!(
        "\nexact geometry optimization: {} iterations, d = {:.4} A, E = {:.9} Ha",
        traj.final_point().iteration,
        geo.bond_length,
        traj.final_point().energy
    );
    Ok(())
}
