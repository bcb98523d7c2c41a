//! Adaptive circuit construction and joint optimization for the
//! trihydrogen cation, printing the per-iteration convergence table.

use geomvqe::fci::{fci_geometry_optimize, ground_state};
use geomvqe::hamiltonian::molecular_hamiltonian;
use geomvqe::molecule::{geometry_params, Molecule};
use geomvqe::vqe::{adaptive_build, joint_optimize, OptimizerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // equilateral start, side 1.05 A (about 6.5% stretched)
    let side = 1.05 * geomvqe::ANGSTROM_TO_BOHR;
    let mol = Molecule::new(
        vec!["H".parse()?, "H".parse()?, "H".parse()?],
        vec![
            0.0, 0.0, 0.0,
            side, 0.0, 0.0,
            side / 2.0, side * 3f64.sqrt() / 2.0, 0.0,
        ],
        1,
        false,
    )?;
    let config = OptimizerConfig::default();

    let build = adaptive_build(&mol, mol.coordinates(), &config)?;
    println!(
        "kept {} double(s) of {}, {} single(s) of {}:",
        build.kept_doubles.len(),
        build.n_doubles_enumerated,
        build.kept_singles.len(),
        build.n_singles_enumerated,
    );
    for g in &build.circuit.gates {
        println!("  gate on qubits {:?}", g.qubits);
    }

    let traj = joint_optimize(&mol, mol.coordinates(), &build.circuit, &config)?;
    println!("\niter      E (Ha)          d (A)      max|dE/dx|");
    for p in &traj.points {
        let geo = geometry_params(&mol.with_coordinates(&p.x)?).unwrap();
        if p.iteration % 4 == 0 || p.iteration == traj.final_point().iteration {
            println!(
                "{:>4}  {:>14.9}  {:>9.5}  {:.3e}",
                p.iteration, p.energy, geo.bond_length, p.max_grad_x
            );
        }
    }

    let last = traj.final_point();
    let geo = geometry_params(&mol.with_coordinates(&last.x)?).unwrap();
    println!(
        "\nfinal: d = {:.4} A, angle = {:.2} deg, E = {:.9} Ha",
        geo.bond_length,
        geo.bond_angle.unwrap(),
        last.energy
    );

    // exact references at the optimized geometry and from a full exact run
    let h = molecular_hamiltonian(&mol, &last.x)?;
    let (e_exact, _) = ground_state(&h, 2)?;
    println!("exact ground energy at final geometry: {:.9} Ha", e_exact);

    let fci_traj = fci_geometry_optimize(&mol, mol.coordinates(), &config)?;
    let fci_geo = fci_traj.final_geometry.as_ref().unwrap();
    println!(
        "exact-diagonalization optimization: d = {:.4} A, E = {:.9} Ha",
        fci_geo.bond_length,
        fci_traj.final_point().energy
    );
    Ok(())
}
