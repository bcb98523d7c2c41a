//! Joint optimization of the H2 circuit parameter and bond length,
//! starting from a 10% stretched geometry.

use geomvqe::molecule::{geometry_params, Molecule};
use geomvqe::vqe::{adaptive_build, joint_optimize, OptimizerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mol = Molecule::parse(
        "charge = 0\nbasis = sto-3g\nunit = angstrom\ngeometry:\n  H 0 0 0\n  H 0 0 0.81\n",
    )?;
    let config = OptimizerConfig::default();

    let build = adaptive_build(&mol, mol.coordinates(), &config)?;
    println!(
        "adaptive selection: {} of {} doubles, {} of {} singles",
        build.kept_doubles.len(),
        build.n_doubles_enumerated,
        build.kept_singles.len(),
        build.n_singles_enumerated,
    );

    let traj = joint_optimize(&mol, mol.coordinates(), &build.circuit, &config)?;
    for p in traj.points.iter().step_by(5) {
        println!(
            "iter {:>3}  E = {:>14.9} Ha   max|dE/dx| = {:.3e}",
            p.iteration, p.energy, p.max_grad_x
        );
    }
    let last = traj.final_point();
    let geo = geometry_params(&mol.with_coordinates(&last.x)?).unwrap();
    println!(
        "\nconverged: {} after {} iterations",
        traj.converged(),
        last.iteration
    );
    println!("final energy  : {:.9} Ha", last.energy);
    println!("bond length   : {:.4} A", geo.bond_length);
    println!("circuit       :\n{}", build.circuit.to_text(&last.theta));
    Ok(())
}
