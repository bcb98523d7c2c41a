use geomvqe::molecule::{geometry_params, Molecule};
use geomvqe::vqe::{adaptive_build, joint_optimize, OptimizerConfig};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "beh2".into());
    let iters: usize = std::env::args().nth(2).map(|s| s.parse().unwrap()).unwrap_or(2000);
    let a2b = geomvqe::ANGSTROM_TO_BOHR;
    let mol = if which == "beh2" {
        let d = 1.27 * a2b;
        Molecule::new(
            vec!["Be".parse().unwrap(), "H".parse().unwrap(), "H".parse().unwrap()],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, d, 0.0, 0.0, -d],
            0,
            true,
        ).unwrap()
    } else {
        let d = 1.07 * a2b;
        let half = (100.0f64).to_radians() / 2.0;
        Molecule::new(
            vec!["O".parse().unwrap(), "H".parse().unwrap(), "H".parse().unwrap()],
            vec![0.0, 0.0, 0.0, d * half.sin(), 0.0, d * half.cos(), -d * half.sin(), 0.0, d * half.cos()],
            0,
            true,
        ).unwrap()
    };
    let mut config = OptimizerConfig::default();
    config.max_iterations = iters;
    let build = adaptive_build(&mol, mol.coordinates(), &config).unwrap();
    eprintln!("gates: {}", build.n_gates());
    let traj = joint_optimize(&mol, mol.coordinates(), &build.circuit, &config).unwrap();
    for p in &traj.points {
        if p.iteration % 100 == 0 || p.iteration == traj.final_point().iteration {
            let geo = geometry_params(&mol.with_coordinates(&p.x).unwrap()).unwrap();
            eprintln!(
                "iter {:>5}: E={:.9} d={:.5} angle={:.3} gx={:.2e} gt={:.2e}",
                p.iteration, p.energy, geo.bond_length,
                geo.bond_angle.unwrap_or(0.0), p.max_grad_x, p.max_grad_theta
            );
        }
    }
    eprintln!("stop: {:?}", traj.stop);
}
