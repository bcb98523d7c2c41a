//! Command-line front end: parse an input file, run the requested stage of
//! the pipeline, and write the result files.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use geomvqe::fci::{fci_geometry_optimize, ground_state};
use geomvqe::hamiltonian::molecular_hamiltonian;
use geomvqe::integrals::compute_ao_integrals;
use geomvqe::basis::shells_for_molecule;
use geomvqe::molecule::{geometry_params, Molecule};
use geomvqe::scf::run_rhf;
use geomvqe::statevector::Circuit;
use geomvqe::vqe::{adaptive_build, joint_optimize, OptimizerConfig, StopReason, Trajectory};
use geomvqe::{Error, CHEMICAL_ACCURACY};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "geomvqe",
    version,
    about = "Molecular geometry optimization with a simulated variational quantum circuit",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Cap the number of worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Output directory for generated files.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Dump the qubit Hamiltonian at the input geometry to <out>/hamiltonian.txt.
    #[arg(long, global = true)]
    dump_hamiltonian: bool,

    /// Dump S/T/V/ERI integral tensors to <out>/integrals.txt.
    #[arg(long, global = true)]
    dump_integrals: bool,
}

#[derive(Args, Clone)]
struct OptimizerFlags {
    /// Gradient-descent step for circuit angles (dimensionless).
    #[arg(long, value_name = "STEP", default_value_t = 0.4)]
    step_theta: f64,

    /// Gradient-descent step for coordinates (Bohr per (Ha/Bohr)).
    #[arg(long, value_name = "STEP", default_value_t = 0.5)]
    step_x: f64,

    /// Convergence threshold on max |dE/dx_i| (Ha/Bohr).
    #[arg(long, value_name = "TOL", default_value_t = 1e-5)]
    tol_grad_x: f64,

    /// Iteration cap for the joint optimization.
    #[arg(long, value_name = "N", default_value_t = 500)]
    max_iter: usize,

    /// Central-difference step for dH/dx observables (Bohr).
    #[arg(long, value_name = "DELTA", default_value_t = 0.01)]
    fd_delta: f64,

    /// Gradient cutoff for adaptive gate selection (Ha).
    #[arg(long, value_name = "TOL", default_value_t = 1e-5)]
    adaptive_threshold: f64,
}

impl OptimizerFlags {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            step_theta: self.step_theta,
            step_x: self.step_x,
            grad_tolerance_x: self.tol_grad_x,
            max_iterations: self.max_iter,
            fd_delta: self.fd_delta,
            adaptive_grad_threshold: self.adaptive_threshold,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Self-consistent-field summary: total energy and orbital energies.
    Hf { input: PathBuf },

    /// Print the qubit Hamiltonian, one Pauli term per line.
    Hamiltonian {
        input: PathBuf,
        #[command(flatten)]
        flags: OptimizerFlags,
    },

    /// Adaptive gate selection report (counts before/after, gate list).
    Adaptive {
        input: PathBuf,
        #[command(flatten)]
        flags: OptimizerFlags,
    },

    /// Build the circuit adaptively, then jointly optimize angles and
    /// geometry. Writes trajectory.csv, final.xyz, circuit.txt, summary.txt.
    Optimize {
        input: PathBuf,
        #[command(flatten)]
        flags: OptimizerFlags,

        /// Also report the exact-diagonalization energy at the final
        /// geometry.
        #[arg(long)]
        with_fci: bool,

        /// Pre-optimize the geometry at the mean-field level (empty
        /// circuit) before the correlated run.
        #[arg(long)]
        hf_preopt: bool,
    },

    /// Exact-diagonalization reference energy, or a full geometry
    /// optimization in the exact ground state.
    Fci {
        input: PathBuf,
        #[command(flatten)]
        flags: OptimizerFlags,

        /// Optimize the geometry instead of a single-point energy.
        #[arg(long)]
        optimize_geometry: bool,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("error: could not configure {n} worker threads");
            return 1;
        }
    }
    match run(&cli) {
        Ok(()) => 0,
        Err(RunError::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Input(_) | Error::UnsupportedElement(_) | Error::Invalid(_) => 2,
                Error::ScfNotConverged { .. } => 3,
                _ => 2,
            }
        }
        Err(RunError::NotConverged(msg)) => {
            eprintln!("error: {msg}");
            4
        }
        Err(RunError::ScfAborted(msg)) => {
            eprintln!("error: {msg}");
            3
        }
        Err(RunError::Io(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

enum RunError {
    Lib(Error),
    NotConverged(String),
    ScfAborted(String),
    Io(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Lib(e)
    }
}

fn read_molecule(path: &Path) -> Result<Molecule, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Ok(Molecule::parse(&text)?)
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), RunError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn maybe_dumps(cli: &Cli, mol: &Molecule, fd_delta: f64) -> Result<(), RunError> {
    let _ = fd_delta;
    if cli.dump_integrals {
        let ints = compute_ao_integrals(mol, &shells_for_molecule(mol));
        let mut text = String::new();
        for (name, m) in [
            ("overlap", &ints.overlap),
            ("kinetic", &ints.kinetic),
            ("nuclear_attraction", &ints.nuclear_attraction),
        ] {
            let _ = writeln!(text, "{name}");
            for i in 0..m.nrows() {
                let row: Vec<String> =
                    (0..m.ncols()).map(|j| format!("{:+.12e}", m[(i, j)])).collect();
                let _ = writeln!(text, "  {}", row.join(" "));
            }
        }
        let n = ints.n_basis();
        let _ = writeln!(text, "eri (chemist ij|kl)");
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = ints.eri.get(i, j, k, l);
                        if v.abs() > 1e-12 {
                            let _ = writeln!(text, "  {i} {j} {k} {l} {v:+.12e}");
                        }
                    }
                }
            }
        }
        write_file(&cli.out, "integrals.txt", &text)?;
    }
    if cli.dump_hamiltonian {
        let h = molecular_hamiltonian(mol, mol.coordinates())?;
        write_file(&cli.out, "hamiltonian.txt", &h.to_text())?;
    }
    Ok(())
}

fn geometry_block(mol: &Molecule, x: &[f64]) -> String {
    let mut out = String::new();
    match mol.with_coordinates(x).ok().and_then(|m| geometry_params(&m)) {
        Some(geo) => {
            let _ = writeln!(out, "bond length d  : {:.6} A", geo.bond_length);
            if let Some(angle) = geo.bond_angle {
                let _ = writeln!(out, "bond angle phi : {:.4} deg", angle);
            }
        }
        None => {
            let _ = writeln!(out, "coordinates (Bohr): {x:?}");
        }
    }
    out
}

fn trajectory_outputs(
    cli: &Cli,
    mol: &Molecule,
    traj: &Trajectory,
    circuit: Option<&Circuit>,
    extra_summary: &str,
) -> Result<(), RunError> {
    let last = traj.final_point();
    write_file(&cli.out, "trajectory.csv", &traj.to_csv())?;
    let final_mol = mol.with_coordinates(&last.x)?;
    let comment = format!("E = {:.12} Ha", last.energy);
    write_file(&cli.out, "final.xyz", &final_mol.to_xyz(&comment))?;
    if let Some(c) = circuit {
        write_file(&cli.out, "circuit.txt", &c.to_text(&last.theta))?;
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "final energy   : {:.12} Ha", last.energy);
    summary.push_str(&geometry_block(mol, &last.x));
    let _ = writeln!(summary, "iterations     : {}", last.iteration);
    let _ = writeln!(
        summary,
        "stop           : {}",
        match &traj.stop {
            StopReason::Converged => "converged".to_string(),
            StopReason::MaxIterations => "max iterations reached".to_string(),
            StopReason::Aborted(m) => format!("aborted ({m})"),
        }
    );
    let _ = writeln!(summary, "max |dE/dx|    : {:.3e} Ha/Bohr", last.max_grad_x);
    summary.push_str(extra_summary);
    write_file(&cli.out, "summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}

fn finish(traj: &Trajectory) -> Result<(), RunError> {
    match &traj.stop {
        StopReason::Converged => Ok(()),
        StopReason::MaxIterations => Err(RunError::NotConverged(
            "optimizer hit the iteration cap before reaching the gradient tolerance".into(),
        )),
        StopReason::Aborted(m) => Err(RunError::ScfAborted(format!("optimization aborted: {m}"))),
    }
}

fn run(cli: &Cli) -> Result<(), RunError> {
    match &cli.command {
        Command::Hf { input } => {
            let mol = read_molecule(input)?;
            maybe_dumps(cli, &mol, 0.01)?;
            let ints = compute_ao_integrals(&mol, &shells_for_molecule(&mol));
            let scf = run_rhf(&mol, &ints)?;
            if !scf.converged {
                return Err(RunError::Lib(Error::ScfNotConverged {
                    iterations: scf.iterations,
                }));
            }
            println!("SCF converged in {} iterations", scf.iterations);
            println!("total energy    : {:.12} Ha", scf.hf_energy);
            println!(
                "nuclear repulsion: {:.12} Ha",
                geomvqe::molecule::nuclear_repulsion(&mol)
            );
            println!("orbital energies (Ha):");
            let nocc = mol.n_electrons() / 2;
            for (i, e) in scf.orbital_energies.iter().enumerate() {
                let occ = if i < nocc { "occ " } else { "virt" };
                println!("  {i:>2} {occ} {e:+.10}");
            }
            Ok(())
        }

        Command::Hamiltonian { input, flags } => {
            let mol = read_molecule(input)?;
            flags.config().validate()?;
            maybe_dumps(cli, &mol, flags.fd_delta)?;
            let h = molecular_hamiltonian(&mol, mol.coordinates())?;
            if cli.out == Path::new(".") {
                print!("{}", h.to_text());
            } else {
                write_file(&cli.out, "hamiltonian.txt", &h.to_text())?;
                println!(
                    "wrote {} Pauli terms on {} qubits to {}",
                    h.n_terms(),
                    h.n_qubits(),
                    cli.out.join("hamiltonian.txt").display()
                );
            }
            Ok(())
        }

        Command::Adaptive { input, flags } => {
            let mol = read_molecule(input)?;
            let config = flags.config();
            maybe_dumps(cli, &mol, config.fd_delta)?;
            let build = adaptive_build(&mol, mol.coordinates(), &config)?;
            println!(
                "excitations: {} doubles + {} singles = {}",
                build.n_doubles_enumerated,
                build.n_singles_enumerated,
                build.n_doubles_enumerated + build.n_singles_enumerated
            );
            println!(
                "selected   : {} doubles + {} singles = {}",
                build.kept_doubles.len(),
                build.kept_singles.len(),
                build.n_gates()
            );
            for g in &build.circuit.gates {
                let kind = match g.kind {
                    geomvqe::statevector::GateKind::Single => "single",
                    geomvqe::statevector::GateKind::Double => "double",
                };
                println!("  {kind} on qubits {:?}", g.qubits);
            }
            Ok(())
        }

        Command::Optimize {
            input,
            flags,
            with_fci,
            hf_preopt,
        } => {
            let mol = read_molecule(input)?;
            let config = flags.config();
            maybe_dumps(cli, &mol, config.fd_delta)?;

            let mut x0 = mol.coordinates().to_vec();
            if *hf_preopt {
                let ctx = geomvqe::hamiltonian::GeometryContext::new(&mol, &x0)?;
                let hf_circuit = Circuit::hartree_fock(ctx.n_qubits(), ctx.n_active_electrons());
                drop(ctx);
                let pre = joint_optimize(&mol, &x0, &hf_circuit, &config)?;
                x0 = pre.final_point().x.clone();
                println!(
                    "mean-field pre-optimization: {} iterations, E = {:.10} Ha",
                    pre.final_point().iteration,
                    pre.final_point().energy
                );
            }

            let build = adaptive_build(&mol, &x0, &config)?;
            println!(
                "adaptive circuit: {} gates ({} doubles + {} singles) of {} candidates",
                build.n_gates(),
                build.kept_doubles.len(),
                build.kept_singles.len(),
                build.n_doubles_enumerated + build.n_singles_enumerated
            );
            let traj = joint_optimize(&mol, &x0, &build.circuit, &config)?;

            let mut extra = String::new();
            if *with_fci {
                let last = traj.final_point();
                let h = molecular_hamiltonian(&mol, &last.x)?;
                let ctx_electrons =
                    mol.n_electrons() - 2 * mol.n_core_orbitals();
                let (e_fci, _) = ground_state(&h, ctx_electrons)?;
                let gap = last.energy - e_fci;
                let _ = writeln!(extra, "E_FCI at final geometry: {e_fci:.12} Ha");
                let _ = writeln!(
                    extra,
                    "E_VQE - E_FCI  : {:.3e} Ha ({} chemical accuracy of {CHEMICAL_ACCURACY:.1e})",
                    gap,
                    if gap.abs() <= CHEMICAL_ACCURACY {
                        "within"
                    } else {
                        "OUTSIDE"
                    }
                );
            }
            trajectory_outputs(cli, &mol, &traj, Some(&build.circuit), &extra)?;
            finish(&traj)
        }

        Command::Fci {
            input,
            flags,
            optimize_geometry,
        } => {
            let mol = read_molecule(input)?;
            let config = flags.config();
            maybe_dumps(cli, &mol, config.fd_delta)?;
            if *optimize_geometry {
                let traj = fci_geometry_optimize(&mol, mol.coordinates(), &config)?;
                trajectory_outputs(cli, &mol, &traj, None, "")?;
                finish(&traj)
            } else {
                let h = molecular_hamiltonian(&mol, mol.coordinates())?;
                let n_active = mol.n_electrons() - 2 * mol.n_core_orbitals();
                let (e, _) = ground_state(&h, n_active)?;
                println!("FCI ground-state energy: {e:.12} Ha");
                print!("{}", geometry_block(&mol, mol.coordinates()));
                Ok(())
            }
        }
    }
}
