//! Gradient screening for the trihydrogen cation: eight candidate
//! excitations collapse to two double-excitation gates.

use geomvqe::molecule::Molecule;
use geomvqe::vqe::{adaptive_build, generate_excitations, OptimizerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let side = 0.99 * geomvqe::ANGSTROM_TO_BOHR;
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

    let (singles, doubles) = generate_excitations(2, 6);
    println!("candidates: {} singles, {} doubles", singles.len(), doubles.len());
    for d in &doubles {
        println!("  double {:?} -> {:?}", d.occupied, d.virtuals);
    }

    let build = adaptive_build(&mol, mol.coordinates(), &OptimizerConfig::default())?;
    println!("\nscreening gradients at theta = 0 (Ha):");
    for (d, g) in doubles.iter().zip(&build.double_gradients) {
        let kept = if g.abs() > 1e-5 { "kept" } else { "dropped" };
        println!("  double {:?} -> {:?}: {g:+.6e}  {kept}", d.occupied, d.virtuals);
    }
    for (s, g) in singles.iter().zip(&build.single_gradients) {
        let kept = if g.abs() > 1e-5 { "kept" } else { "dropped" };
        println!("  single {:?} -> {:?}: {g:+.6e}  {kept}", s.occupied, s.virtuals);
    }
    println!("\nfinal circuit has {} gates:", build.n_gates());
    print!("{}", build.circuit.to_text(&vec![0.0; build.n_gates()]));
    Ok(())
}
