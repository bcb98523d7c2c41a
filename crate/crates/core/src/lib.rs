//! Molecular geometry optimization with a simulated variational quantum circuit.
//!
//! The electronic Hamiltonian of a small molecule is treated as a parametrized
//! observable `H(x)` whose parameters `x` are the nuclear coordinates. A trial
//! state `|Ψ(θ)⟩`, prepared by particle-conserving excitation gates acting on
//! the Hartree-Fock reference, defines the cost `g(θ, x) = ⟨Ψ(θ)|H(x)|Ψ(θ)⟩`.
//! Minimizing `g` jointly over `θ` and `x` by gradient descent yields both the
//! correlated ground state and the equilibrium geometry in a single loop, with
//! no nested circuit re-optimization per geometry.
//!
//! The pipeline is self-contained: STO-3G Gaussian integrals, restricted
//! Hartree-Fock, Jordan-Wigner mapping to a Pauli-string observable, a dense
//! statevector simulator with single/double excitation gates, parameter-shift
//! circuit gradients, finite-difference nuclear gradient observables, and an
//! exact-diagonalization (FCI) reference for validation.
//!
//! Supported systems are closed-shell singlets built from H, Be and O in the
//! STO-3G basis — up to 12 qubits (H₂, H₃⁺, BeH₂, H₂O and the like).
//!
//! # Quick start
//!
//! ```
//! use geomvqe::molecule::Molecule;
//! use geomvqe::vqe::{adaptive_build, joint_optimize, OptimizerConfig};
//!
//! // H2 stretched 10% past equilibrium, coordinates in Bohr.
//! let mol = Molecule::new(
//!     vec!["H".parse().unwrap(), "H".parse().unwrap()],
//!     vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.53],
//!     0,
//!     false,
//! ).unwrap();
//!
//! let config = OptimizerConfig::default();
//! let build = adaptive_build(&mol, mol.coordinates(), &config).unwrap();
//! let traj = joint_optimize(&mol, mol.coordinates(), &build.circuit, &config).unwrap();
//! let d = traj.final_geometry.as_ref().unwrap().bond_length;
//! assert!((d - 0.735).abs() < 1e-3);
//! ```
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod basis;
pub mod fci;
pub mod fermion;
pub mod hamiltonian;
pub mod integrals;
mod linalg;
pub mod molecule;
pub mod pauli;
pub mod scf;
mod sector;
pub mod statevector;
pub mod vqe;

/// Length conversion used at every I/O boundary. Internally everything is
/// Bohr and Hartree.
pub const ANGSTROM_TO_BOHR: f64 = 1.8897259886;

/// 1 kcal/mol in Hartree; the usual "chemical accuracy" yardstick.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input file or geometry text.
    #[error("input error: {0}")]
    Input(String),
    /// Element outside the supported set (H, Be, O).
    #[error("unsupported element: {0}")]
    UnsupportedElement(String),
    /// A domain precondition was violated.
    #[error("{0}")]
    Invalid(String),
    /// The self-consistent field loop hit its iteration cap.
    #[error("SCF did not converge within {iterations} iterations")]
    ScfNotConverged { iterations: usize },
    /// Orbital matching between displaced geometries broke down.
    #[error(
        "orbital matching failed for coordinate {coordinate}: smallest overlap {overlap:.4} < 0.9"
    )]
    OrbitalMatching { coordinate: usize, overlap: f64 },
    /// An observable that should be real came out with imaginary weight.
    #[error("internal consistency: residual imaginary magnitude {0:.3e}")]
    ResidualImaginary(f64),
    /// Requested particle-number sector contains no basis states.
    #[error("empty particle-number sector")]
    EmptySector,
}

pub type Result<T> = std::result::Result<T, Error>;
