//! Full pipeline from nuclear coordinates to the qubit observable `H(x)`
//! and its finite-difference derivatives `∂H/∂x_i`.

use crate::basis::{ao_basis, Cgto};
use crate::fermion::{build_fermionic_hamiltonian, jordan_wigner};
use crate::integrals::{compute_ao_integrals_cgtos, overlap_between, AoIntegrals};
use crate::molecule::Molecule;
use crate::pauli::{PauliSum, PRUNE_THRESHOLD};
use crate::scf::{
    align_to_reference, freeze_core, mo_transform_unchecked, run_rhf, ScfResult,
};
use crate::{Error, Result};

/// Default finite-difference step (Bohr) for the Hamiltonian derivative.
pub const DEFAULT_FD_DELTA: f64 = 0.01;

/// Matched-orbital overlaps below this abort the derivative.
const MATCHING_TOLERANCE: f64 = 0.9;

/// A molecule pinned at one geometry with its converged mean field, ready
/// to produce the observable and its derivatives. Building the derivative
/// for coordinate `i` runs two full displaced pipelines whose orbitals are
/// matched back to this reference.
pub struct GeometryContext {
    molecule: Molecule,
    aos: Vec<Cgto>,
    ao_ints: AoIntegrals,
    scf: ScfResult,
}

impl GeometryContext {
    pub fn new(molecule: &Molecule, x: &[f64]) -> Result<Self> {
        let molecule = molecule.with_coordinates(x)?;
        let aos = ao_basis(&molecule);
        let ao_ints = compute_ao_integrals_cgtos(&molecule, &aos);
        let scf = run_rhf(&molecule, &ao_ints)?;
        if !scf.converged {
            return Err(Error::ScfNotConverged {
                iterations: scf.iterations,
            });
        }
        Ok(GeometryContext {
            molecule,
            aos,
            ao_ints,
            scf,
        })
    }

    pub fn molecule(&self) -> &Molecule {
        &self.molecule
    }

    pub fn scf(&self) -> &ScfResult {
        &self.scf
    }

    pub fn n_qubits(&self) -> usize {
        2 * (self.ao_ints.n_basis() - self.molecule.n_core_orbitals())
    }

    pub fn n_active_electrons(&self) -> usize {
        self.molecule.n_electrons() - 2 * self.molecule.n_core_orbitals()
    }

    /// The qubit Hamiltonian at this geometry. The identity coefficient
    /// carries nuclear repulsion plus any frozen-core energy, so
    /// expectation values are total energies.
    pub fn hamiltonian(&self) -> Result<PauliSum> {
        let mo = mo_transform_unchecked(&self.scf.mo_coefficients, &self.ao_ints);
        let asi = freeze_core(&self.molecule, &mo, &self.scf)?;
        let fermionic = build_fermionic_hamiltonian(&asi);
        jordan_wigner(&fermionic, 2 * asi.n_active_orbitals)
    }

    /// Displaced-geometry Hamiltonian with orbitals matched to the
    /// reference. Returns the observable and the smallest matched overlap.
    fn aligned_hamiltonian(&self, x: &[f64]) -> Result<(PauliSum, f64)> {
        let mol = self.molecule.with_coordinates(x)?;
        let aos = ao_basis(&mol);
        let ints = compute_ao_integrals_cgtos(&mol, &aos);
        let mut scf = run_rhf(&mol, &ints)?;
        if !scf.converged {
            return Err(Error::ScfNotConverged {
                iterations: scf.iterations,
            });
        }
        let cross = overlap_between(&self.aos, &aos);
        let min_overlap =
            align_to_reference(&mut scf, &self.scf, &cross, mol.n_electrons() / 2);
        let mo = mo_transform_unchecked(&scf.mo_coefficients, &ints);
        let asi = freeze_core(&mol, &mo, &scf)?;
        let fermionic = build_fermionic_hamiltonian(&asi);
        Ok((
            jordan_wigner(&fermionic, 2 * asi.n_active_orbitals)?,
            min_overlap,
        ))
    }

    /// Central-difference derivative observable
    /// `(H(x + Δ e_i) - H(x - Δ e_i)) / (2Δ)` over the union of Pauli
    /// strings of the displaced Hamiltonians.
    pub fn derivative(&self, coordinate: usize, delta: f64) -> Result<PauliSum> {
        let x = self.molecule.coordinates();
        if coordinate >= x.len() {
            return Err(Error::Invalid(format!(
                "coordinate index {coordinate} out of range (3M = {})",
                x.len()
            )));
        }
        if delta <= 0.0 {
            return Err(Error::Invalid("finite-difference step must be positive".into()));
        }
        let mut plus = x.to_vec();
        plus[coordinate] += delta;
        let mut minus = x.to_vec();
        minus[coordinate] -= delta;

        let (h_plus, ov_p) = self.aligned_hamiltonian(&plus)?;
        let (h_minus, ov_m) = self.aligned_hamiltonian(&minus)?;
        let worst = ov_p.min(ov_m);
        if worst < MATCHING_TOLERANCE {
            return Err(Error::OrbitalMatching {
                coordinate,
                overlap: worst,
            });
        }

        let mut diff = h_plus.sub(&h_minus);
        diff.scale(1.0 / (2.0 * delta));
        diff.prune(PRUNE_THRESHOLD);
        Ok(diff)
    }
}

/// Build `H(x)`: AO integrals, RHF, MO transform, frozen core, fermionic
/// expansion and Jordan-Wigner, in one call.
pub fn molecular_hamiltonian(molecule: &Molecule, x: &[f64]) -> Result<PauliSum> {
    GeometryContext::new(molecule, x)?.hamiltonian()
}

/// Derivative observable `∂H/∂x_i` by central differences (step in Bohr).
pub fn hamiltonian_derivative(
    molecule: &Molecule,
    x: &[f64],
    coordinate: usize,
    delta: f64,
) -> Result<PauliSum> {
    GeometryContext::new(molecule, x)?.derivative(coordinate, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::Element;
    use crate::pauli::PauliString;
    use crate::statevector::Statevector;
    use approx::assert_abs_diff_eq;

    fn h2(d: f64) -> Molecule {
        Molecule::new(
            vec![Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, d],
            0,
            false,
        )
        .unwrap()
    }

    #[test]
    fn h2_string_count_and_hf_expectation() {
        let mol = h2(1.388948601621);
        let ctx = GeometryContext::new(&mol, mol.coordinates()).unwrap();
        let h = ctx.hamiltonian().unwrap();
        assert_eq!(h.n_qubits(), 4);
        assert_eq!(h.n_terms(), 15);

        let hf = Statevector::from_bitstring("1100");
        let e = hf.expectation(&h).unwrap();
        assert_abs_diff_eq!(e, ctx.scf().hf_energy, epsilon = 1e-8);
    }

    #[test]
    fn h3p_hf_expectation() {
        let s = 1.86;
        let mol = Molecule::new(
            vec![Element::H; 3],
            vec![0.0, 0.0, 0.0, s, 0.0, 0.0, s / 2.0, s * 3f64.sqrt() / 2.0, 0.0],
            1,
            false,
        )
        .unwrap();
        let ctx = GeometryContext::new(&mol, mol.coordinates()).unwrap();
        let h = ctx.hamiltonian().unwrap();
        assert_eq!(h.n_qubits(), 6);
        let hf = Statevector::from_bitstring("110000");
        assert_abs_diff_eq!(
            hf.expectation(&h).unwrap(),
            ctx.scf().hf_energy,
            epsilon = 1e-8
        );
    }

    #[test]
    fn derivative_identity_term_matches_scalar_difference() {
        let mol = h2(1.4);
        let ctx = GeometryContext::new(&mol, mol.coordinates()).unwrap();
        let delta = 0.01;
        let d = ctx.derivative(5, delta).unwrap();

        let mut plus = mol.coordinates().to_vec();
        plus[5] += delta;
        let mut minus = mol.coordinates().to_vec();
        minus[5] -= delta;
        let hp = molecular_hamiltonian(&mol, &plus).unwrap();
        let hm = molecular_hamiltonian(&mol, &minus).unwrap();
        let id = PauliString::identity();
        let expect = (hp.coefficient(&id) - hm.coefficient(&id)) / (2.0 * delta);
        assert_abs_diff_eq!(d.coefficient(&id), expect, epsilon = 1e-12);
    }

    #[test]
    fn derivative_index_out_of_range() {
        let mol = h2(1.4);
        let ctx = GeometryContext::new(&mol, mol.coordinates()).unwrap();
        assert!(ctx.derivative(6, 0.01).is_err());
    }
}
