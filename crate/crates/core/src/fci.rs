//! Exact-diagonalization reference: sector-resolved ground states, exact
//! geometry optimization, and the dense matrix oracles behind the tests.

use crate::fermion::FermionOperator;
use crate::molecule::Molecule;
use crate::pauli::PauliSum;
use crate::sector::SectorSpace;
use crate::statevector::Statevector;
use crate::vqe::{gradient_descent, EnergyModel, Evaluation, OptimizerConfig, Trajectory};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Basis bitstrings of the (N_e, Sz = 0) sector, sorted ascending in the
/// qubit-0-most-significant integer encoding.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub n_qubits: usize,
    pub bitstrings: Vec<u32>,
}

impl SectorBasis {
    pub fn new(n_qubits: usize, n_electrons: usize) -> Result<SectorBasis> {
        if n_electrons % 2 != 0 {
            return Err(Error::Invalid(
                "Sz = 0 sector needs an even electron count".into(),
            ));
        }
        let space = SectorSpace::new(n_qubits, n_electrons / 2, n_electrons / 2);
        if space.dim() == 0 {
            return Err(Error::EmptySector);
        }
        Ok(SectorBasis {
            n_qubits,
            bitstrings: space.states,
        })
    }

    pub fn dimension(&self) -> usize {
        self.bitstrings.len()
    }
}

fn lowest_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (vals, vecs) = crate::linalg::sym_eigh(m);
    (vals[0], vecs.column(0).into())
}

/// Fix the global sign so the largest-magnitude amplitude is positive,
/// ties resolved toward the lowest index.
fn fix_vector_phase(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        *v = -v.clone();
    }
}

/// Ground state of the observable within the (N_e, Sz = 0) sector: lowest
/// eigenvalue and the eigenvector embedded back into the full register.
pub fn ground_state(hamiltonian: &PauliSum, n_electrons: usize) -> Result<(f64, Statevector)> {
    let n = hamiltonian.n_qubits();
    if n > 14 {
        return Err(Error::Invalid(format!("{n} qubits exceed the dense cap of 14")));
    }
    if n_electrons % 2 != 0 {
        return Err(Error::Invalid("closed-shell sector needs even electrons".into()));
    }
    let space = SectorSpace::new(n, n_electrons / 2, n_electrons / 2);
    if space.dim() == 0 {
        return Err(Error::EmptySector);
    }
    let m = space.project(hamiltonian).ok_or_else(|| {
        Error::Invalid("observable has imaginary sector matrix elements".into())
    })?;
    let (energy, mut v) = lowest_eigenpair(&m);
    fix_vector_phase(&mut v);
    Ok((energy, space.embed(&v)))
}

/// Sector ground state kept in compressed form (energy, space, amplitudes).
pub(crate) fn sector_ground_state(
    hamiltonian: &PauliSum,
    n_electrons: usize,
) -> Result<(f64, SectorSpace, DVector<f64>)> {
    let n = hamiltonian.n_qubits();
    let space = SectorSpace::new(n, n_electrons / 2, n_electrons / 2);
    if space.dim() == 0 {
        return Err(Error::EmptySector);
    }
    let m = space.project(hamiltonian).ok_or_else(|| {
        Error::Invalid("observable has imaginary sector matrix elements".into())
    })?;
    let (energy, mut v) = lowest_eigenpair(&m);
    fix_vector_phase(&mut v);
    Ok((energy, space, v))
}

/// Full-space dense ground state, the cross-check path for the sector
/// logic (and the only option for observables that do not conserve
/// particle number).
pub fn ground_state_full(hamiltonian: &PauliSum) -> Result<(f64, Statevector)> {
    let m = dense_matrix(hamiltonian)?;
    let dim = m.nrows();
    // embed the hermitian matrix as a real symmetric one twice the size
    let mut real = DMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = m[(i, j)];
            real[(i, j)] = v.re;
            real[(i + dim, j + dim)] = v.re;
            real[(i + dim, j)] = v.im;
            real[(i, j + dim)] = -v.im;
        }
    }
    let (energy, v) = lowest_eigenpair(&real);
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::new(v[i], v[i + dim]))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0;
    for (i, a) in amps.iter().enumerate() {
        if a.norm() > amps[best].norm() {
            best = i;
        }
    }
    let rotate = amps[best].conj() / amps[best].norm() / norm;
    for a in &mut amps {
        *a *= rotate;
    }
    Ok((energy, Statevector::from_amplitudes(amps)))
}

/// Dense matrix of a Pauli sum by literal Kronecker assembly, qubit 0 as
/// the most significant factor. Capped at 10 qubits.
pub fn dense_matrix(observable: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = observable.n_qubits();
    if n > 10 {
        return Err(Error::Invalid(format!("{n} qubits exceed the dense cap of 10")));
    }
    let dim = 1usize << n;
    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    let pauli_1q = |letter: char| -> DMatrix<Complex64> {
        let (a, b, c, d) = match letter {
            'I' => (1.0.into(), Complex64::ZERO, Complex64::ZERO, 1.0.into()),
            'X' => (Complex64::ZERO, 1.0.into(), 1.0.into(), Complex64::ZERO),
            'Y' => (
                Complex64::ZERO,
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::ZERO,
            ),
            'Z' => (1.0.into(), Complex64::ZERO, Complex64::ZERO, (-1.0).into()),
            _ => unreachable!(),
        };
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    };
    for (s, &coef) in observable.terms() {
        let mut m = DMatrix::<Complex64>::from_element(1, 1, Complex64::ONE);
        for q in 0..n {
            m = m.kronecker(&pauli_1q(s.letter(q)));
        }
        total += m * Complex64::new(coef, 0.0);
    }
    Ok(total)
}

/// Dense matrix of a ladder-operator sum on `n_modes` modes, built directly
/// from the fermionic action on occupation-number basis states:
/// `a_p^+ |n⟩ = (-1)^{Σ_{j<p} n_j} (1 - n_p) |n + e_p⟩`.
pub fn fermion_dense_matrix(op: &FermionOperator, n_modes: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n_modes;
    let bit = |p: usize| 1usize << (n_modes - 1 - p);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for term in &op.terms {
        'kets: for ket in 0..dim {
            let mut bits = ket;
            let mut sign = 1.0;
            for &(mode, dagger) in term.ops.iter().rev() {
                let occupied = bits & bit(mode) != 0;
                if dagger == occupied {
                    continue 'kets;
                }
                let parity_mask: usize = (0..mode).map(bit).sum();
                if (bits & parity_mask).count_ones() % 2 == 1 {
                    sign = -sign;
                }
                bits ^= bit(mode);
            }
            m[(bits, ket)] += Complex64::new(term.coefficient * sign, 0.0);
        }
    }
    m
}

struct ExactModel<'a> {
    molecule: &'a Molecule,
    fd_delta: f64,
}

impl EnergyModel for ExactModel<'_> {
    fn n_theta(&self) -> usize {
        0
    }

    fn evaluate(&self, _theta: &[f64], x: &[f64]) -> Result<Evaluation> {
        let ctx = crate::hamiltonian::GeometryContext::new(self.molecule, x)?;
        let h = ctx.hamiltonian()?;
        let (energy, space, v) = sector_ground_state(&h, ctx.n_active_electrons())?;

        let derivs: Vec<Result<PauliSum>> = {
            use rayon::prelude::*;
            (0..x.len())
                .into_par_iter()
                .map(|i| ctx.derivative(i, self.fd_delta))
                .collect()
        };
        let mut grad_x = Vec::with_capacity(x.len());
        for d in derivs {
            let d = d?;
            let m = space.project(&d).ok_or_else(|| {
                Error::Invalid("derivative observable has imaginary sector elements".into())
            })?;
            grad_x.push(crate::sector::quadratic_form(&m, &v));
        }
        Ok(Evaluation {
            energy,
            grad_theta: Vec::new(),
            grad_x,
        })
    }
}

/// Geometry optimization with the exact sector ground state replacing the
/// circuit state at every iteration; same stop rule as the circuit loop.
pub fn fci_geometry_optimize(
    molecule: &Molecule,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let model = ExactModel {
        molecule,
        fd_delta: config.fd_delta,
    };
    gradient_descent(&model, molecule, x0, config, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::molecular_hamiltonian;
    use crate::molecule::Element;
    use crate::pauli::PauliString;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dense_matrix_basics() {
        // constant observable
        let mut id = PauliSum::new(2);
        id.add_term(PauliString::identity(), 0.75);
        let m = dense_matrix(&id).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(m[(i, i)].re, 0.75, epsilon = 1e-15);
        }

        // Z0 on two qubits: diag(1, 1, -1, -1) with qubit 0 most significant
        let mut z0 = PauliSum::new(2);
        z0.add_term(PauliString::from_ops(&[(0, 'Z')]).unwrap(), 1.0);
        let m = dense_matrix(&z0).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn jw_number_operator_matches_ladder_matrix() {
        let mut op = FermionOperator::new();
        op.add(1.0, vec![(0, true), (0, false)]);
        let pauli = crate::fermion::jordan_wigner(&op, 2).unwrap();
        let m_pauli = dense_matrix(&pauli).unwrap();
        let m_ladder = fermion_dense_matrix(&op, 2);
        assert_abs_diff_eq!((m_pauli - m_ladder).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn one_qubit_z_full_space() {
        let mut z = PauliSum::new(1);
        z.add_term(PauliString::from_ops(&[(0, 'Z')]).unwrap(), 1.0);
        let (e, state) = ground_state_full(&z).unwrap();
        assert_abs_diff_eq!(e, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(state.amplitude(1).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn h2_sector_dimension_and_energy_bounds() {
        let mol = Molecule::new(
            vec![Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.388948601621],
            0,
            false,
        )
        .unwrap();
        let h = molecular_hamiltonian(&mol, mol.coordinates()).unwrap();
        let basis = SectorBasis::new(4, 2).unwrap();
        assert_eq!(basis.dimension(), 4);

        let (e, state) = ground_state(&h, 2).unwrap();
        // pinned by an independent reference program
        assert_abs_diff_eq!(e, -1.13730603591728, epsilon = 1e-6);
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);

        // sector result equals full dense diagonalization
        let (e_full, _) = ground_state_full(&h).unwrap();
        assert_abs_diff_eq!(e, e_full, epsilon = 1e-10);

        // variational bound: HF sits above the exact ground energy
        let hf = Statevector::from_bitstring("1100");
        assert!(hf.expectation(&h).unwrap() >= e);
    }

    #[test]
    fn water_sector_dimension() {
        let basis = SectorBasis::new(12, 8).unwrap();
        assert_eq!(basis.dimension(), 225);
    }

    #[test]
    fn empty_sector_is_error() {
        let h = PauliSum::new(2);
        assert!(matches!(ground_state(&h, 6), Err(Error::EmptySector)));
    }
}
