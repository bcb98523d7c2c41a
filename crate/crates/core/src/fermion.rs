//! Second-quantized fermionic operators and the Jordan-Wigner map.
//!
//! Spin-orbitals follow the interleaved convention: spin-orbital `2p` is
//! (spatial p, alpha) and `2p+1` is (spatial p, beta), so the Hartree-Fock
//! determinant occupies the leading modes.

use crate::pauli::{PauliAccumulator, PauliString, PauliSum, PHASES, PRUNE_THRESHOLD};
use crate::scf::ActiveSpaceIntegrals;
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A product of ladder operators with a real weight. `ops` are applied
/// right-to-left; `(mode, true)` is a creation operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    pub coefficient: f64,
    pub ops: Vec<(usize, bool)>,
}

/// Real-weighted sum of ladder-operator products.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    pub terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn new() -> Self {
        FermionOperator { terms: Vec::new() }
    }

    pub fn add(&mut self, coefficient: f64, ops: Vec<(usize, bool)>) {
        self.terms.push(FermionTerm { coefficient, ops });
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|t| t.ops.iter().map(|&(m, _)| m))
            .max()
    }

    /// Reverse each product and flip daggers (coefficients are real).
    pub fn adjoint(&self) -> FermionOperator {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm {
                    coefficient: t.coefficient,
                    ops: t.ops.iter().rev().map(|&(m, d)| (m, !d)).collect(),
                })
                .collect(),
        }
    }

    /// Rewrite as a sum of normal-ordered products (creations left of
    /// annihilations, each block sorted) using the canonical
    /// anticommutation relations, merging like terms.
    pub fn normal_ordered(&self) -> FermionOperator {
        let mut done: BTreeMap<Vec<(usize, bool)>, f64> = BTreeMap::new();
        let mut work: Vec<(f64, Vec<(usize, bool)>)> = self
            .terms
            .iter()
            .map(|t| (t.coefficient, t.ops.clone()))
            .collect();

        while let Some((coef, ops)) = work.pop() {
            if coef == 0.0 {
                continue;
            }
            match first_disorder(&ops) {
                None => {
                    *done.entry(ops).or_insert(0.0) += coef;
                }
                Some(i) => {
                    let (a, b) = (ops[i], ops[i + 1]);
                    if a.0 == b.0 && a.1 != b.1 {
                        // a_p a_p^+ = 1 - a_p^+ a_p
                        let mut contracted = ops.clone();
                        contracted.drain(i..i + 2);
                        work.push((coef, contracted));
                        let mut swapped = ops.clone();
                        swapped.swap(i, i + 1);
                        work.push((-coef, swapped));
                    } else if a.0 == b.0 {
                        // repeated creation or annihilation vanishes
                        continue;
                    } else {
                        let mut swapped = ops;
                        swapped.swap(i, i + 1);
                        work.push((-coef, swapped));
                    }
                }
            }
        }

        let mut out = FermionOperator::new();
        for (ops, coefficient) in done {
            if coefficient.abs() > 1e-14 {
                out.terms.push(FermionTerm { coefficient, ops });
            }
        }
        out
    }
}

/// First adjacent pair violating normal order: annihilator before creator,
/// creators not strictly increasing, or annihilators not strictly
/// decreasing.
fn first_disorder(ops: &[(usize, bool)]) -> Option<usize> {
    for i in 0..ops.len().saturating_sub(1) {
        let (a, b) = (ops[i], ops[i + 1]);
        let bad = match (a.1, b.1) {
            (false, true) => true,
            (true, true) => a.0 >= b.0,
            (false, false) => a.0 <= b.0,
            (true, false) => false,
        };
        if bad {
            return Some(i);
        }
    }
    None
}

/// Spin-orbital Hamiltonian over the active space:
/// core constant, one-body `h_pq c_p^+ c_q`, and the two-electron part
/// `1/2 <pq|rs> a^+_{p,s1} a^+_{q,s2} a_{s,s2} a_{r,s1}` summed over spins.
pub fn build_fermionic_hamiltonian(asi: &ActiveSpaceIntegrals) -> FermionOperator {
    let m = asi.n_active_orbitals;
    let mut op = FermionOperator::new();
    if asi.core_energy != 0.0 {
        op.add(asi.core_energy, vec![]);
    }

    for p in 0..m {
        for q in 0..m {
            let h = asi.one_body[(p, q)];
            if h.abs() < PRUNE_THRESHOLD {
                continue;
            }
            for spin in 0..2 {
                op.add(h, vec![(2 * p + spin, true), (2 * q + spin, false)]);
            }
        }
    }

    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let g = asi.two_body.get(p, q, r, s);
                    if g.abs() < PRUNE_THRESHOLD {
                        continue;
                    }
                    for s1 in 0..2 {
                        for s2 in 0..2 {
                            op.add(
                                0.5 * g,
                                vec![
                                    (2 * p + s1, true),
                                    (2 * q + s2, true),
                                    (2 * s + s2, false),
                                    (2 * r + s1, false),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    op
}

/// Map ladder operators to Pauli strings:
/// `c_p^+ -> (prod_{j<p} Z_j) (X_p - i Y_p)/2` and the adjoint for `c_p`.
/// Products are expanded, like strings merged, residual imaginary weight
/// checked, and coefficients below 1e-12 pruned.
pub fn jordan_wigner(op: &FermionOperator, n_qubits: usize) -> Result<PauliSum> {
    if let Some(m) = op.max_mode() {
        if m >= n_qubits {
            return Err(Error::Invalid(format!(
                "mode {m} does not fit in {n_qubits} qubits"
            )));
        }
    }
    let mut acc = PauliAccumulator::new(n_qubits);
    for term in &op.terms {
        // running sum of Pauli terms for the partial product
        let mut partial: Vec<(Complex64, PauliString)> =
            vec![(Complex64::new(term.coefficient, 0.0), PauliString::identity())];
        for &(mode, dagger) in &term.ops {
            let chain: Vec<(usize, char)> = (0..mode).map(|j| (j, 'Z')).collect();
            let mut x_ops = chain.clone();
            x_ops.push((mode, 'X'));
            let mut y_ops = chain;
            y_ops.push((mode, 'Y'));
            let x_str = PauliString::from_ops(&x_ops).unwrap();
            let y_str = PauliString::from_ops(&y_ops).unwrap();
            let y_coef = if dagger {
                Complex64::new(0.0, -0.5)
            } else {
                Complex64::new(0.0, 0.5)
            };

            let mut next = Vec::with_capacity(partial.len() * 2);
            for (coef, s) in &partial {
                let (sx, phx) = s.mul(&x_str);
                next.push((coef * 0.5 * PHASES[phx as usize], sx));
                let (sy, phy) = s.mul(&y_str);
                next.push((coef * y_coef * PHASES[phy as usize], sy));
            }
            partial = next;
        }
        for (coef, s) in partial {
            acc.add(s, coef);
        }
    }
    acc.into_real(PRUNE_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn number_operator_textbook_identity() {
        // c0^+ c0 -> I/2 - Z0/2
        let mut op = FermionOperator::new();
        op.add(1.0, vec![(0, true), (0, false)]);
        let sum = jordan_wigner(&op, 2).unwrap();
        assert_eq!(sum.n_terms(), 2);
        assert_abs_diff_eq!(sum.coefficient(&PauliString::identity()), 0.5);
        let z0 = PauliString::from_ops(&[(0, 'Z')]).unwrap();
        assert_abs_diff_eq!(sum.coefficient(&z0), -0.5);
    }

    #[test]
    fn hopping_term() {
        // c0^+ c1 + c1^+ c0 -> (X0 X1 + Y0 Y1)/2
        let mut op = FermionOperator::new();
        op.add(1.0, vec![(0, true), (1, false)]);
        op.add(1.0, vec![(1, true), (0, false)]);
        let sum = jordan_wigner(&op, 2).unwrap();
        let xx = PauliString::from_ops(&[(0, 'X'), (1, 'X')]).unwrap();
        let yy = PauliString::from_ops(&[(0, 'Y'), (1, 'Y')]).unwrap();
        assert_eq!(sum.n_terms(), 2);
        assert_abs_diff_eq!(sum.coefficient(&xx), 0.5);
        assert_abs_diff_eq!(sum.coefficient(&yy), 0.5);
    }

    #[test]
    fn mode_out_of_range() {
        let mut op = FermionOperator::new();
        op.add(1.0, vec![(5, true), (5, false)]);
        assert!(jordan_wigner(&op, 4).is_err());
    }

    #[test]
    fn normal_ordering_contracts() {
        // a0 a0^+ = 1 - a0^+ a0
        let mut op = FermionOperator::new();
        op.add(1.0, vec![(0, false), (0, true)]);
        let no = op.normal_ordered();
        assert_eq!(no.terms.len(), 2);
        let identity = no.terms.iter().find(|t| t.ops.is_empty()).unwrap();
        assert_abs_diff_eq!(identity.coefficient, 1.0);
        let n0 = no
            .terms
            .iter()
            .find(|t| t.ops == vec![(0, true), (0, false)])
            .unwrap();
        assert_abs_diff_eq!(n0.coefficient, -1.0);
    }

    #[test]
    fn adjoint_of_hermitian_pair_is_identity_after_normal_order() {
        let mut op = FermionOperator::new();
        op.add(0.7, vec![(0, true), (3, false)]);
        op.add(0.7, vec![(3, true), (0, false)]);
        op.add(0.25, vec![(0, true), (1, true), (2, false), (3, false)]);
        op.add(0.25, vec![(3, true), (2, true), (1, false), (0, false)]);
        let diff_terms: Vec<FermionTerm> = op
            .adjoint()
            .terms
            .into_iter()
            .map(|mut t| {
                t.coefficient = -t.coefficient;
                t
            })
            .collect();
        let mut diff = op.clone();
        diff.terms.extend(diff_terms);
        assert!(diff.normal_ordered().terms.is_empty());
    }

    #[test]
    fn zero_integrals_give_constant_operator() {
        use crate::integrals::Tensor4;
        use nalgebra::DMatrix;
        let asi = ActiveSpaceIntegrals {
            one_body: DMatrix::zeros(2, 2),
            two_body: Tensor4::zeros(2),
            core_energy: 1.25,
            n_active_electrons: 2,
            n_active_orbitals: 2,
        };
        let op = build_fermionic_hamiltonian(&asi);
        assert_eq!(op.terms.len(), 1);
        assert!(op.terms[0].ops.is_empty());
        assert_abs_diff_eq!(op.terms[0].coefficient, 1.25);
    }

    #[test]
    fn single_orbital_gives_spin_degenerate_number_terms() {
        use crate::integrals::Tensor4;
        use nalgebra::DMatrix;
        let eps = -0.43;
        let mut one = DMatrix::zeros(1, 1);
        one[(0, 0)] = eps;
        let asi = ActiveSpaceIntegrals {
            one_body: one,
            two_body: Tensor4::zeros(1),
            core_energy: 0.0,
            n_active_electrons: 2,
            n_active_orbitals: 1,
        };
        let op = build_fermionic_hamiltonian(&asi);
        // eps (n_0 + n_1)
        assert_eq!(op.terms.len(), 2);
        for t in &op.terms {
            assert_abs_diff_eq!(t.coefficient, eps);
            assert_eq!(t.ops.len(), 2);
            assert_eq!(t.ops[0].0, t.ops[1].0);
        }
    }
}
