//! Particle-number/Sz sector compression.
//!
//! Excitation circuits and molecular observables never leave the sector of
//! the Hartree-Fock determinant, so cost and gradient evaluations can work
//! with the handful of sector amplitudes instead of all 2^N. The dense
//! `statevector` path remains the reference; everything here is
//! cross-checked against it and falls back to it when an input is not
//! sector-safe.

use crate::pauli::PauliSum;
use crate::statevector::{Circuit, GateKind, Statevector};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::HashMap;

/// Basis indices (qubit 0 = most significant bit) of all states with fixed
/// electron count and Sz, sorted ascending.
#[derive(Debug, Clone)]
pub(crate) struct SectorSpace {
    pub n_qubits: usize,
    pub states: Vec<u32>,
    index_of: HashMap<u32, usize>,
}

impl SectorSpace {
    /// Sector with `n_alpha` electrons on even qubits and `n_beta` on odd
    /// qubits (interleaved spin convention).
    pub fn new(n_qubits: usize, n_alpha: usize, n_beta: usize) -> SectorSpace {
        let mut alpha_mask = 0u32;
        for q in (0..n_qubits).step_by(2) {
            alpha_mask |= 1 << (n_qubits - 1 - q);
        }
        let full = 1u32 << n_qubits;
        let mut states = Vec::new();
        for i in 0..full {
            let na = (i & alpha_mask).count_ones() as usize;
            let nb = (i & !alpha_mask & (full - 1)).count_ones() as usize;
            if na == n_alpha && nb == n_beta {
                states.push(i);
            }
        }
        let index_of = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        SectorSpace {
            n_qubits,
            states,
            index_of,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, basis_index: u32) -> Option<usize> {
        self.index_of.get(&basis_index).copied()
    }

    /// Project an observable onto the sector as a dense real matrix.
    /// Returns `None` when a string would contribute an imaginary matrix
    /// element (odd number of Y factors).
    pub fn project(&self, observable: &PauliSum) -> Option<DMatrix<f64>> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (s, &coef) in observable.terms() {
            let (flip, sign_mask, n_y) = s.index_masks(self.n_qubits);
            if n_y % 2 == 1 {
                return None;
            }
            let phase = if n_y % 4 == 0 { 1.0 } else { -1.0 };
            for (col, &b) in self.states.iter().enumerate() {
                let target = b ^ flip as u32;
                if let Some(row) = self.index_of(target) {
                    let sign = if ((b as usize & sign_mask).count_ones() & 1) == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    m[(row, col)] += coef * phase * sign;
                }
            }
        }
        Some(m)
    }

    /// Unit vector on the given occupation pattern, if it lies in the
    /// sector.
    pub fn basis_vector(&self, occupations: &[bool]) -> Option<DVector<f64>> {
        let n = occupations.len();
        let mut index = 0u32;
        for (q, &occ) in occupations.iter().enumerate() {
            if occ {
                index |= 1 << (n - 1 - q);
            }
        }
        let k = self.index_of(index)?;
        let mut v = DVector::zeros(self.dim());
        v[k] = 1.0;
        Some(v)
    }

    /// Lift sector amplitudes back to a full dense statevector.
    pub fn embed(&self, v: &DVector<f64>) -> Statevector {
        let mut full = vec![Complex64::ZERO; 1usize << self.n_qubits];
        for (k, &b) in self.states.iter().enumerate() {
            full[b as usize] = Complex64::new(v[k], 0.0);
        }
        Statevector::from_amplitudes(full)
    }

    /// Precompute the rotation pairs of every gate. `None` if a gate could
    /// leave the sector.
    pub fn compile(&self, circuit: &Circuit) -> Option<SectorCircuit> {
        let n = self.n_qubits;
        let bit = |q: usize| 1u32 << (n - 1 - q);
        let mut gates = Vec::with_capacity(circuit.gates.len());
        for g in &circuit.gates {
            // sector safety: the flipped-on and flipped-off qubits must
            // balance per spin
            let (on, off): (Vec<usize>, Vec<usize>) = match g.kind {
                GateKind::Single => (vec![g.qubits[0]], vec![g.qubits[1]]),
                GateKind::Double => (
                    vec![g.qubits[0], g.qubits[1]],
                    vec![g.qubits[2], g.qubits[3]],
                ),
            };
            let spin_sum = |qs: &[usize]| qs.iter().map(|q| q % 2).sum::<usize>();
            if on.len() != off.len() || spin_sum(&on) != spin_sum(&off) {
                return None;
            }

            let mut pairs = Vec::new();
            match g.kind {
                GateKind::Single => {
                    let (ba, bb) = (bit(g.qubits[0]), bit(g.qubits[1]));
                    for (k, &s) in self.states.iter().enumerate() {
                        // the |01⟩ side
                        if s & ba == 0 && s & bb != 0 {
                            let t = s ^ ba ^ bb;
                            pairs.push((k, self.index_of(t)?));
                        }
                    }
                }
                GateKind::Double => {
                    let (ba, bb, bc, bd) = (
                        bit(g.qubits[0]),
                        bit(g.qubits[1]),
                        bit(g.qubits[2]),
                        bit(g.qubits[3]),
                    );
                    for (k, &s) in self.states.iter().enumerate() {
                        // the |1100⟩ side
                        if s & ba != 0 && s & bb != 0 && s & bc == 0 && s & bd == 0 {
                            let t = s ^ ba ^ bb ^ bc ^ bd;
                            pairs.push((k, self.index_of(t)?));
                        }
                    }
                }
            }
            gates.push(SectorGate {
                kind: g.kind,
                pairs,
            });
        }
        Some(SectorCircuit {
            dim: self.dim(),
            gates,
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SectorGate {
    kind: GateKind,
    /// (index of the |01⟩ / |1100⟩ side, index of the partner state)
    pairs: Vec<(usize, usize)>,
}

/// A circuit lowered onto sector amplitudes.
#[derive(Debug, Clone)]
pub(crate) struct SectorCircuit {
    dim: usize,
    gates: Vec<SectorGate>,
}

impl SectorCircuit {
    /// Apply all gates to a copy of `start`, one angle per gate occurrence
    /// in listed order.
    pub fn run(&self, gate_angles: &[f64], start: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(start.len(), self.dim);
        debug_assert_eq!(gate_angles.len(), self.gates.len());
        let mut v = start.clone();
        for (gate, &angle) in self.gates.iter().zip(gate_angles) {
            let (cos, sin) = (angle.cos(), angle.sin());
            match gate.kind {
                GateKind::Single => {
                    // pairs store the |01⟩ side first
                    for &(i01, i10) in &gate.pairs {
                        let a01 = v[i01];
                        let a10 = v[i10];
                        v[i01] = cos * a01 - sin * a10;
                        v[i10] = sin * a01 + cos * a10;
                    }
                }
                GateKind::Double => {
                    for &(hi, lo) in &gate.pairs {
                        let ahi = v[hi];
                        let alo = v[lo];
                        v[hi] = cos * ahi + sin * alo;
                        v[lo] = -sin * ahi + cos * alo;
                    }
                }
            }
        }
        v
    }
}

/// `v^T M v` for a projected observable.
pub(crate) fn quadratic_form(m: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (v.transpose() * m * v)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{run_circuit, Gate};
    use approx::assert_abs_diff_eq;

    #[test]
    fn sector_dimensions() {
        // 4 qubits, 1 alpha + 1 beta: 2 * 2 = 4 states
        assert_eq!(SectorSpace::new(4, 1, 1).dim(), 4);
        // 12 qubits, 2+2 electrons: C(6,2)^2 = 225
        assert_eq!(SectorSpace::new(12, 2, 2).dim(), 225);
        // 12 qubits, 4+4: C(6,4)^2 = 225
        assert_eq!(SectorSpace::new(12, 4, 4).dim(), 225);
    }

    #[test]
    fn sector_circuit_matches_dense() {
        let mut c = Circuit::hartree_fock(6, 2);
        c.gates.push(Gate {
            kind: GateKind::Double,
            qubits: vec![0, 1, 2, 3],
            angle_index: 0,
        });
        c.gates.push(Gate {
            kind: GateKind::Double,
            qubits: vec![0, 1, 4, 5],
            angle_index: 1,
        });
        c.gates.push(Gate {
            kind: GateKind::Single,
            qubits: vec![0, 2],
            angle_index: 2,
        });
        let theta = [0.3, -0.8, 0.45];

        let dense = run_circuit(&c, &theta);

        let space = SectorSpace::new(6, 1, 1);
        let compiled = space.compile(&c).unwrap();
        let start = space.basis_vector(&c.hf_occupations).unwrap();
        let v = compiled.run(&theta, &start);
        let embedded = space.embed(&v);

        for i in 0..dense.amplitudes().len() {
            assert_abs_diff_eq!(
                dense.amplitude(i).re,
                embedded.amplitude(i).re,
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(dense.amplitude(i).im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn spin_violating_gate_is_rejected() {
        let mut c = Circuit::hartree_fock(4, 2);
        // moves an alpha electron to a beta orbital
        c.gates.push(Gate {
            kind: GateKind::Single,
            qubits: vec![0, 3],
            angle_index: 0,
        });
        let space = SectorSpace::new(4, 1, 1);
        assert!(space.compile(&c).is_none());
    }
}
