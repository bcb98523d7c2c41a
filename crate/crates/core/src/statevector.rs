//! Dense statevector simulator with particle-conserving excitation gates.
//!
//! Indexing convention: qubit 0 is the most significant bit of the basis
//! label, so `|1100⟩` on four qubits sits at amplitude index 12. All tests
//! write basis states as bitstrings to keep this unambiguous.

use crate::pauli::{PauliSum, IMAG_TOLERANCE, PHASES};
use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl Statevector {
    /// Computational basis state for the given occupation pattern.
    pub fn basis_state(occupations: &[bool]) -> Statevector {
        let n = occupations.len();
        assert!(n <= 16, "statevector capped at 16 qubits");
        let mut index = 0usize;
        for (q, &occ) in occupations.iter().enumerate() {
            if occ {
                index |= 1 << (n - 1 - q);
            }
        }
        let mut amplitudes = vec![Complex64::ZERO; 1 << n];
        amplitudes[index] = Complex64::ONE;
        Statevector {
            amplitudes,
            n_qubits: n,
        }
    }

    /// Convenience constructor from a literal like `"1100"`.
    pub fn from_bitstring(bits: &str) -> Statevector {
        let occ: Vec<bool> = bits.chars().map(|c| c == '1').collect();
        Statevector::basis_state(&occ)
    }

    /// Wrap raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Statevector {
        let n = amplitudes.len().trailing_zeros() as usize;
        assert_eq!(1usize << n, amplitudes.len(), "length must be 2^n");
        Statevector {
            amplitudes,
            n_qubits: n,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Planar rotation in the {|01⟩, |10⟩} block of qubits `(a, b)`:
    ///
    /// ```text
    /// amp(|01⟩) <- cos θ · amp(|01⟩) - sin θ · amp(|10⟩)
    /// amp(|10⟩) <- sin θ · amp(|01⟩) + cos θ · amp(|10⟩)
    /// ```
    ///
    /// for every spectator configuration; |00⟩ and |11⟩ are untouched.
    pub fn apply_single_excitation(&mut self, theta: f64, qubits: (usize, usize)) {
        let (a, b) = qubits;
        assert!(a < b && b < self.n_qubits);
        let (cos, sin) = (theta.cos(), theta.sin());
        let (ba, bb) = (self.bit(a), self.bit(b));
        let flip = ba | bb;
        for i in 0..self.amplitudes.len() {
            // i is the |01⟩ side: a clear, b set
            if i & ba == 0 && i & bb != 0 {
                let j = i ^ flip;
                let a01 = self.amplitudes[i];
                let a10 = self.amplitudes[j];
                self.amplitudes[i] = cos * a01 - sin * a10;
                self.amplitudes[j] = sin * a01 + cos * a10;
            }
        }
    }

    /// Rotation in the {|1100⟩, |0011⟩} block of qubits `(a, b, c, d)`:
    ///
    /// ```text
    /// G(θ)|1100⟩ = cos θ |1100⟩ - sin θ |0011⟩
    /// G(θ)|0011⟩ = cos θ |0011⟩ + sin θ |1100⟩
    /// ```
    ///
    /// identity on the other 14 local configurations.
    pub fn apply_double_excitation(&mut self, theta: f64, qubits: (usize, usize, usize, usize)) {
        let (a, b, c, d) = qubits;
        assert!(a < b && b < c && c < d && d < self.n_qubits);
        let (cos, sin) = (theta.cos(), theta.sin());
        let (ba, bb, bc, bd) = (self.bit(a), self.bit(b), self.bit(c), self.bit(d));
        let flip = ba | bb | bc | bd;
        for i in 0..self.amplitudes.len() {
            // i is the |1100⟩ side: a, b set; c, d clear
            if i & ba != 0 && i & bb != 0 && i & bc == 0 && i & bd == 0 {
                let j = i ^ flip;
                let hi = self.amplitudes[i];
                let lo = self.amplitudes[j];
                self.amplitudes[i] = cos * hi + sin * lo;
                self.amplitudes[j] = -sin * hi + cos * lo;
            }
        }
    }

    /// `Σ_j h_j ⟨ψ|P_j|ψ⟩`, evaluated string by string in deterministic
    /// order. Errors if the accumulated imaginary part survives above
    /// tolerance; a hermitian observable cancels it to roundoff.
    pub fn expectation(&self, observable: &PauliSum) -> Result<f64> {
        if observable.n_qubits() != self.n_qubits {
            return Err(Error::Invalid(format!(
                "observable on {} qubits applied to {}-qubit state",
                observable.n_qubits(),
                self.n_qubits
            )));
        }
        let mut total = 0.0;
        let mut resid = 0.0f64;
        for (s, &coef) in observable.terms() {
            let (flip, sign_mask, n_y) = s.index_masks(self.n_qubits);
            let mut acc = Complex64::ZERO;
            for i in 0..self.amplitudes.len() {
                let sign = if ((i & sign_mask).count_ones() & 1) == 1 {
                    -1.0
                } else {
                    1.0
                };
                acc += self.amplitudes[i ^ flip].conj() * self.amplitudes[i] * sign;
            }
            let val = acc * PHASES[(n_y % 4) as usize];
            resid = resid.max(val.im.abs() * coef.abs());
            total += coef * val.re;
        }
        if resid > IMAG_TOLERANCE {
            return Err(Error::ResidualImaginary(resid));
        }
        Ok(total)
    }
}

/// Excitation-gate kinds on a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Single,
    Double,
}

/// One excitation gate: the qubits it acts on (strictly increasing) and the
/// slot of its rotation angle in the parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle_index: usize,
}

/// An ordered gate list applied to a Hartree-Fock product state.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub hf_occupations: Vec<bool>,
    pub gates: Vec<Gate>,
}

impl Circuit {
    /// Gate-free circuit preparing the first `n_electrons` qubits occupied.
    pub fn hartree_fock(n_qubits: usize, n_electrons: usize) -> Circuit {
        Circuit {
            n_qubits,
            hf_occupations: (0..n_qubits).map(|q| q < n_electrons).collect(),
            gates: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hf_occupations.len() != self.n_qubits {
            return Err(Error::Invalid("occupation length != qubit count".into()));
        }
        let mut max_angle = 0usize;
        for g in &self.gates {
            let want = match g.kind {
                GateKind::Single => 2,
                GateKind::Double => 4,
            };
            if g.qubits.len() != want
                || !g.qubits.windows(2).all(|w| w[0] < w[1])
                || *g.qubits.last().unwrap() >= self.n_qubits
            {
                return Err(Error::Invalid(format!("bad gate qubits {:?}", g.qubits)));
            }
            max_angle = max_angle.max(g.angle_index + 1);
        }
        let _ = max_angle;
        Ok(())
    }

    pub fn n_parameters(&self) -> usize {
        self.gates
            .iter()
            .map(|g| g.angle_index + 1)
            .max()
            .unwrap_or(0)
    }

    /// One gate per line: `double [0,1,2,3] theta=+0.123456789`.
    pub fn to_text(&self, theta: &[f64]) -> String {
        let mut out = String::new();
        for g in &self.gates {
            let kind = match g.kind {
                GateKind::Single => "single",
                GateKind::Double => "double",
            };
            let qubits: Vec<String> = g.qubits.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!(
                "{kind} [{}] theta={:+.9}\n",
                qubits.join(","),
                theta.get(g.angle_index).copied().unwrap_or(0.0)
            ));
        }
        out
    }
}

/// Prepare the Hartree-Fock state and apply the gates in listed order.
pub fn run_circuit(circuit: &Circuit, theta: &[f64]) -> Statevector {
    debug_assert!(circuit.n_parameters() <= theta.len());
    let angles: Vec<f64> = circuit.gates.iter().map(|g| theta[g.angle_index]).collect();
    run_circuit_gate_angles(circuit, &angles)
}

/// Like `run_circuit` but with one explicit angle per gate occurrence,
/// ignoring the angle slots. Used by the shift rule, which perturbs a
/// single occurrence at a time.
pub(crate) fn run_circuit_gate_angles(circuit: &Circuit, gate_angles: &[f64]) -> Statevector {
    debug_assert_eq!(circuit.gates.len(), gate_angles.len());
    let mut state = Statevector::basis_state(&circuit.hf_occupations);
    for (gate, &angle) in circuit.gates.iter().zip(gate_angles) {
        match gate.kind {
            GateKind::Single => {
                state.apply_single_excitation(angle, (gate.qubits[0], gate.qubits[1]))
            }
            GateKind::Double => state.apply_double_excitation(
                angle,
                (
                    gate.qubits[0],
                    gate.qubits[1],
                    gate.qubits[2],
                    gate.qubits[3],
                ),
            ),
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use approx::assert_abs_diff_eq;

    fn assert_close(a: Complex64, re: f64) {
        assert_abs_diff_eq!(a.re, re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_state_indexing() {
        let s = Statevector::from_bitstring("1100");
        assert_close(s.amplitude(12), 1.0);
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-15);
        let z = Statevector::from_bitstring("0000");
        assert_close(z.amplitude(0), 1.0);
    }

    #[test]
    fn single_excitation_matrix_orientation() {
        // theta = pi/2 sends |10⟩ to -|01⟩
        let mut s = Statevector::from_bitstring("10");
        s.apply_single_excitation(std::f64::consts::FRAC_PI_2, (0, 1));
        assert_close(s.amplitude(0b01), -1.0);

        // theta = 0 is the identity
        let mut s = Statevector::from_bitstring("10");
        s.apply_single_excitation(0.0, (0, 1));
        assert_close(s.amplitude(0b10), 1.0);
    }

    #[test]
    fn double_excitation_rotation_plane() {
        let theta = 0.37;
        let mut s = Statevector::from_bitstring("1100");
        s.apply_double_excitation(theta, (0, 1, 2, 3));
        assert_close(s.amplitude(0b1100), theta.cos());
        assert_close(s.amplitude(0b0011), -theta.sin());

        let mut s = Statevector::from_bitstring("0011");
        s.apply_double_excitation(theta, (0, 1, 2, 3));
        assert_close(s.amplitude(0b0011), theta.cos());
        assert_close(s.amplitude(0b1100), theta.sin());
    }

    #[test]
    fn hamming_weight_preserved() {
        // spectators untouched, particle number conserved
        let mut s = Statevector::from_bitstring("1011");
        s.apply_single_excitation(0.9, (1, 2));
        for (i, a) in s.amplitudes().iter().enumerate() {
            if a.norm() > 1e-14 {
                assert_eq!((i as u32).count_ones(), 3);
            }
        }
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn h2_style_circuit() {
        let mut c = Circuit::hartree_fock(4, 2);
        c.gates.push(Gate {
            kind: GateKind::Double,
            qubits: vec![0, 1, 2, 3],
            angle_index: 0,
        });
        c.validate().unwrap();
        let t = 0.61;
        let s = run_circuit(&c, &[t]);
        assert_close(s.amplitude(0b1100), t.cos());
        assert_close(s.amplitude(0b0011), -t.sin());
    }

    #[test]
    fn three_hydrogen_two_gate_state() {
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
        let (t1, t2) = (0.4, -0.7);
        let s = run_circuit(&c, &[t1, t2]);
        let idx = |bits: &str| usize::from_str_radix(bits, 2).unwrap();
        assert_close(s.amplitude(idx("110000")), t1.cos() * t2.cos());
        assert_close(s.amplitude(idx("001100")), -t1.sin());
        assert_close(s.amplitude(idx("000011")), -t1.cos() * t2.sin());
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_circuit_returns_hf() {
        let c = Circuit::hartree_fock(6, 2);
        let s = run_circuit(&c, &[]);
        assert_close(s.amplitude(0b110000), 1.0);
    }

    #[test]
    fn expectation_basics() {
        let s = Statevector::from_bitstring("0");
        let mut z = PauliSum::new(1);
        z.add_term(PauliString::from_ops(&[(0, 'Z')]).unwrap(), 1.0);
        assert_abs_diff_eq!(s.expectation(&z).unwrap(), 1.0, epsilon = 1e-14);

        // particle number in the HF state
        let hf = Statevector::from_bitstring("1100");
        let n = PauliSum::number_operator(4);
        assert_abs_diff_eq!(hf.expectation(&n).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_qubit_mismatch() {
        let s = Statevector::from_bitstring("01");
        let n = PauliSum::number_operator(3);
        assert!(s.expectation(&n).is_err());
    }

    #[test]
    fn circuit_text_format() {
        let mut c = Circuit::hartree_fock(4, 2);
        c.gates.push(Gate {
            kind: GateKind::Double,
            qubits: vec![0, 1, 2, 3],
            angle_index: 0,
        });
        c.gates.push(Gate {
            kind: GateKind::Single,
            qubits: vec![1, 3],
            angle_index: 1,
        });
        let text = c.to_text(&[0.123456789, -0.5]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "double [0,1,2,3] theta=+0.123456789");
        assert_eq!(lines.next().unwrap(), "single [1,3] theta=-0.500000000");
    }
}
