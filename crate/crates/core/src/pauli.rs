//! Pauli-string algebra and real-weighted Pauli-sum observables.

use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Coefficients below this magnitude are dropped when assembling sums.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Residual imaginary weight above this is an internal-consistency error.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// A tensor product of single-qubit Paulis, encoded as X/Z bit masks:
/// bit `q` of `x`/`z` says whether qubit `q` carries an X/Z factor; both
/// set means Y (the literal Pauli Y, not the product XZ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PauliString {
    x: u32,
    z: u32,
}

impl PauliString {
    pub fn identity() -> Self {
        PauliString::default()
    }

    /// Build from (qubit, letter) pairs; duplicate qubits are rejected.
    pub fn from_ops(ops: &[(usize, char)]) -> Result<Self> {
        let mut s = PauliString::default();
        for &(q, letter) in ops {
            if q >= 32 {
                return Err(Error::Invalid(format!("qubit index {q} out of range")));
            }
            let bit = 1u32 << q;
            if (s.x | s.z) & bit != 0 {
                return Err(Error::Invalid(format!("duplicate qubit {q} in Pauli string")));
            }
            match letter {
                'I' => {}
                'X' => s.x |= bit,
                'Y' => {
                    s.x |= bit;
                    s.z |= bit;
                }
                'Z' => s.z |= bit,
                other => return Err(Error::Invalid(format!("unknown Pauli letter {other:?}"))),
            }
        }
        Ok(s)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn letter(&self, qubit: usize) -> char {
        let bit = 1u32 << qubit;
        match ((self.x & bit) != 0, (self.z & bit) != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Index-space masks for a register of `n` qubits with qubit 0 as the
    /// most significant bit: (flip mask, sign mask, number of Y factors).
    pub(crate) fn index_masks(&self, n: usize) -> (usize, usize, u32) {
        let mut flip = 0usize;
        let mut sign = 0usize;
        for q in 0..n {
            let bit = 1usize << (n - 1 - q);
            if self.x & (1 << q) != 0 {
                flip |= bit;
            }
            if self.z & (1 << q) != 0 {
                sign |= bit;
            }
        }
        (flip, sign, (self.x & self.z).count_ones())
    }

    /// Product of two strings; returns the result and the phase as a power
    /// of i (mod 4), i.e. `self * other = i^phase * result`.
    pub fn mul(&self, other: &PauliString) -> (PauliString, u8) {
        // write P(x,z) = i^{|x & z|} X^x Z^z; then
        // P1 P2 = i^{c1 + c2 - c12 + 2 |z1 & x2|} P(x1^x2, z1^z2)
        let c1 = (self.x & self.z).count_ones();
        let c2 = (other.x & other.z).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let c12 = (x & z).count_ones();
        let swaps = (self.z & other.x).count_ones();
        let phase = (c1 + c2 + 2 * swaps + 4 * c12 - c12) % 4; // -c12 mod 4
        (PauliString { x, z }, phase as u8)
    }

    fn max_qubit(&self) -> Option<usize> {
        let all = self.x | self.z;
        if all == 0 {
            None
        } else {
            Some(31 - all.leading_zeros() as usize)
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        if let Some(top) = self.max_qubit() {
            for q in 0..=top {
                let letter = self.letter(q);
                if letter == 'I' {
                    continue;
                }
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{letter}{q}")?;
                first = false;
            }
        }
        write!(f, "]")
    }
}

/// Real-weighted sum of Pauli strings on a fixed register. Terms are kept
/// in a sorted map so iteration order, serialization and summation order
/// are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits <= 32);
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.terms.get(s).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &f64)> {
        self.terms.iter()
    }

    /// Add `coef * string`, merging with an existing term.
    pub fn add_term(&mut self, s: PauliString, coef: f64) {
        debug_assert!(s.max_qubit().map_or(0, |q| q + 1) <= self.n_qubits);
        let entry = self.terms.entry(s).or_insert(0.0);
        *entry += coef;
    }

    /// Drop terms with |coefficient| below `threshold`.
    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, c| c.abs() >= threshold);
    }

    pub fn scale(&mut self, factor: f64) {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
    }

    /// Term-wise `self - other` over the union of strings.
    pub fn sub(&self, other: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, -c);
        }
        out
    }

    /// The Jordan-Wigner particle-number operator Σ_q (I - Z_q) / 2.
    pub fn number_operator(n_qubits: usize) -> PauliSum {
        let mut sum = PauliSum::new(n_qubits);
        sum.add_term(PauliString::identity(), n_qubits as f64 / 2.0);
        for q in 0..n_qubits {
            sum.add_term(
                PauliString::from_ops(&[(q, 'Z')]).unwrap(),
                -0.5,
            );
        }
        sum
    }

    /// One term per line: `<coefficient:+.12e> [<P><qubit> ...]` with the
    /// identity rendered as `[]`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            out.push_str(&format!("{c:+.12e} {s}\n"));
        }
        out
    }

    /// Parse the `to_text` format. Loses nothing that was printed.
    pub fn parse(text: &str, n_qubits: usize) -> Result<PauliSum> {
        let mut sum = PauliSum::new(n_qubits);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (coef_text, rest) = line
                .split_once(' ')
                .ok_or_else(|| Error::Input(format!("line {}: missing term body", lineno + 1)))?;
            let coef: f64 = coef_text
                .parse()
                .map_err(|_| Error::Input(format!("line {}: bad coefficient", lineno + 1)))?;
            let body = rest
                .trim()
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::Input(format!("line {}: expected [..]", lineno + 1)))?;
            let mut ops = Vec::new();
            for token in body.split_whitespace() {
                let letter = token.chars().next().unwrap();
                let q: usize = token[1..]
                    .parse()
                    .map_err(|_| Error::Input(format!("line {}: bad qubit index", lineno + 1)))?;
                if q >= n_qubits {
                    return Err(Error::Input(format!(
                        "line {}: qubit {q} outside register of {n_qubits}",
                        lineno + 1
                    )));
                }
                ops.push((q, letter));
            }
            sum.add_term(PauliString::from_ops(&ops)?, coef);
        }
        Ok(sum)
    }
}

/// Complex-weighted accumulator used while expanding operator products;
/// collapses to a real `PauliSum` once assembly is done.
#[derive(Debug, Clone)]
pub(crate) struct PauliAccumulator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliAccumulator {
    pub fn new(n_qubits: usize) -> Self {
        PauliAccumulator {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, s: PauliString, coef: Complex64) {
        let entry = self.terms.entry(s).or_insert(Complex64::ZERO);
        *entry += coef;
    }

    /// Check hermiticity and produce the real-weighted sum.
    pub fn into_real(self, prune: f64) -> Result<PauliSum> {
        let mut sum = PauliSum::new(self.n_qubits);
        for (s, c) in self.terms {
            if c.im.abs() > IMAG_TOLERANCE {
                return Err(Error::ResidualImaginary(c.im.abs()));
            }
            if c.re.abs() >= prune {
                sum.add_term(s, c.re);
            }
        }
        Ok(sum)
    }
}

pub(crate) const PHASES: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(spec: &str) -> PauliString {
        // e.g. "X0 Z1"
        let ops: Vec<(usize, char)> = spec
            .split_whitespace()
            .map(|t| (t[1..].parse().unwrap(), t.chars().next().unwrap()))
            .collect();
        PauliString::from_ops(&ops).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        // X*Y = iZ, Y*X = -iZ, Z*X = iY, Y*Z = iX, X*X = I
        let (r, ph) = p("X0").mul(&p("Y0"));
        assert_eq!((r, ph), (p("Z0"), 1));
        let (r, ph) = p("Y0").mul(&p("X0"));
        assert_eq!((r, ph), (p("Z0"), 3));
        let (r, ph) = p("Z0").mul(&p("X0"));
        assert_eq!((r, ph), (p("Y0"), 1));
        let (r, ph) = p("Y0").mul(&p("Z0"));
        assert_eq!((r, ph), (p("X0"), 1));
        let (r, ph) = p("X0").mul(&p("X0"));
        assert!(r.is_identity());
        assert_eq!(ph, 0);
    }

    #[test]
    fn multi_qubit_product_and_weight() {
        let (r, ph) = p("X0 Z1").mul(&p("Z0 Z1"));
        // X0 Z0 = -i Y0; Z1 Z1 = I
        assert_eq!(r, p("Y0"));
        assert_eq!(ph, 3);
        assert_eq!(p("X0 Z1").weight(), 2);
        assert_eq!(PauliString::identity().weight(), 0);
    }

    #[test]
    fn display_and_parse_roundtrip() {
        let mut sum = PauliSum::new(4);
        sum.add_term(PauliString::identity(), -0.24274265);
        sum.add_term(p("Z0 Z1"), 0.17);
        sum.add_term(p("X0 X1 Y2 Y3"), -0.045);
        let text = sum.to_text();
        assert!(text.contains("[]"));
        assert!(text.contains("[Z0 Z1]"));
        let back = PauliSum::parse(&text, 4).unwrap();
        assert_eq!(back.n_terms(), 3);
        for (s, c) in sum.terms() {
            assert_abs_diff_eq!(back.coefficient(s), *c, epsilon = 1e-12);
        }
        // serialized fixed point
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn merging_and_pruning() {
        let mut sum = PauliSum::new(2);
        sum.add_term(p("Z0"), 0.5);
        sum.add_term(p("Z0"), -0.5 + 1e-15);
        sum.prune(PRUNE_THRESHOLD);
        assert_eq!(sum.n_terms(), 0);
    }

    #[test]
    fn number_operator_shape() {
        let n = PauliSum::number_operator(4);
        assert_eq!(n.n_terms(), 5);
        assert_abs_diff_eq!(n.coefficient(&PauliString::identity()), 2.0);
    }
}
