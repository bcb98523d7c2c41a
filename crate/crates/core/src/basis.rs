//! STO-3G basis-set data and expansion into contracted Cartesian Gaussians.

use crate::molecule::{Element, Molecule};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Raw STO-3G table, checked in under `data/` with provenance notes.
const STO3G_DATA: &str = include_str!("../data/sto-3g.dat");

/// One contracted shell on an atom. An `angular_momentum` of 1 expands to
/// the three Cartesian functions px, py, pz.
#[derive(Debug, Clone)]
pub struct BasisShell {
    pub center_index: usize,
    pub angular_momentum: u8,
    pub exponents: Vec<f64>,
    pub contraction_coefficients: Vec<f64>,
}

/// STO-3G shells for one element, centers unassigned (`center_index` 0).
pub fn load_basis(element: Element) -> Vec<BasisShell> {
    parse_sto3g(element).expect("embedded STO-3G table is well-formed")
}

fn parse_sto3g(element: Element) -> Result<Vec<BasisShell>> {
    let mut shells = Vec::new();
    let mut in_element = false;
    for line in STO3G_DATA.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(sym) = line.strip_prefix("element ") {
            in_element = sym.trim() == element.symbol();
            continue;
        }
        if !in_element {
            continue;
        }
        match line {
            "S" | "P" => shells.push(BasisShell {
                center_index: 0,
                angular_momentum: if line == "S" { 0 } else { 1 },
                exponents: Vec::new(),
                contraction_coefficients: Vec::new(),
            }),
            row => {
                let shell = shells
                    .last_mut()
                    .ok_or_else(|| Error::Input("primitive row before shell header".into()))?;
                let mut it = row.split_whitespace();
                let e: f64 = it
                    .next()
                    .and_then(|t| t.replace('E', "e").parse().ok())
                    .ok_or_else(|| Error::Input(format!("bad primitive row {row:?}")))?;
                let c: f64 = it
                    .next()
                    .and_then(|t| t.replace('E', "e").parse().ok())
                    .ok_or_else(|| Error::Input(format!("bad primitive row {row:?}")))?;
                shell.exponents.push(e);
                shell.contraction_coefficients.push(c);
            }
        }
    }
    for s in &shells {
        debug_assert_eq!(s.exponents.len(), 3, "STO-3G shells carry 3 primitives");
        debug_assert!(s.exponents.windows(2).all(|w| w[0] > w[1]));
        debug_assert!(s.exponents.iter().all(|&e| e > 0.0));
    }
    Ok(shells)
}

/// Shells for every atom of a molecule, with centers assigned.
pub fn shells_for_molecule(molecule: &Molecule) -> Vec<BasisShell> {
    let mut out = Vec::new();
    for (i, el) in molecule.symbols().iter().enumerate() {
        for mut shell in load_basis(*el) {
            shell.center_index = i;
            out.push(shell);
        }
    }
    out
}

/// A normalized contracted Cartesian Gaussian
/// `x^i y^j z^k exp(-a r^2)` with fixed center.
#[derive(Debug, Clone)]
pub struct Cgto {
    pub center: [f64; 3],
    pub powers: [u8; 3],
    pub exponents: Vec<f64>,
    /// Contraction coefficients with primitive norms folded in and the
    /// contraction rescaled so the self-overlap is exactly 1.
    pub coefficients: Vec<f64>,
}

impl Cgto {
    fn new(center: [f64; 3], powers: [u8; 3], exponents: &[f64], raw_coefs: &[f64]) -> Self {
        let l: u8 = powers.iter().sum();
        let mut coefficients: Vec<f64> = exponents
            .iter()
            .zip(raw_coefs)
            .map(|(&a, &c)| c * primitive_norm(a, l))
            .collect();
        // contracted self-overlap, same-center closed form
        let mut s = 0.0;
        for (&a1, &c1) in exponents.iter().zip(&coefficients) {
            for (&a2, &c2) in exponents.iter().zip(&coefficients) {
                let p = a1 + a2;
                let mut v = (PI / p).powf(1.5);
                if l == 1 {
                    v /= 2.0 * p;
                }
                s += c1 * c2 * v;
            }
        }
        let scale = s.sqrt().recip();
        for c in &mut coefficients {
            *c *= scale;
        }
        Cgto {
            center,
            powers,
            exponents: exponents.to_vec(),
            coefficients,
        }
    }

    pub fn total_angular_momentum(&self) -> u8 {
        self.powers.iter().sum()
    }
}

fn primitive_norm(alpha: f64, l: u8) -> f64 {
    let base = (2.0 * alpha / PI).powf(0.75);
    match l {
        0 => base,
        1 => base * 2.0 * alpha.sqrt(),
        _ => unreachable!("only s and p functions are supported"),
    }
}

/// Expand shells into the ordered AO function list. P shells contribute
/// px, py, pz in that order.
pub fn expand_shells(molecule: &Molecule, shells: &[BasisShell]) -> Vec<Cgto> {
    let mut out = Vec::new();
    for shell in shells {
        let center = molecule.atom_position(shell.center_index);
        match shell.angular_momentum {
            0 => out.push(Cgto::new(
                center,
                [0, 0, 0],
                &shell.exponents,
                &shell.contraction_coefficients,
            )),
            1 => {
                for axis in 0..3 {
                    let mut powers = [0u8; 3];
                    powers[axis] = 1;
                    out.push(Cgto::new(
                        center,
                        powers,
                        &shell.exponents,
                        &shell.contraction_coefficients,
                    ));
                }
            }
            l => unreachable!("angular momentum {l} not supported"),
        }
    }
    out
}

/// AO basis for a molecule at its current coordinates.
pub fn ao_basis(molecule: &Molecule) -> Vec<Cgto> {
    expand_shells(molecule, &shells_for_molecule(molecule))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hydrogen_shell() {
        let shells = load_basis(Element::H);
        assert_eq!(shells.len(), 1);
        assert_eq!(shells[0].exponents.len(), 3);
        assert_abs_diff_eq!(shells[0].exponents[0], 3.42525091, epsilon = 1e-7);
        assert_abs_diff_eq!(shells[0].exponents[1], 0.62391373, epsilon = 1e-7);
        assert_abs_diff_eq!(shells[0].exponents[2], 0.16885540, epsilon = 1e-7);
    }

    #[test]
    fn oxygen_function_count() {
        let mol = Molecule::new(
            vec![Element::O],
            vec![0.0, 0.0, 0.0],
            0,
            false,
        )
        .unwrap();
        let aos = ao_basis(&mol);
        // 1s, 2s, 2px, 2py, 2pz
        assert_eq!(aos.len(), 5);
        assert_eq!(aos[2].powers, [1, 0, 0]);
        assert_eq!(aos[4].powers, [0, 0, 1]);
    }

    #[test]
    fn beryllium_shells() {
        let shells = load_basis(Element::Be);
        assert_eq!(shells.len(), 3);
        assert_eq!(
            shells.iter().map(|s| s.angular_momentum).collect::<Vec<_>>(),
            vec![0, 0, 1]
        );
    }

    #[test]
    fn unsupported_element() {
        assert!("He".parse::<Element>().is_err());
    }
}
