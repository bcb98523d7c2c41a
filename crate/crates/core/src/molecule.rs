//! Molecular data model: elements, geometries, unit handling and the
//! line-oriented input format.

use crate::{Error, Result, ANGSTROM_TO_BOHR};
use std::fmt;
use std::str::FromStr;

/// Elements with embedded STO-3G data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Element {
    H,
    Be,
    O,
}

impl Element {
    pub fn atomic_number(self) -> u32 {
        match self {
            Element::H => 1,
            Element::Be => 4,
            Element::O => 8,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Element::H => "H",
            Element::Be => "Be",
            Element::O => "O",
        }
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(Element::H),
            "Be" => Ok(Element::Be),
            "O" => Ok(Element::O),
            other => Err(Error::UnsupportedElement(other.to_string())),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A closed-shell molecule. Coordinates are flat `[x0, y0, z0, x1, ...]` in
/// Bohr; Ångström appears only at the I/O boundary.
#[derive(Debug, Clone)]
pub struct Molecule {
    symbols: Vec<Element>,
    coordinates: Vec<f64>,
    net_charge: i32,
    frozen_core: bool,
}

/// Minimum allowed internuclear separation in Bohr.
const MIN_SEPARATION: f64 = 0.1;

impl Molecule {
    /// Build a molecule from element symbols and Bohr coordinates,
    /// validating the closed-shell invariants.
    pub fn new(
        symbols: Vec<Element>,
        coordinates: Vec<f64>,
        net_charge: i32,
        frozen_core: bool,
    ) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Invalid("molecule has no atoms".into()));
        }
        if coordinates.len() != 3 * symbols.len() {
            return Err(Error::Invalid(format!(
                "expected {} coordinates for {} atoms, got {}",
                3 * symbols.len(),
                symbols.len(),
                coordinates.len()
            )));
        }
        let z_total: i64 = symbols.iter().map(|s| s.atomic_number() as i64).sum();
        let n_elec = z_total - net_charge as i64;
        if n_elec < 2 || n_elec % 2 != 0 {
            return Err(Error::Invalid(format!(
                "electron count {n_elec} is not an even number >= 2 (closed-shell singlets only)"
            )));
        }
        let mol = Molecule {
            symbols,
            coordinates,
            net_charge,
            frozen_core,
        };
        for i in 0..mol.n_atoms() {
            for j in 0..i {
                let d = mol.distance(i, j);
                if d < MIN_SEPARATION {
                    return Err(Error::Invalid(format!(
                        "atoms {j} and {i} are {d:.4} Bohr apart (< {MIN_SEPARATION})"
                    )));
                }
            }
        }
        Ok(mol)
    }

    /// Same molecule at new coordinates, re-validated.
    pub fn with_coordinates(&self, coordinates: &[f64]) -> Result<Self> {
        Molecule::new(
            self.symbols.clone(),
            coordinates.to_vec(),
            self.net_charge,
            self.frozen_core,
        )
    }

    pub fn n_atoms(&self) -> usize {
        self.symbols.len()
    }

    pub fn n_electrons(&self) -> usize {
        let z: i64 = self.symbols.iter().map(|s| s.atomic_number() as i64).sum();
        (z - self.net_charge as i64) as usize
    }

    pub fn symbols(&self) -> &[Element] {
        &self.symbols
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    pub fn net_charge(&self) -> i32 {
        self.net_charge
    }

    pub fn frozen_core(&self) -> bool {
        self.frozen_core
    }

    /// Number of frozen spatial orbitals: one 1s core per non-hydrogen atom.
    pub fn n_core_orbitals(&self) -> usize {
        if !self.frozen_core {
            return 0;
        }
        self.symbols.iter().filter(|s| **s != Element::H).count()
    }

    pub fn atom_position(&self, i: usize) -> [f64; 3] {
        [
            self.coordinates[3 * i],
            self.coordinates[3 * i + 1],
            self.coordinates[3 * i + 2],
        ]
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        let a = self.atom_position(i);
        let b = self.atom_position(j);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// Parse the line-oriented input format:
    ///
    /// ```text
    /// charge = <integer>
    /// basis = sto-3g
    /// frozen_core = <true|false>
    /// unit = <angstrom|bohr>
    /// geometry:
    ///   <Element> <x> <y> <z>
    /// ```
    ///
    /// Lines starting with `#` are comments. The geometry block ends at EOF
    /// or at the next `key = value` line. The `unit` key is required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut charge: i32 = 0;
        let mut frozen_core = false;
        let mut unit: Option<&str> = None;
        let mut in_geometry = false;
        let mut symbols = Vec::new();
        let mut coords = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                // a key = value line always terminates a geometry block
                in_geometry = false;
                let key = key.trim();
                let value = value.trim();
                match key {
                    "charge" => {
                        charge = value.parse().map_err(|_| {
                            Error::Input(format!("line {}: bad charge {value:?}", lineno + 1))
                        })?;
                    }
                    "basis" => {
                        if !value.eq_ignore_ascii_case("sto-3g") {
                            return Err(Error::Input(format!(
                                "line {}: unsupported basis {value:?} (only sto-3g)",
                                lineno + 1
                            )));
                        }
                    }
                    "frozen_core" => {
                        frozen_core = match value {
                            "true" => true,
                            "false" => false,
                            _ => {
                                return Err(Error::Input(format!(
                                    "line {}: frozen_core must be true or false",
                                    lineno + 1
                                )))
                            }
                        };
                    }
                    "unit" => match value.to_ascii_lowercase().as_str() {
                        "angstrom" | "bohr" => unit = Some(if value.eq_ignore_ascii_case("bohr") { "bohr" } else { "angstrom" }),
                        _ => {
                            return Err(Error::Input(format!(
                                "line {}: unit must be angstrom or bohr",
                                lineno + 1
                            )))
                        }
                    },
                    other => {
                        return Err(Error::Input(format!(
                            "line {}: unknown key {other:?}",
                            lineno + 1
                        )))
                    }
                }
            } else if line == "geometry:" {
                in_geometry = true;
            } else if in_geometry {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 4 {
                    return Err(Error::Input(format!(
                        "line {}: expected `<Element> <x> <y> <z>`, got {line:?}",
                        lineno + 1
                    )));
                }
                symbols.push(fields[0].parse::<Element>()?);
                for f in &fields[1..] {
                    coords.push(f.parse::<f64>().map_err(|_| {
                        Error::Input(format!("line {}: bad coordinate {f:?}", lineno + 1))
                    })?);
                }
            } else {
                return Err(Error::Input(format!(
                    "line {}: unexpected line {line:?}",
                    lineno + 1
                )));
            }
        }

        if symbols.is_empty() {
            return Err(Error::Input("empty geometry block".into()));
        }
        let unit = unit.ok_or_else(|| Error::Input("missing required key `unit`".into()))?;
        if unit == "angstrom" {
            for c in &mut coords {
                *c *= ANGSTROM_TO_BOHR;
            }
        }
        Molecule::new(symbols, coords, charge, frozen_core)
    }

    /// Serialize back to the input format (Bohr, full precision). Parsing
    /// the output reproduces the coordinates exactly.
    pub fn to_input_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("charge = {}\n", self.net_charge));
        out.push_str("basis = sto-3g\n");
        out.push_str(&format!("frozen_core = {}\n", self.frozen_core));
        out.push_str("unit = bohr\n");
        out.push_str("geometry:\n");
        for (i, s) in self.symbols.iter().enumerate() {
            let p = self.atom_position(i);
            out.push_str(&format!(
                "  {} {:.17e} {:.17e} {:.17e}\n",
                s, p[0], p[1], p[2]
            ));
        }
        out
    }

    /// Standard XYZ text (Ångström).
    pub fn to_xyz(&self, comment: &str) -> String {
        let mut out = format!("{}\n{}\n", self.n_atoms(), comment);
        for (i, s) in self.symbols.iter().enumerate() {
            let p = self.atom_position(i);
            out.push_str(&format!(
                "{:<2} {:>16.10} {:>16.10} {:>16.10}\n",
                s,
                p[0] / ANGSTROM_TO_BOHR,
                p[1] / ANGSTROM_TO_BOHR,
                p[2] / ANGSTROM_TO_BOHR
            ));
        }
        out
    }
}

/// Bond length (Å) and, for triatomics, the angle at the central atom
/// (degrees).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryParams {
    pub bond_length: f64,
    pub bond_angle: Option<f64>,
}

/// Coulomb repulsion of the nuclei, Σ Z_A Z_B / R_AB, in Hartree.
pub fn nuclear_repulsion(molecule: &Molecule) -> f64 {
    let mut e = 0.0;
    for i in 0..molecule.n_atoms() {
        for j in 0..i {
            let z = (molecule.symbols()[i].atomic_number()
                * molecule.symbols()[j].atomic_number()) as f64;
            e += z / molecule.distance(i, j);
        }
    }
    e
}

/// Extract bond length / angle for di- and triatomics. Returns `None` for
/// molecules where the two-parameter description does not apply; callers
/// should report raw coordinates instead.
pub fn geometry_params(molecule: &Molecule) -> Option<GeometryParams> {
    match molecule.n_atoms() {
        2 => Some(GeometryParams {
            bond_length: molecule.distance(0, 1) / ANGSTROM_TO_BOHR,
            bond_angle: None,
        }),
        3 => {
            // Central atom: the unique heavy atom if there is one, otherwise
            // the vertex whose two bonds are most nearly equal.
            let heavy: Vec<usize> = (0..3)
                .filter(|&i| molecule.symbols()[i] != Element::H)
                .collect();
            let center = if heavy.len() == 1 {
                heavy[0]
            } else {
                (0..3)
                    .min_by(|&a, &b| {
                        let asym = |c: usize| {
                            let others: Vec<usize> = (0..3).filter(|&k| k != c).collect();
                            (molecule.distance(c, others[0])
                                - molecule.distance(c, others[1]))
                            .abs()
                        };
                        asym(a).total_cmp(&asym(b))
                    })
                    .unwrap()
            };
            let others: Vec<usize> = (0..3).filter(|&k| k != center).collect();
            let d1 = molecule.distance(center, others[0]);
            let d2 = molecule.distance(center, others[1]);
            let c = molecule.atom_position(center);
            let u: Vec<f64> = (0..3)
                .map(|k| molecule.atom_position(others[0])[k] - c[k])
                .collect();
            let v: Vec<f64> = (0..3)
                .map(|k| molecule.atom_position(others[1])[k] - c[k])
                .collect();
            let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
            let cosang = (dot / (d1 * d2)).clamp(-1.0, 1.0);
            Some(GeometryParams {
                bond_length: d1.min(d2) / ANGSTROM_TO_BOHR,
                bond_angle: Some(cosang.acos().to_degrees()),
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn h2(d_bohr: f64) -> Molecule {
        Molecule::new(
            vec![Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, d_bohr],
            0,
            false,
        )
        .unwrap()
    }

    #[test]
    fn parse_h2_angstrom() {
        let text = "charge = 0\nbasis = sto-3g\nfrozen_core = false\nunit = angstrom\n\
                    geometry:\n  H 0 0 0\n  H 0 0 0.735\n";
        let mol = Molecule::parse(text).unwrap();
        assert_eq!(mol.n_atoms(), 2);
        assert_eq!(mol.n_electrons(), 2);
        // hand conversion: 0.735 * 1.8897259886
        assert_abs_diff_eq!(mol.coordinates()[5], 1.38894860162, epsilon = 1e-10);
    }

    #[test]
    fn parse_h3_plus() {
        let text = "charge = 1\nunit = bohr\ngeometry:\n  H 0 0 0\n  H 1.8 0 0\n  H 0.9 1.6 0\n";
        let mol = Molecule::parse(text).unwrap();
        assert_eq!(mol.n_electrons(), 2);
    }

    #[test]
    fn parse_empty_geometry_is_error() {
        let text = "charge = 0\nunit = bohr\ngeometry:\n";
        assert!(Molecule::parse(text).is_err());
    }

    #[test]
    fn parse_missing_unit_is_error() {
        let text = "charge = 0\ngeometry:\n  H 0 0 0\n  H 0 0 1.4\n";
        let err = Molecule::parse(text).unwrap_err();
        assert!(err.to_string().contains("unit"));
    }

    #[test]
    fn parse_unknown_element_is_error() {
        let text = "unit = bohr\ngeometry:\n  He 0 0 0\n  H 0 0 1.4\n";
        assert!(matches!(
            Molecule::parse(text),
            Err(Error::UnsupportedElement(_))
        ));
    }

    #[test]
    fn parse_odd_electrons_is_error() {
        let text = "unit = bohr\ngeometry:\n  H 0 0 0\n  H 0 0 1.4\n  H 0 0 2.8\n";
        assert!(Molecule::parse(text).is_err());
    }

    #[test]
    fn parse_comments_and_malformed_lines() {
        let ok = "# a comment\nunit = bohr\ngeometry:\n# inside block\n  H 0 0 0\n  H 0 0 1.4\n";
        assert!(Molecule::parse(ok).is_ok());
        let bad = "unit = bohr\ngeometry:\n  H 0 0\n  H 0 0 1.4\n";
        assert!(Molecule::parse(bad).is_err());
    }

    #[test]
    fn roundtrip_exact() {
        let text = "charge = 1\nunit = angstrom\ngeometry:\n  H 0.1 -0.2 0.3\n  H 0.9 0.8 -0.7\n  H 1.7 -0.4 0.2\n";
        let mol = Molecule::parse(text).unwrap();
        let mol2 = Molecule::parse(&mol.to_input_string()).unwrap();
        for (a, b) in mol.coordinates().iter().zip(mol2.coordinates()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn repulsion_single_values() {
        // lone He-like case is excluded (needs >= 2 electrons); use H- anion? no:
        // single atom with even electrons: O^0 has 8 electrons.
        let mol = Molecule::new(vec![Element::O], vec![0.0, 0.0, 0.0], 0, false).unwrap();
        assert_eq!(nuclear_repulsion(&mol), 0.0);

        let mol = h2(1.38897);
        assert_relative_eq!(nuclear_repulsion(&mol), 1.0 / 1.38897, epsilon = 1e-12);

        // equilateral triangle, side 1.8633 Bohr
        let s = 1.8633;
        let h = s * 3f64.sqrt() / 2.0;
        let mol = Molecule::new(
            vec![Element::H, Element::H, Element::H],
            vec![0.0, 0.0, 0.0, s, 0.0, 0.0, s / 2.0, h, 0.0],
            1,
            false,
        )
        .unwrap();
        assert_relative_eq!(nuclear_repulsion(&mol), 3.0 / 1.8633, epsilon = 1e-10);
    }

    #[test]
    fn repulsion_rigid_motion_invariant() {
        let s = 1.9;
        let base = vec![0.0, 0.0, 0.0, s, 0.0, 0.0, s / 2.0, 1.5, 0.0];
        let mol = Molecule::new(vec![Element::H; 3], base.clone(), 1, false).unwrap();
        let e0 = nuclear_repulsion(&mol);

        // translate + rotate about z by 0.7 rad
        let (c, sn) = (0.7f64.cos(), 0.7f64.sin());
        let moved: Vec<f64> = base
            .chunks(3)
            .flat_map(|p| {
                vec![
                    c * p[0] - sn * p[1] + 3.0,
                    sn * p[0] + c * p[1] - 1.0,
                    p[2] + 0.5,
                ]
            })
            .collect();
        let mol2 = mol.with_coordinates(&moved).unwrap();
        assert_abs_diff_eq!(nuclear_repulsion(&mol2), e0, epsilon = 1e-12);

        let g0 = geometry_params(&mol).unwrap();
        let g1 = geometry_params(&mol2).unwrap();
        assert_abs_diff_eq!(g0.bond_length, g1.bond_length, epsilon = 1e-10);
        assert_abs_diff_eq!(
            g0.bond_angle.unwrap(),
            g1.bond_angle.unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn coincident_nuclei_rejected() {
        let r = Molecule::new(
            vec![Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.05],
            0,
            false,
        );
        assert!(r.is_err());
    }

    #[test]
    fn geometry_params_diatomic() {
        let g = geometry_params(&h2(1.38894860162)).unwrap();
        assert_abs_diff_eq!(g.bond_length, 0.735, epsilon = 1e-10);
        assert!(g.bond_angle.is_none());
    }

    #[test]
    fn geometry_params_collinear_and_equilateral() {
        let mol = Molecule::new(
            vec![Element::H, Element::Be, Element::H],
            vec![0.0, 0.0, -2.5, 0.0, 0.0, 0.0, 0.0, 0.0, 2.5],
            0,
            false,
        )
        .unwrap();
        let g = geometry_params(&mol).unwrap();
        assert_abs_diff_eq!(g.bond_angle.unwrap(), 180.0, epsilon = 1e-10);

        let s = 1.86;
        let mol = Molecule::new(
            vec![Element::H; 3],
            vec![0.0, 0.0, 0.0, s, 0.0, 0.0, s / 2.0, s * 3f64.sqrt() / 2.0, 0.0],
            1,
            false,
        )
        .unwrap();
        let g = geometry_params(&mol).unwrap();
        assert_abs_diff_eq!(g.bond_angle.unwrap(), 60.0, epsilon = 1e-10);
    }
}
