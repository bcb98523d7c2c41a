//! Analytic one- and two-electron integrals over contracted Cartesian
//! Gaussians (s and p), evaluated with Hermite-Gaussian (McMurchie-Davidson)
//! expansions.

use crate::basis::{expand_shells, BasisShell, Cgto};
use crate::molecule::Molecule;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Boys function `F_m(t) = ∫₀¹ u^{2m} exp(-t u²) du`.
///
/// Series for t < 35 (all terms positive, cutoff 1e-16 relative); for
/// t >= 35 the exponentially small tail is below machine precision and the
/// closed asymptotic form is exact, with downward recursion filling the
/// family. Absolute accuracy is better than 1e-13 for m <= 20.
pub fn boys(m: usize, t: f64) -> f64 {
    boys_family(m, t)[m]
}

/// `F_0(t) ... F_{m_max}(t)` in one pass.
pub fn boys_family(m_max: usize, t: f64) -> Vec<f64> {
    debug_assert!(t >= 0.0 && m_max <= 20);
    let mut f = vec![0.0; m_max + 1];
    if t < 35.0 {
        // series at the top order, then downward recursion
        let m = m_max as f64;
        let mut term = 1.0 / (2.0 * m + 1.0);
        let mut sum = term;
        let mut k = 0.0;
        loop {
            term *= 2.0 * t / (2.0 * m + 2.0 * k + 3.0);
            sum += term;
            k += 1.0;
            if term < 1e-16 * sum {
                break;
            }
        }
        f[m_max] = (-t).exp() * sum;
    } else {
        let mut v = 0.5 * (PI / t).sqrt();
        for k in 1..=m_max {
            v *= (2.0 * k as f64 - 1.0) / (2.0 * t);
        }
        f[m_max] = v;
    }
    let emt = (-t).exp();
    for m in (0..m_max).rev() {
        f[m] = (2.0 * t * f[m + 1] + emt) / (2.0 * m as f64 + 1.0);
    }
    f
}

/// Hermite expansion coefficient E_t^{ij} for the 1-D product of Gaussians
/// with exponents `a`, `b` separated by `q = A - B`. Includes the
/// exp(-mu q^2) prefactor.
fn hermite_e(i: i32, j: i32, t: i32, q: f64, a: f64, b: f64) -> f64 {
    let p = a + b;
    if t < 0 || t > i + j {
        0.0
    } else if i == 0 && j == 0 {
        (-a * b / p * q * q).exp()
    } else if j == 0 {
        // bring down i
        hermite_e(i - 1, j, t - 1, q, a, b) / (2.0 * p)
            - (b * q / p) * hermite_e(i - 1, j, t, q, a, b)
            + (t + 1) as f64 * hermite_e(i - 1, j, t + 1, q, a, b)
    } else {
        hermite_e(i, j - 1, t - 1, q, a, b) / (2.0 * p)
            + (a * q / p) * hermite_e(i, j - 1, t, q, a, b)
            + (t + 1) as f64 * hermite_e(i, j - 1, t + 1, q, a, b)
    }
}

/// Hermite Coulomb integral R^n_{tuv} by downward recursion over the
/// Cartesian orders; `f` holds the Boys family at `p * |PC|^2`.
fn hermite_r(t: i32, u: i32, v: i32, n: usize, p: f64, d: [f64; 3], f: &[f64]) -> f64 {
    if t < 0 || u < 0 || v < 0 {
        0.0
    } else if t == 0 && u == 0 && v == 0 {
        (-2.0 * p).powi(n as i32) * f[n]
    } else if t > 0 {
        (t - 1) as f64 * hermite_r(t - 2, u, v, n + 1, p, d, f)
            + d[0] * hermite_r(t - 1, u, v, n + 1, p, d, f)
    } else if u > 0 {
        (u - 1) as f64 * hermite_r(t, u - 2, v, n + 1, p, d, f)
            + d[1] * hermite_r(t, u - 1, v, n + 1, p, d, f)
    } else {
        (v - 1) as f64 * hermite_r(t, u, v - 2, n + 1, p, d, f)
            + d[2] * hermite_r(t, u, v - 1, n + 1, p, d, f)
    }
}

fn s1d(i: i32, j: i32, q: f64, a: f64, b: f64) -> f64 {
    hermite_e(i, j, 0, q, a, b) * (PI / (a + b)).sqrt()
}

fn prim_overlap(pa: &[f64; 3], pb: &[f64; 3], la: &[u8; 3], lb: &[u8; 3], a: f64, b: f64) -> f64 {
    (0..3)
        .map(|ax| s1d(la[ax] as i32, lb[ax] as i32, pa[ax] - pb[ax], a, b))
        .product()
}

fn prim_kinetic(pa: &[f64; 3], pb: &[f64; 3], la: &[u8; 3], lb: &[u8; 3], a: f64, b: f64) -> f64 {
    let s: Vec<f64> = (0..3)
        .map(|ax| s1d(la[ax] as i32, lb[ax] as i32, pa[ax] - pb[ax], a, b))
        .collect();
    let t1d = |ax: usize| -> f64 {
        let (i, j) = (la[ax] as i32, lb[ax] as i32);
        let q = pa[ax] - pb[ax];
        -2.0 * b * b * s1d(i, j + 2, q, a, b)
            + b * (2 * j + 1) as f64 * s1d(i, j, q, a, b)
            - 0.5 * (j * (j - 1)) as f64 * s1d(i, j - 2, q, a, b)
    };
    t1d(0) * s[1] * s[2] + s[0] * t1d(1) * s[2] + s[0] * s[1] * t1d(2)
}

/// Attraction to a unit positive charge at `c` (caller supplies -Z).
fn prim_nuclear(
    pa: &[f64; 3],
    pb: &[f64; 3],
    la: &[u8; 3],
    lb: &[u8; 3],
    a: f64,
    b: f64,
    c: &[f64; 3],
) -> f64 {
    let p = a + b;
    let pc: [f64; 3] = std::array::from_fn(|ax| (a * pa[ax] + b * pb[ax]) / p - c[ax]);
    let l_tot = (la.iter().sum::<u8>() + lb.iter().sum::<u8>()) as usize;
    let f = boys_family(l_tot, p * (pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2]));
    let mut v = 0.0;
    for t in 0..=(la[0] + lb[0]) as i32 {
        for u in 0..=(la[1] + lb[1]) as i32 {
            for w in 0..=(la[2] + lb[2]) as i32 {
                v += hermite_e(la[0] as i32, lb[0] as i32, t, pa[0] - pb[0], a, b)
                    * hermite_e(la[1] as i32, lb[1] as i32, u, pa[1] - pb[1], a, b)
                    * hermite_e(la[2] as i32, lb[2] as i32, w, pa[2] - pb[2], a, b)
                    * hermite_r(t, u, w, 0, p, pc, &f);
            }
        }
    }
    2.0 * PI / p * v
}

#[allow(clippy::too_many_arguments)]
fn prim_eri(
    pa: &[f64; 3], la: &[u8; 3], a: f64,
    pb: &[f64; 3], lb: &[u8; 3], b: f64,
    pc: &[f64; 3], lc: &[u8; 3], c: f64,
    pd: &[f64; 3], ld: &[u8; 3], d: f64,
) -> f64 {
    let p = a + b;
    let q = c + d;
    let alpha = p * q / (p + q);
    let pp: [f64; 3] = std::array::from_fn(|ax| (a * pa[ax] + b * pb[ax]) / p);
    let qq: [f64; 3] = std::array::from_fn(|ax| (c * pc[ax] + d * pd[ax]) / q);
    let pq: [f64; 3] = std::array::from_fn(|ax| pp[ax] - qq[ax]);
    let l_tot = (la.iter().sum::<u8>()
        + lb.iter().sum::<u8>()
        + lc.iter().sum::<u8>()
        + ld.iter().sum::<u8>()) as usize;
    let f = boys_family(l_tot, alpha * (pq[0] * pq[0] + pq[1] * pq[1] + pq[2] * pq[2]));

    let mut total = 0.0;
    for t in 0..=(la[0] + lb[0]) as i32 {
        for u in 0..=(la[1] + lb[1]) as i32 {
            for v in 0..=(la[2] + lb[2]) as i32 {
                let e_bra = hermite_e(la[0] as i32, lb[0] as i32, t, pa[0] - pb[0], a, b)
                    * hermite_e(la[1] as i32, lb[1] as i32, u, pa[1] - pb[1], a, b)
                    * hermite_e(la[2] as i32, lb[2] as i32, v, pa[2] - pb[2], a, b);
                if e_bra == 0.0 {
                    continue;
                }
                for tp in 0..=(lc[0] + ld[0]) as i32 {
                    for up in 0..=(lc[1] + ld[1]) as i32 {
                        for vp in 0..=(lc[2] + ld[2]) as i32 {
                            let e_ket =
                                hermite_e(lc[0] as i32, ld[0] as i32, tp, pc[0] - pd[0], c, d)
                                    * hermite_e(lc[1] as i32, ld[1] as i32, up, pc[1] - pd[1], c, d)
                                    * hermite_e(lc[2] as i32, ld[2] as i32, vp, pc[2] - pd[2], c, d);
                            if e_ket == 0.0 {
                                continue;
                            }
                            let sign = if (tp + up + vp) % 2 == 0 { 1.0 } else { -1.0 };
                            total += e_bra
                                * e_ket
                                * sign
                                * hermite_r(t + tp, u + up, v + vp, 0, alpha, pq, &f);
                        }
                    }
                }
            }
        }
    }
    2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt()) * total
}

fn contracted<F: FnMut(f64, f64) -> f64>(a: &Cgto, b: &Cgto, mut prim: F) -> f64 {
    let mut v = 0.0;
    for (&ea, &ca) in a.exponents.iter().zip(&a.coefficients) {
        for (&eb, &cb) in b.exponents.iter().zip(&b.coefficients) {
            v += ca * cb * prim(ea, eb);
        }
    }
    v
}

/// Dense n^4 two-electron tensor in chemist notation `(ij|kl)`.
#[derive(Debug, Clone)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.data[((i * self.n + j) * self.n + k) * self.n + l] = v;
    }
}

/// S, T, V matrices and the ERI tensor over the AO basis, Hartree units.
#[derive(Debug, Clone)]
pub struct AoIntegrals {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear_attraction: DMatrix<f64>,
    pub eri: Tensor4,
}

impl AoIntegrals {
    pub fn n_basis(&self) -> usize {
        self.overlap.nrows()
    }

    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.nuclear_attraction
    }
}

/// Evaluate all AO integrals for a molecule over the given shells.
pub fn compute_ao_integrals(molecule: &Molecule, shells: &[BasisShell]) -> AoIntegrals {
    let aos = expand_shells(molecule, shells);
    compute_ao_integrals_cgtos(molecule, &aos)
}

pub(crate) fn compute_ao_integrals_cgtos(molecule: &Molecule, aos: &[Cgto]) -> AoIntegrals {
    let n = aos.len();
    let mut overlap = DMatrix::zeros(n, n);
    let mut kinetic = DMatrix::zeros(n, n);
    let mut nuclear = DMatrix::zeros(n, n);

    let nuclei: Vec<([f64; 3], f64)> = (0..molecule.n_atoms())
        .map(|k| {
            (
                molecule.atom_position(k),
                molecule.symbols()[k].atomic_number() as f64,
            )
        })
        .collect();

    for i in 0..n {
        for j in 0..=i {
            let (fa, fb) = (&aos[i], &aos[j]);
            let s = contracted(fa, fb, |a, b| {
                prim_overlap(&fa.center, &fb.center, &fa.powers, &fb.powers, a, b)
            });
            let t = contracted(fa, fb, |a, b| {
                prim_kinetic(&fa.center, &fb.center, &fa.powers, &fb.powers, a, b)
            });
            let mut v = 0.0;
            for (pos, z) in &nuclei {
                v -= z * contracted(fa, fb, |a, b| {
                    prim_nuclear(&fa.center, &fb.center, &fa.powers, &fb.powers, a, b, pos)
                });
            }
            overlap[(i, j)] = s;
            overlap[(j, i)] = s;
            kinetic[(i, j)] = t;
            kinetic[(j, i)] = t;
            nuclear[(i, j)] = v;
            nuclear[(j, i)] = v;
        }
    }

    let mut eri = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let ij = i * (i + 1) / 2 + j;
            for k in 0..n {
                for l in 0..=k {
                    let kl = k * (k + 1) / 2 + l;
                    if ij < kl {
                        continue;
                    }
                    let (fa, fb, fc, fd) = (&aos[i], &aos[j], &aos[k], &aos[l]);
                    let mut val = 0.0;
                    for (&ea, &ca) in fa.exponents.iter().zip(&fa.coefficients) {
                        for (&eb, &cb) in fb.exponents.iter().zip(&fb.coefficients) {
                            for (&ec, &cc) in fc.exponents.iter().zip(&fc.coefficients) {
                                for (&ed, &cd) in fd.exponents.iter().zip(&fd.coefficients) {
                                    val += ca * cb * cc * cd
                                        * prim_eri(
                                            &fa.center, &fa.powers, ea,
                                            &fb.center, &fb.powers, eb,
                                            &fc.center, &fc.powers, ec,
                                            &fd.center, &fd.powers, ed,
                                        );
                                }
                            }
                        }
                    }
                    for (x, y) in [(i, j), (j, i)] {
                        for (u, w) in [(k, l), (l, k)] {
                            eri.set(x, y, u, w, val);
                            eri.set(u, w, x, y, val);
                        }
                    }
                }
            }
        }
    }

    let smallest = crate::linalg::sym_eigh(&overlap).0[0];
    if smallest < 1e-8 {
        log::warn!("AO overlap is nearly linearly dependent (smallest eigenvalue {smallest:.3e})");
    }

    AoIntegrals {
        overlap,
        kinetic,
        nuclear_attraction: nuclear,
        eri,
    }
}

/// Overlap between two AO bases at (possibly) different geometries. Rows
/// index `bra`, columns `ket`.
pub(crate) fn overlap_between(bra: &[Cgto], ket: &[Cgto]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(bra.len(), ket.len());
    for (i, fa) in bra.iter().enumerate() {
        for (j, fb) in ket.iter().enumerate() {
            s[(i, j)] = contracted(fa, fb, |a, b| {
                prim_overlap(&fa.center, &fb.center, &fa.powers, &fb.powers, a, b)
            });
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ao_basis;
    use crate::molecule::Element;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

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
    fn boys_at_zero() {
        assert_abs_diff_eq!(boys(0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(boys(1, 0.0), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(boys(7, 0.0), 1.0 / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn boys_pinned_values() {
        // F_0(1) = sqrt(pi)/2 * erf(1); remaining values pinned with an
        // independent incomplete-gamma evaluation.
        assert_abs_diff_eq!(boys(0, 1.0), 0.7468241328124271, epsilon = 1e-13);
        assert_abs_diff_eq!(boys(2, 7.5), 0.004270013619430555, epsilon = 1e-13);
        assert_abs_diff_eq!(boys(4, 20.0), 8.127855549358838e-06, epsilon = 1e-15);
        assert_abs_diff_eq!(boys(8, 12.0), 4.148441054539183e-06, epsilon = 1e-15);
        assert_abs_diff_eq!(boys(0, 35.0), 0.14979969134027404, epsilon = 1e-13);
    }

    #[test]
    fn boys_downward_recursion_property() {
        for &t in &[0.0, 0.3, 1.7, 5.0, 11.9, 12.1, 19.0, 30.0] {
            for m in 0..12 {
                let lhs = boys(m, t);
                let rhs = (2.0 * t * boys(m + 1, t) + (-t).exp()) / (2.0 * m as f64 + 1.0);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn single_s_function_overlap_and_eri_scaling() {
        // one normalized primitive s function
        let f = Cgto {
            center: [0.0; 3],
            powers: [0, 0, 0],
            exponents: vec![0.9],
            coefficients: vec![(2.0 * 0.9 / PI).powf(0.75)],
        };
        let s = contracted(&f, &f, |a, b| {
            prim_overlap(&f.center, &f.center, &f.powers, &f.powers, a, b)
        });
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);

        let self_eri = |alpha: f64| {
            let norm = (2.0 * alpha / PI).powf(0.75);
            let g = Cgto {
                center: [0.0; 3],
                powers: [0, 0, 0],
                exponents: vec![alpha],
                coefficients: vec![norm],
            };
            prim_eri(
                &g.center, &g.powers, alpha, &g.center, &g.powers, alpha,
                &g.center, &g.powers, alpha, &g.center, &g.powers, alpha,
            ) * g.coefficients[0].powi(4)
        };
        // (00|00) for a single normalized s Gaussian is 2*sqrt(alpha/pi):
        // doubling via sqrt(2a/pi) scaling law
        assert_relative_eq!(self_eri(0.9), 2.0 * (0.9f64 / PI).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(self_eri(3.6) / self_eri(0.9), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn h2_overlap_pinned() {
        // off-diagonal overlap pinned by an independent reference program
        let mol = h2(1.388948601621);
        let ints = compute_ao_integrals_cgtos(&mol, &ao_basis(&mol));
        assert_abs_diff_eq!(ints.overlap[(0, 0)], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ints.overlap[(0, 1)], 0.6631457753329671, epsilon = 1e-9);
    }

    #[test]
    fn kinetic_symmetric() {
        let mol = Molecule::new(
            vec![Element::O, Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 1.5, 0.9, -0.3, -1.4, 1.0, 0.2],
            0,
            false,
        )
        .unwrap();
        let ints = compute_ao_integrals_cgtos(&mol, &ao_basis(&mol));
        let n = ints.n_basis();
        assert_eq!(n, 7);
        for i in 0..n {
            for j in 0..n {
                assert_abs_diff_eq!(
                    ints.kinetic[(i, j)],
                    ints.kinetic[(j, i)],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn eri_eightfold_symmetry() {
        let mol = Molecule::new(
            vec![Element::Be, Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 0.3, 0.1, 2.5, -0.2, 0.4, -2.4],
            0,
            false,
        )
        .unwrap();
        let ints = compute_ao_integrals_cgtos(&mol, &ao_basis(&mol));
        let n = ints.n_basis();
        let e = &ints.eri;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = e.get(i, j, k, l);
                        for w in [
                            e.get(j, i, k, l),
                            e.get(i, j, l, k),
                            e.get(j, i, l, k),
                            e.get(k, l, i, j),
                            e.get(l, k, i, j),
                            e.get(k, l, j, i),
                            e.get(l, k, j, i),
                        ] {
                            assert_abs_diff_eq!(v, w, epsilon = 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn translation_leaves_core_spectrum() {
        let base = vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.46];
        let mol = h2(1.46);
        let ints = compute_ao_integrals_cgtos(&mol, &ao_basis(&mol));
        let shifted: Vec<f64> = base
            .chunks(3)
            .flat_map(|p| vec![p[0] + 2.0, p[1] - 1.0, p[2] + 0.5])
            .collect();
        let mol2 = mol.with_coordinates(&shifted).unwrap();
        let ints2 = compute_ao_integrals_cgtos(&mol2, &ao_basis(&mol2));

        // S, T, ERI identical
        assert_abs_diff_eq!(
            (&ints.overlap - &ints2.overlap).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            (&ints.kinetic - &ints2.kinetic).norm(),
            0.0,
            epsilon = 1e-12
        );
        // core Hamiltonian spectrum invariant
        let v1 = crate::linalg::sym_eigh(&ints.core_hamiltonian()).0;
        let v2 = crate::linalg::sym_eigh(&ints2.core_hamiltonian()).0;
        for (a, b) in v1.iter().zip(&v2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }
}
