//! Restricted Hartree-Fock, MO-basis integral transformation and the
//! frozen-core active-space reduction.

use crate::integrals::{AoIntegrals, Tensor4};
use crate::molecule::{nuclear_repulsion, Molecule};
use crate::{Error, Result};
use nalgebra::DMatrix;
use std::collections::VecDeque;

const MAX_ITERATIONS: usize = 200;
const ENERGY_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-8;
const DIIS_SUBSPACE: usize = 8;

/// Converged (or flagged) self-consistent-field solution.
///
/// MO columns are ordered by ascending orbital energy and sign-fixed so the
/// largest-magnitude coefficient of each column is positive (ties broken by
/// lowest AO index). Downstream finite differences rely on this convention.
#[derive(Debug, Clone)]
pub struct ScfResult {
    pub mo_coefficients: DMatrix<f64>,
    pub orbital_energies: Vec<f64>,
    /// Total energy including nuclear repulsion (Ha).
    pub hf_energy: f64,
    pub density: DMatrix<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Full-space MO integrals: `one_body[p][q] = h_pq`, `two_body` is the
/// physicist-notation tensor `<pq|rs>`.
#[derive(Debug, Clone)]
pub struct MoIntegrals {
    pub one_body: DMatrix<f64>,
    pub two_body: Tensor4,
}

/// Integrals over the active orbitals plus the frozen-core constant.
#[derive(Debug, Clone)]
pub struct ActiveSpaceIntegrals {
    pub one_body: DMatrix<f64>,
    /// Physicist notation `<pq|rs>` over active spatial MOs.
    pub two_body: Tensor4,
    /// Nuclear repulsion plus the frozen-core mean-field energy (Ha).
    pub core_energy: f64,
    pub n_active_electrons: usize,
    pub n_active_orbitals: usize,
}

fn sorted_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    crate::linalg::sym_eigh(m)
}

fn lowdin(s: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sorted_eigh(s);
    let inv_sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| v.sqrt().recip()),
    ));
    &vecs * inv_sqrt * vecs.transpose()
}

/// Fix each MO column's sign: largest-magnitude coefficient positive,
/// ties resolved toward the lowest AO index.
fn fix_phases(c: &mut DMatrix<f64>) {
    for mut col in c.column_iter_mut() {
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

fn fock(hcore: &DMatrix<f64>, p: &DMatrix<f64>, eri: &Tensor4) -> DMatrix<f64> {
    let n = hcore.nrows();
    let mut f = hcore.clone();
    for i in 0..n {
        for j in 0..n {
            let mut g = 0.0;
            for k in 0..n {
                for l in 0..n {
                    g += p[(k, l)] * (eri.get(i, j, k, l) - 0.5 * eri.get(i, k, j, l));
                }
            }
            f[(i, j)] += g;
        }
    }
    f
}

fn density_from(c: &DMatrix<f64>, nocc: usize) -> DMatrix<f64> {
    let occ = c.columns(0, nocc);
    2.0 * &occ * occ.transpose()
}

fn solve_fock(f: &DMatrix<f64>, x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let fp = x.transpose() * f * x;
    let (eps, cp) = sorted_eigh(&fp);
    let mut c = x * cp;
    fix_phases(&mut c);
    (eps, c)
}

/// Restricted Hartree-Fock with a core-Hamiltonian guess, symmetric
/// orthogonalization and DIIS. Non-convergence is flagged, not an error;
/// downstream transformations refuse flagged results.
pub fn run_rhf(molecule: &Molecule, ints: &AoIntegrals) -> Result<ScfResult> {
    let n = ints.n_basis();
    let nocc = molecule.n_electrons() / 2;
    if nocc > n {
        return Err(Error::Invalid(format!(
            "{} electron pairs do not fit in {n} orbitals",
            nocc
        )));
    }
    let enuc = nuclear_repulsion(molecule);
    let hcore = ints.core_hamiltonian();
    let x = lowdin(&ints.overlap);

    let (_, mut c) = solve_fock(&hcore, &x);
    let mut p = density_from(&c, nocc);
    let mut eps = vec![0.0; n];
    let mut e_total = 0.0;
    let mut e_old = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    let mut diis: VecDeque<(DMatrix<f64>, DMatrix<f64>)> = VecDeque::new();

    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;
        let f = fock(&hcore, &p, &ints.eri);
        e_total = 0.5 * (&p).component_mul(&(&hcore + &f)).sum() + enuc;

        let err = x.transpose() * (&f * &p * &ints.overlap - &ints.overlap * &p * &f) * &x;
        diis.push_back((f.clone(), err));
        if diis.len() > DIIS_SUBSPACE {
            diis.pop_front();
        }

        let f_use = if iter > 2 && diis.len() >= 2 {
            diis_extrapolate(&diis).unwrap_or(f)
        } else {
            f
        };

        let (eps_new, c_new) = solve_fock(&f_use, &x);
        let p_new = density_from(&c_new, nocc);

        let rms = ((&p_new - &p).map(|v| v * v).sum() / (n * n) as f64).sqrt();
        let de = (e_total - e_old).abs();
        p = p_new;
        c = c_new;
        eps = eps_new;
        e_old = e_total;

        if de < ENERGY_TOL && rms < DENSITY_TOL {
            converged = true;
            break;
        }
    }

    if converged {
        // a few plain Roothaan steps leave every returned quantity mutually
        // consistent well below the convergence thresholds
        for _ in 0..50 {
            let f = fock(&hcore, &p, &ints.eri);
            let (eps_new, c_new) = solve_fock(&f, &x);
            let p_new = density_from(&c_new, nocc);
            let rms = ((&p_new - &p).map(|v| v * v).sum() / (n * n) as f64).sqrt();
            eps = eps_new;
            c = c_new;
            p = p_new;
            if rms < 1e-13 {
                break;
            }
        }
        let f = fock(&hcore, &p, &ints.eri);
        e_total = 0.5 * (&p).component_mul(&(&hcore + &f)).sum() + enuc;
    } else {
        log::warn!("SCF did not converge in {MAX_ITERATIONS} iterations");
    }

    Ok(ScfResult {
        mo_coefficients: c,
        orbital_energies: eps,
        hf_energy: e_total,
        density: p,
        converged,
        iterations,
    })
}

fn diis_extrapolate(history: &VecDeque<(DMatrix<f64>, DMatrix<f64>)>) -> Option<DMatrix<f64>> {
    let m = history.len();
    let mut b = DMatrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            b[(i, j)] = history[i].1.component_mul(&history[j].1).sum();
        }
        b[(i, m)] = -1.0;
        b[(m, i)] = -1.0;
    }
    let mut rhs = nalgebra::DVector::zeros(m + 1);
    rhs[m] = -1.0;
    let coefs = b.lu().solve(&rhs)?;
    let mut f = history[0].0.clone() * coefs[0];
    for i in 1..m {
        f += &history[i].0 * coefs[i];
    }
    Some(f)
}

/// Transform AO integrals to the MO basis. The two-body tensor is reindexed
/// to physicist notation through `<pq|rs> = (pr|qs)`.
pub fn mo_transform(scf: &ScfResult, ints: &AoIntegrals) -> Result<MoIntegrals> {
    if !scf.converged {
        return Err(Error::ScfNotConverged {
            iterations: scf.iterations,
        });
    }
    Ok(mo_transform_unchecked(&scf.mo_coefficients, ints))
}

pub(crate) fn mo_transform_unchecked(c: &DMatrix<f64>, ints: &AoIntegrals) -> MoIntegrals {
    let n = ints.n_basis();
    let one_body = c.transpose() * ints.core_hamiltonian() * c;

    // quarter transforms, O(n^5)
    let mut t1 = Tensor4::zeros(n);
    for p in 0..n {
        for nu in 0..n {
            for la in 0..n {
                for si in 0..n {
                    let mut v = 0.0;
                    for mu in 0..n {
                        v += c[(mu, p)] * ints.eri.get(mu, nu, la, si);
                    }
                    t1.set(p, nu, la, si, v);
                }
            }
        }
    }
    let mut t2 = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for la in 0..n {
                for si in 0..n {
                    let mut v = 0.0;
                    for nu in 0..n {
                        v += c[(nu, q)] * t1.get(p, nu, la, si);
                    }
                    t2.set(p, q, la, si, v);
                }
            }
        }
    }
    let mut t3 = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for si in 0..n {
                    let mut v = 0.0;
                    for la in 0..n {
                        v += c[(la, r)] * t2.get(p, q, la, si);
                    }
                    t3.set(p, q, r, si, v);
                }
            }
        }
    }
    let mut chem = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let mut v = 0.0;
                    for si in 0..n {
                        v += c[(si, s)] * t3.get(p, q, r, si);
                    }
                    chem.set(p, q, r, s, v);
                }
            }
        }
    }
    // <pq|rs> = (pr|qs)
    let mut phys = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    phys.set(p, q, r, s, chem.get(p, r, q, s));
                }
            }
        }
    }
    MoIntegrals {
        one_body,
        two_body: phys,
    }
}

/// Fold the frozen core orbitals into a constant plus an effective one-body
/// term and restrict the tensors to the active window.
pub fn freeze_core(
    molecule: &Molecule,
    mo: &MoIntegrals,
    scf: &ScfResult,
) -> Result<ActiveSpaceIntegrals> {
    if !scf.converged {
        return Err(Error::ScfNotConverged {
            iterations: scf.iterations,
        });
    }
    let n = mo.one_body.nrows();
    let nocc = molecule.n_electrons() / 2;
    let ncore = molecule.n_core_orbitals();
    if ncore > nocc {
        return Err(Error::Invalid(format!(
            "{ncore} core orbitals exceed {nocc} occupied orbitals"
        )));
    }
    let m = n - ncore;
    let g = &mo.two_body;

    let mut core_energy = nuclear_repulsion(molecule);
    for c in 0..ncore {
        core_energy += 2.0 * mo.one_body[(c, c)];
        for d in 0..ncore {
            core_energy += 2.0 * g.get(c, d, c, d) - g.get(c, d, d, c);
        }
    }

    let mut one_body = DMatrix::zeros(m, m);
    for p in 0..m {
        for q in 0..m {
            let mut v = mo.one_body[(p + ncore, q + ncore)];
            for c in 0..ncore {
                v += 2.0 * g.get(p + ncore, c, q + ncore, c) - g.get(p + ncore, c, c, q + ncore);
            }
            one_body[(p, q)] = v;
        }
    }

    let mut two_body = Tensor4::zeros(m);
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    two_body.set(p, q, r, s, g.get(p + ncore, q + ncore, r + ncore, s + ncore));
                }
            }
        }
    }

    Ok(ActiveSpaceIntegrals {
        one_body,
        two_body,
        core_energy,
        n_active_electrons: molecule.n_electrons() - 2 * ncore,
        n_active_orbitals: m,
    })
}

/// Reference orbitals closer than this in energy count as one degenerate
/// cluster for alignment purposes.
const DEGENERACY_TOL: f64 = 1e-3;

/// Match the displaced MOs to a reference set: permute columns by maximum
/// overlap, flip signs so matched overlaps are positive, and reorder the
/// orbital energies accordingly. Within degenerate reference clusters the
/// displaced orbitals are additionally rotated (orthogonal Procrustes) onto
/// the reference mix, since a displacement splits a degenerate pair in a
/// basis the reference diagonalization knows nothing about.
/// `cross_overlap[(mu, nu)]` is the overlap of reference AO `mu` with
/// displaced AO `nu`. Returns the smallest matched |overlap|.
pub fn align_to_reference(
    displaced: &mut ScfResult,
    reference: &ScfResult,
    cross_overlap: &DMatrix<f64>,
    nocc: usize,
) -> f64 {
    let m = reference.mo_coefficients.transpose() * cross_overlap * &displaced.mo_coefficients;
    let n = m.nrows();
    let mut taken = vec![false; n];
    let mut perm = vec![0usize; n];
    let mut signs = vec![1.0f64; n];
    for p in 0..n {
        let mut best = usize::MAX;
        let mut best_val = -1.0;
        for q in 0..n {
            if !taken[q] && m[(p, q)].abs() > best_val {
                best_val = m[(p, q)].abs();
                best = q;
            }
        }
        taken[best] = true;
        perm[p] = best;
        signs[p] = if m[(p, best)] < 0.0 { -1.0 } else { 1.0 };
    }

    let mut c = DMatrix::zeros(n, n);
    let mut eps = vec![0.0; n];
    for p in 0..n {
        c.set_column(p, &(&displaced.mo_coefficients.column(perm[p]) * signs[p]));
        eps[p] = displaced.orbital_energies[perm[p]];
    }

    // rotate degenerate clusters onto the reference mix; clusters never
    // straddle the occupied/virtual boundary here, but guard anyway
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && (reference.orbital_energies[end] - reference.orbital_energies[end - 1]).abs()
                < DEGENERACY_TOL
        {
            end += 1;
        }
        let k = end - start;
        let straddles = start < nocc && end > nocc;
        if k >= 2 && !straddles {
            let block =
                (reference.mo_coefficients.columns(start, k).transpose() * cross_overlap)
                    * c.columns(start, k);
            let svd = block.svd(true, true);
            let rot = svd.v_t.as_ref().unwrap().transpose() * svd.u.as_ref().unwrap().transpose();
            let rotated = c.columns(start, k) * rot;
            c.columns_mut(start, k).copy_from(&rotated);
        }
        start = end;
    }

    let aligned = reference.mo_coefficients.transpose() * cross_overlap * &c;
    let min_overlap = (0..n).fold(f64::INFINITY, |acc, p| acc.min(aligned[(p, p)].abs()));

    displaced.mo_coefficients = c;
    displaced.orbital_energies = eps;
    displaced.density = density_from(&displaced.mo_coefficients, nocc);
    min_overlap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ao_basis;
    use crate::integrals::compute_ao_integrals_cgtos;
    use crate::molecule::Element;
    use approx::assert_abs_diff_eq;

    fn pipeline(mol: &Molecule) -> (AoIntegrals, ScfResult) {
        let ints = compute_ao_integrals_cgtos(mol, &ao_basis(mol));
        let scf = run_rhf(mol, &ints).unwrap();
        assert!(scf.converged);
        (ints, scf)
    }

    fn h2_at(d: f64) -> Molecule {
        Molecule::new(
            vec![Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, d],
            0,
            false,
        )
        .unwrap()
    }

    #[test]
    fn h2_energy_pinned() {
        // independent reference program value at d = 0.735 Angstrom
        let (_, scf) = pipeline(&h2_at(1.388948601621));
        assert_abs_diff_eq!(scf.hf_energy, -1.1169989991547484, epsilon = 1e-6);
        assert_eq!(scf.mo_coefficients.ncols(), 2);
        assert!(scf.orbital_energies[0] < 0.0 && scf.orbital_energies[1] > 0.0);
    }

    #[test]
    fn mo_orthonormality_and_density_idempotency() {
        let mol = Molecule::new(
            vec![Element::O, Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 1.8, 0.0, 1.2, -1.8, 0.0, 1.2],
            0,
            true,
        )
        .unwrap();
        let (ints, scf) = pipeline(&mol);
        let n = ints.n_basis();

        let ortho = scf.mo_coefficients.transpose() * &ints.overlap * &scf.mo_coefficients;
        assert_abs_diff_eq!((ortho - DMatrix::identity(n, n)).norm(), 0.0, epsilon = 1e-8);

        let psp = &scf.density * &ints.overlap * &scf.density;
        assert_abs_diff_eq!((psp - 2.0 * &scf.density).norm(), 0.0, epsilon = 1e-6);

        for w in scf.orbital_energies.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn energy_from_orbital_sums() {
        let (ints, scf) = pipeline(&h2_at(1.4));
        let mo = mo_transform(&scf, &ints).unwrap();
        let nocc = 1;
        let mut e = nuclear_repulsion(&h2_at(1.4));
        for i in 0..nocc {
            e += mo.one_body[(i, i)] + scf.orbital_energies[i];
        }
        assert_abs_diff_eq!(e, scf.hf_energy, epsilon = 1e-10);
    }

    #[test]
    fn transform_with_identity_coefficients() {
        let mol = h2_at(1.5);
        let ints = compute_ao_integrals_cgtos(&mol, &ao_basis(&mol));
        let mo = mo_transform_unchecked(&DMatrix::identity(2, 2), &ints);
        assert_abs_diff_eq!(
            (mo.one_body.clone() - ints.core_hamiltonian()).norm(),
            0.0,
            epsilon = 1e-12
        );
        // physicist <pq|rs> = chemist (pr|qs) reindexing of raw AO integrals
        assert_abs_diff_eq!(
            mo.two_body.get(0, 1, 1, 0),
            ints.eri.get(0, 1, 1, 0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            mo.two_body.get(0, 0, 1, 1),
            ints.eri.get(0, 1, 0, 1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mo_one_body_symmetric_and_diagonal_identity() {
        let (ints, scf) = pipeline(&h2_at(1.4));
        let mo = mo_transform(&scf, &ints).unwrap();
        assert_abs_diff_eq!(
            (mo.one_body.clone() - mo.one_body.transpose()).norm(),
            0.0,
            epsilon = 1e-12
        );
        // <00|00> equals the chemist (00|00) in the MO basis by index identity
        let c = &scf.mo_coefficients;
        let mut chem0000 = 0.0;
        for mu in 0..2 {
            for nu in 0..2 {
                for la in 0..2 {
                    for si in 0..2 {
                        chem0000 += c[(mu, 0)] * c[(nu, 0)] * c[(la, 0)] * c[(si, 0)]
                            * ints.eri.get(mu, nu, la, si);
                    }
                }
            }
        }
        assert_abs_diff_eq!(mo.two_body.get(0, 0, 0, 0), chem0000, epsilon = 1e-12);
    }

    #[test]
    fn freeze_core_empty_is_identity() {
        let mol = h2_at(1.4);
        let (ints, scf) = pipeline(&mol);
        let mo = mo_transform(&scf, &ints).unwrap();
        let asi = freeze_core(&mol, &mo, &scf).unwrap();
        assert_eq!(asi.n_active_orbitals, 2);
        assert_eq!(asi.n_active_electrons, 2);
        assert_abs_diff_eq!(asi.core_energy, nuclear_repulsion(&mol), epsilon = 1e-12);
        assert_abs_diff_eq!(
            (asi.one_body.clone() - &mo.one_body).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn active_space_counts_for_heavy_molecules() {
        let beh2 = Molecule::new(
            vec![Element::Be, Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 2.5, 0.0, 0.0, -2.5],
            0,
            true,
        )
        .unwrap();
        let (ints, scf) = pipeline(&beh2);
        let mo = mo_transform(&scf, &ints).unwrap();
        let asi = freeze_core(&beh2, &mo, &scf).unwrap();
        assert_eq!(asi.n_active_electrons, 4);
        assert_eq!(2 * asi.n_active_orbitals, 12);

        let h2o = Molecule::new(
            vec![Element::O, Element::H, Element::H],
            vec![0.0, 0.0, 0.0, 1.43, 0.0, 1.1, -1.43, 0.0, 1.1],
            0,
            true,
        )
        .unwrap();
        let (ints, scf) = pipeline(&h2o);
        let mo = mo_transform(&scf, &ints).unwrap();
        let asi = freeze_core(&h2o, &mo, &scf).unwrap();
        assert_eq!(asi.n_active_electrons, 8);
        assert_eq!(2 * asi.n_active_orbitals, 12);

        // physicist-tensor symmetries
        let g = &asi.two_body;
        let m = asi.n_active_orbitals;
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        let v = g.get(p, q, r, s);
                        assert_abs_diff_eq!(v, g.get(q, p, s, r), epsilon = 1e-10);
                        assert_abs_diff_eq!(v, g.get(r, s, p, q), epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn alignment_is_stable_under_small_displacement() {
        let mol = h2_at(1.4);
        let (ints, scf) = pipeline(&mol);
        let mol2 = h2_at(1.41);
        let aos = ao_basis(&mol);
        let aos2 = ao_basis(&mol2);
        let ints2 = compute_ao_integrals_cgtos(&mol2, &aos2);
        let mut scf2 = run_rhf(&mol2, &ints2).unwrap();
        let cross = crate::integrals::overlap_between(&aos, &aos2);
        let min = align_to_reference(&mut scf2, &scf, &cross, 1);
        assert!(min > 0.99, "matched overlap {min}");
        let _ = ints;
    }
}

