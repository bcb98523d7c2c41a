//! Cyclic Jacobi eigensolver for real symmetric matrices.
//!
//! The generic QR-based solver in our linear-algebra dependency returns
//! orthonormal but non-eigen vectors for matrices with nearly degenerate
//! spectra, which this workload hits constantly (symmetric molecules).
//! Jacobi sweeps are unconditionally robust for the small dense matrices
//! used here (n <= 7 in the mean field, a few hundred in the exact
//! diagonalization) and fully deterministic.

use nalgebra::DMatrix;

/// Eigenvalues (ascending) and matching eigenvector columns of a real
/// symmetric matrix. Ordering ties are broken by the sweep order, which is
/// deterministic.
pub(crate) fn sym_eigh(matrix: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols());
    let mut a = matrix.clone();
    let mut v = DMatrix::<f64>::identity(n, n);

    let scale = matrix.amax().max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &v.column(i));
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn check(m: &DMatrix<f64>) {
        let n = m.nrows();
        let (vals, vecs) = sym_eigh(m);
        // residual and orthonormality
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals.clone()));
        assert_abs_diff_eq!((m * &vecs - &vecs * lam).norm(), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!(
            (vecs.transpose() * &vecs - DMatrix::<f64>::identity(n, n)).norm(),
            0.0,
            epsilon = 1e-12
        );
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn near_degenerate_spectrum() {
        // the failure mode that motivated this module: almost-equal
        // eigenvalues
        let mut m = DMatrix::<f64>::zeros(3, 3);
        m[(0, 0)] = -0.7;
        m[(1, 1)] = 0.31;
        m[(2, 2)] = 0.31 + 1e-9;
        m[(0, 1)] = 1e-5;
        m[(1, 0)] = 1e-5;
        m[(1, 2)] = 3e-6;
        m[(2, 1)] = 3e-6;
        check(&m);
    }

    #[test]
    fn random_symmetric() {
        let mut seed = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [1, 2, 5, 9] {
            let mut m = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let x = next();
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            check(&m);
        }
    }

    #[test]
    fn exact_degeneracy() {
        let m = DMatrix::<f64>::identity(4, 4) * 2.5;
        let (vals, _) = sym_eigh(&m);
        for v in vals {
            assert_abs_diff_eq!(v, 2.5, epsilon = 1e-14);
        }
    }
}
