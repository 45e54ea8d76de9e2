//! Jacobi kernels for small dense spectral problems.
//!
//! Rank decisions and eigenspace extraction are the load-bearing numerics of
//! this crate, and they need singular vectors that are accurate to machine
//! precision even for repeated and zero singular values. Cyclic Jacobi (for
//! symmetric matrices) and one-sided Hestenes Jacobi (for singular values
//! and left singular vectors) deliver that with a few dozen lines; all
//! matrices here are small and dense, so the O(n^3) sweeps are cheap.

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with matching eigenvector
/// columns; the eigenvector matrix is orthogonal to machine precision.
pub(crate) fn sym_eigen_jacobi(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "sym_eigen_jacobi: matrix must be square");
    let mut a = m.clone();
    let mut v = DMatrix::identity(n, n);
    let total = a.norm();
    if total == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // a <- J^T a J with J rotating the (p,q) plane.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[(p, i)];
                    let aqi = a[(q, i)];
                    a[(p, i)] = c * api - s * aqi;
                    a[(q, i)] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    (eigenvalues, vectors)
}

/// Singular values and left singular vectors by one-sided Jacobi: rotate
/// column pairs until all are mutually orthogonal; the column norms are the
/// singular values and the normalized columns the left vectors. Returns
/// `ncols` values in descending order (vectors for zero values are zero).
pub(crate) fn svd_left_jacobi(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let mut w = m.clone();
    let rows = w.nrows();
    let cols = w.ncols();
    let scale = w.norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..cols {
                for q in (p + 1)..cols {
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for i in 0..rows {
                        alpha += w[(i, p)] * w[(i, p)];
                        beta += w[(i, q)] * w[(i, q)];
                        gamma += w[(i, p)] * w[(i, q)];
                    }
                    if alpha * beta == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = c * t;
                    for i in 0..rows {
                        let wip = w[(i, p)];
                        let wiq = w[(i, q)];
                        w[(i, p)] = c * wip - s * wiq;
                        w[(i, q)] = s * wip + c * wiq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }
    let mut sigma: Vec<(f64, usize)> = (0..cols).map(|j| (w.column(j).norm(), j)).collect();
    sigma.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut u = DMatrix::zeros(rows, cols);
    let mut values = Vec::with_capacity(cols);
    for (dst, &(s, src)) in sigma.iter().enumerate() {
        values.push(s);
        if s > 0.0 {
            let col = w.column(src) / s;
            u.set_column(dst, &col);
        }
    }
    (values, u)
}

/// Singular values only, in descending order. Wide matrices are transposed
/// first (same spectrum, fewer column pairs to sweep).
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let (values, _) = if m.ncols() > m.nrows() {
        svd_left_jacobi(&m.transpose())
    } else {
        svd_left_jacobi(m)
    };
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn eigen_reconstructs_symmetric_matrices() {
        for seed in 0..10 {
            let x = random_matrix(7, 7, seed);
            let a = &x + x.transpose();
            let (vals, vecs) = sym_eigen_jacobi(&a);
            let lambda = DMatrix::from_diagonal(&DVector::from_vec(vals.clone()));
            let recon = &vecs * lambda * vecs.transpose();
            assert!((recon - &a).norm() < 1e-12 * a.norm());
            let ortho = vecs.transpose() * &vecs;
            assert!((ortho - DMatrix::identity(7, 7)).norm() < 1e-13);
            assert!(vals.windows(2).all(|w| w[0] >= w[1]), "sorted descending");
        }
    }

    #[test]
    fn eigen_handles_zero_and_repeated_eigenvalues() {
        // Projection-like matrix with eigenvalues {1, 1, 0, 0}: the null
        // eigenvectors must actually be annihilated.
        let u1 = DVector::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
        let u2 = DVector::from_vec(vec![0.5, -0.5, 0.5, -0.5]);
        let a = &u1 * u1.transpose() + &u2 * u2.transpose();
        let (vals, vecs) = sym_eigen_jacobi(&a);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!(vals[2].abs() < 1e-14);
        assert!(vals[3].abs() < 1e-14);
        for i in 2..4 {
            let v = vecs.column(i).into_owned();
            assert!((&a * &v).norm() < 1e-14, "null vector {i} is annihilated");
        }
    }

    #[test]
    fn svd_matches_eigen_of_gram_on_random_input() {
        for seed in 0..10 {
            let a = random_matrix(6, 4, seed);
            let values = singular_values(&a);
            let (gram_vals, _) = sym_eigen_jacobi(&(a.transpose() * &a));
            for (s, l) in values.iter().zip(&gram_vals) {
                assert!((s * s - l).abs() < 1e-12 * (1.0 + l.abs()));
            }
        }
    }

    #[test]
    fn svd_left_vectors_span_column_space() {
        // Rank-2 matrix built from two explicit columns.
        let c1 = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5, 0.0]);
        let c2 = DVector::from_vec(vec![0.0, 1.0, 1.0, -2.0, 3.0]);
        let mut a = DMatrix::zeros(5, 4);
        a.set_column(0, &c1);
        a.set_column(1, &c2);
        a.set_column(2, &(&c1 * 2.0 - &c2));
        a.set_column(3, &(&c1 + &c2 * 0.5));
        let (vals, u) = svd_left_jacobi(&a);
        assert!(vals[1] > 1e-10);
        assert!(vals[2] < 1e-12 * vals[0]);
        // The two leading left vectors reproduce every column.
        let u2 = u.columns(0, 2).into_owned();
        let proj = &u2 * u2.transpose();
        assert!((proj * &a - &a).norm() < 1e-12);
    }

    #[test]
    fn svd_of_zero_and_identity() {
        let z = DMatrix::<f64>::zeros(3, 5);
        assert!(singular_values(&z).iter().all(|&s| s == 0.0));
        let id = DMatrix::<f64>::identity(4, 4);
        let values = singular_values(&id);
        assert_eq!(values.len(), 4);
        assert!(values.iter().all(|&s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn wide_and_tall_agree() {
        for seed in 0..5 {
            let a = random_matrix(3, 8, seed);
            let wide = singular_values(&a);
            let tall = singular_values(&a.transpose());
            for (x, y) in wide.iter().zip(&tall) {
                assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
            }
        }
    }
}
