//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::error::{Result, SfmgError};
use crate::numerics::Matrix;

const REL_ASYM_TOL: f64 = 1e-10;
const OFF_DIAG_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.
///
/// Eigenvector signs are fixed so the largest-magnitude entry of each column
/// is positive, making the output deterministic.
pub fn sym_eig(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !m.is_square() {
        return Err(SfmgError::Shape(format!(
            "sym_eig requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.asymmetry() > REL_ASYM_TOL {
        return Err(SfmgError::Shape(format!(
            "sym_eig requires a symmetric matrix (relative asymmetry {:.3e})",
            m.asymmetry()
        )));
    }
    let n = m.rows();
    let mut a = m.symmetric_part();
    let mut v = Matrix::identity(n);
    let norm = a.frobenius_norm();
    let target = OFF_DIAG_TOL * norm;

    let mut converged = norm == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        sweeps += 1;
        if sweeps > MAX_SWEEPS {
            return Err(SfmgError::NonConvergence {
                what: "Jacobi eigensolver".into(),
                iters: MAX_SWEEPS,
                residual: off_diagonal_norm(&a),
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle that annihilates a_pq.
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = c * aip - s * aiq;
                        a[(p, i)] = a[(i, p)];
                        a[(i, q)] = s * aip + c * aiq;
                        a[(q, i)] = a[(i, q)];
                    }
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }

    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    fix_column_signs(&mut vectors);
    Ok((eigenvalues, vectors))
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Flip each column so its largest-magnitude entry (first on ties) is positive.
pub fn fix_column_signs(m: &mut Matrix) {
    for j in 0..m.cols() {
        let mut best = 0;
        let mut best_abs = 0.0;
        for i in 0..m.rows() {
            let a = m[(i, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if m[(best, j)] < 0.0 {
            for i in 0..m.rows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::{gaussian_matrix, RngState};

    fn residual(m: &Matrix, vals: &[f64], vecs: &Matrix) -> f64 {
        let mv = m.matmul(vecs);
        let vd = vecs.matmul(&Matrix::diagonal(vals));
        mv.sub(&vd).frobenius_norm()
    }

    #[test]
    fn two_by_two_hand_case() {
        let m = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let (vals, vecs) = sym_eig(&m).unwrap();
        assert!((vals[0] - 0.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        // lambda=0 -> (1,1)/sqrt2 ; lambda=2 -> (1,-1)/sqrt2 under the sign convention
        assert!((vecs[(0, 0)] - s).abs() < 1e-12 && (vecs[(1, 0)] - s).abs() < 1e-12);
        assert!((vecs[(0, 1)] - s).abs() < 1e-12 && (vecs[(1, 1)] + s).abs() < 1e-12);
    }

    #[test]
    fn identity_case() {
        let (vals, vecs) = sym_eig(&Matrix::identity(3)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        assert_eq!(vecs, Matrix::identity(3));
    }

    #[test]
    fn diagonal_case_sorts() {
        let m = Matrix::diagonal(&[3.0, 1.0, 2.0]);
        let (vals, vecs) = sym_eig(&m).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        // permuted standard basis vectors
        assert_eq!(vecs[(1, 0)], 1.0);
        assert_eq!(vecs[(2, 1)], 1.0);
        assert_eq!(vecs[(0, 2)], 1.0);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = RngState::new(5);
        for trial in 0..5 {
            let g = gaussian_matrix(20, 20, &mut rng);
            let m = g.add(&g.transpose()).scale(0.5);
            let (vals, vecs) = sym_eig(&m).unwrap();
            let r = residual(&m, &vals, &vecs);
            assert!(r <= 1e-8 * m.frobenius_norm().max(1.0), "trial {trial}: {r}");
            let orth = vecs.transpose().matmul(&vecs).sub(&Matrix::identity(20));
            assert!(orth.frobenius_norm() <= 1e-10);
            // full reconstruction V diag(l) V^T = M
            let rec = vecs
                .matmul(&Matrix::diagonal(&vals))
                .matmul(&vecs.transpose());
            assert!(rec.sub(&m).frobenius_norm() <= 1e-8 * m.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&m), Err(SfmgError::Shape(_))));
    }

    #[test]
    fn rejects_non_square() {
        let m = Matrix::zeros(2, 3);
        assert!(matches!(sym_eig(&m), Err(SfmgError::Shape(_))));
    }
}
