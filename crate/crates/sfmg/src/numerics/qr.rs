//! Householder QR with the positive-diagonal uniqueness convention.

use crate::error::{Result, SfmgError};
use crate::numerics::Matrix;

struct Reflectors {
    /// Householder vectors, v[j] has length n - j.
    vs: Vec<Vec<f64>>,
    r: Matrix,
}

fn householder_factor(m: &Matrix) -> Result<Reflectors> {
    let (n, k) = (m.rows(), m.cols());
    let norm = m.frobenius_norm();
    let mut a = m.clone();
    let mut vs = Vec::with_capacity(k);
    for j in 0..k {
        let x_norm = (j..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt();
        if x_norm <= 1e-12 * norm {
            return Err(SfmgError::Degenerate(format!(
                "rank-deficient input: column {j} is numerically dependent"
            )));
        }
        let x0 = a[(j, j)];
        let alpha = if x0 >= 0.0 { -x_norm } else { x_norm };
        let mut v: Vec<f64> = (j..n).map(|i| a[(i, j)]).collect();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            // Apply I - 2 v v^T / (v^T v) to the trailing block.
            for col in j..k {
                let dot: f64 = (j..n).map(|i| v[i - j] * a[(i, col)]).sum();
                let f = 2.0 * dot / vtv;
                for i in j..n {
                    a[(i, col)] -= f * v[i - j];
                }
            }
        }
        a[(j, j)] = alpha;
        vs.push(v);
    }
    let mut r = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r[(i, j)] = a[(i, j)];
        }
    }
    Ok(Reflectors { vs, r })
}

fn apply_reflectors_reverse(vs: &[Vec<f64>], q: &mut Matrix) {
    let n = q.rows();
    for (j, v) in vs.iter().enumerate().rev() {
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        for col in 0..q.cols() {
            let dot: f64 = (j..n).map(|i| v[i - j] * q[(i, col)]).sum();
            let f = 2.0 * dot / vtv;
            for i in j..n {
                q[(i, col)] -= f * v[i - j];
            }
        }
    }
}

/// Thin QR of an n x k matrix (n >= k): M = Q R with Q^T Q = I_k and the
/// diagonal of R strictly positive. Rank deficiency is an error naming the
/// offending column.
pub fn thin_qr(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let (n, k) = (m.rows(), m.cols());
    if n < k {
        return Err(SfmgError::Shape(format!(
            "thin_qr requires n >= k, got {n}x{k}"
        )));
    }
    let Reflectors { vs, mut r } = householder_factor(m)?;
    let mut q = Matrix::zeros(n, k);
    for j in 0..k {
        q[(j, j)] = 1.0;
    }
    apply_reflectors_reverse(&vs, &mut q);
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            for c in j..k {
                r[(j, c)] = -r[(j, c)];
            }
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok((q, r))
}

/// Full QR: M (n x k, n >= k) yields an n x n orthogonal Q whose first k
/// columns are the thin factor, under the same positive-diagonal convention.
pub fn qr_full(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let (n, k) = (m.rows(), m.cols());
    if n < k {
        return Err(SfmgError::Shape(format!(
            "qr_full requires n >= k, got {n}x{k}"
        )));
    }
    let Reflectors { vs, mut r } = householder_factor(m)?;
    let mut q = Matrix::identity(n);
    apply_reflectors_reverse(&vs, &mut q);
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            for c in j..k {
                r[(j, c)] = -r[(j, c)];
            }
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    // Pad R to n x k so that Q * R = M holds with the full Q.
    let mut r_full = Matrix::zeros(n, k);
    r_full.set_block(0, 0, &r);
    Ok((q, r_full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::{gaussian_matrix, RngState};

    #[test]
    fn orthonormal_fixed_point() {
        let s = 1.0 / 2.0f64.sqrt();
        let m = Matrix::from_rows(&[vec![s, s], vec![s, -s], vec![0.0, 0.0]]).unwrap();
        let (q, r) = thin_qr(&m).unwrap();
        assert!(q.sub(&m).frobenius_norm() < 1e-12);
        assert!(r.sub(&Matrix::identity(2)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn column_normalization_hand_case() {
        let m = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let (q, r) = thin_qr(&m).unwrap();
        let expected_q =
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(q.sub(&expected_q).frobenius_norm() < 1e-12);
        assert!(r.sub(&Matrix::diagonal(&[2.0, 3.0])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = RngState::new(11);
        let m = gaussian_matrix(6, 3, &mut rng);
        let (q, r) = thin_qr(&m).unwrap();
        assert!(q.matmul(&r).sub(&m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
        let orth = q.transpose().matmul(&q).sub(&Matrix::identity(3));
        assert!(orth.frobenius_norm() <= 1e-12);
        for j in 0..3 {
            assert!(r[(j, j)] > 0.0);
        }
    }

    #[test]
    fn deterministic_bitwise() {
        let mut rng = RngState::new(3);
        let m = gaussian_matrix(8, 4, &mut rng);
        let (q1, r1) = thin_qr(&m).unwrap();
        let (q2, r2) = thin_qr(&m).unwrap();
        assert_eq!(q1.data(), q2.data());
        assert_eq!(r1.data(), r2.data());
    }

    #[test]
    fn rank_deficient_names_column() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        match thin_qr(&m) {
            Err(SfmgError::Degenerate(msg)) => assert!(msg.contains("column 1"), "{msg}"),
            other => panic!("expected degenerate error, got {other:?}"),
        }
    }

    #[test]
    fn full_qr_extends_thin() {
        let mut rng = RngState::new(9);
        let m = gaussian_matrix(6, 2, &mut rng);
        let (qt, _) = thin_qr(&m).unwrap();
        let (qf, rf) = qr_full(&m).unwrap();
        assert!(qf.columns(0, 2).sub(&qt).frobenius_norm() < 1e-12);
        let orth = qf.transpose().matmul(&qf).sub(&Matrix::identity(6));
        assert!(orth.frobenius_norm() < 1e-12);
        assert!(qf.matmul(&rf).sub(&m).frobenius_norm() < 1e-10);
    }
}
