//! Matrix exponential and the principal logarithm of orthogonal matrices.
//!
//! `matrix_exp` uses scaling-and-squaring with the degree-13 Pade
//! approximant. `orthogonal_log` uses inverse scaling-and-squaring:
//! Denman-Beavers square roots until the argument is close to the identity,
//! then a truncated log series; the result is skew-symmetrized to remove
//! rounding drift.

use crate::error::{Result, SfmgError};
use crate::numerics::eig::sym_eig;
use crate::numerics::Matrix;

/// Pade-13 coefficients (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

pub fn matrix_exp(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(SfmgError::Shape(format!(
            "matrix_exp requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(SfmgError::Degenerate("matrix_exp of non-finite matrix".into()));
    }
    let n = m.rows();
    if m.max_abs() == 0.0 {
        return Ok(Matrix::identity(n));
    }

    let norm = m.norm_1();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(squarings as i32));

    let b = &PADE13;
    let ident = Matrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    // u = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let inner_u = a6
        .scale(b[13])
        .add(&a4.scale(b[11]))
        .add(&a2.scale(b[9]));
    let u = a.matmul(
        &a6.matmul(&inner_u)
            .add(&a6.scale(b[7]))
            .add(&a4.scale(b[5]))
            .add(&a2.scale(b[3]))
            .add(&ident.scale(b[1])),
    );
    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let inner_v = a6
        .scale(b[12])
        .add(&a4.scale(b[10]))
        .add(&a2.scale(b[8]));
    let v = a6
        .matmul(&inner_v)
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&ident.scale(b[0]));

    // exp(A) ~ (V - U)^{-1} (V + U)
    let mut result = v.sub(&u).inverse()?.matmul(&v.add(&u));
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

const LOG_SERIES_MAX_TERMS: usize = 80;
const MAX_SQRT_STEPS: usize = 40;

/// Principal logarithm of a special orthogonal matrix; the result is
/// exactly skew-symmetric. Errors if the spectrum touches -1 (branch cut).
pub fn orthogonal_log(v: &Matrix) -> Result<Matrix> {
    if !v.is_square() {
        return Err(SfmgError::Shape(format!(
            "orthogonal_log requires a square matrix, got {}x{}",
            v.rows(),
            v.cols()
        )));
    }
    let n = v.rows();
    let orth_residual = v
        .transpose()
        .matmul(v)
        .sub(&Matrix::identity(n))
        .frobenius_norm();
    if orth_residual > 1e-8 {
        return Err(SfmgError::Degenerate(format!(
            "orthogonal_log input is not orthogonal (||V^T V - I|| = {orth_residual:.3e})"
        )));
    }
    // Eigenvalues of (V + V^T)/2 are the cosines of the rotation angles;
    // one at -1 means an eigenvalue of V on the branch cut.
    let (cosines, _) = sym_eig(&v.symmetric_part())?;
    let min_cos = cosines.first().copied().unwrap_or(1.0);
    if min_cos <= -1.0 + 5e-13 {
        return Err(SfmgError::BranchCut(format!(
            "orthogonal matrix has an eigenvalue at or near -1 (min cosine {min_cos:.15})"
        )));
    }

    // Inverse scaling-and-squaring: square roots until ||V - I||_F < 0.5.
    let mut current = v.clone();
    let mut halvings = 0u32;
    for _ in 0..MAX_SQRT_STEPS {
        if current.sub(&Matrix::identity(n)).frobenius_norm() < 0.5 {
            break;
        }
        current = denman_beavers_sqrt(&current)?;
        halvings += 1;
    }
    let x = current.sub(&Matrix::identity(n));
    if x.frobenius_norm() >= 0.5 {
        return Err(SfmgError::NonConvergence {
            what: "square-root reduction in orthogonal_log".into(),
            iters: MAX_SQRT_STEPS,
            residual: x.frobenius_norm(),
        });
    }

    // log(I + X) = sum_{m>=1} (-1)^{m+1} X^m / m
    let mut log = Matrix::zeros(n, n);
    let mut power = x.clone();
    for m in 1..=LOG_SERIES_MAX_TERMS {
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let term = power.scale(sign / m as f64);
        log.add_assign(&term);
        if term.frobenius_norm() < 1e-16 {
            break;
        }
        power = power.matmul(&x);
    }
    Ok(log.scale(2.0f64.powi(halvings as i32)).skew_part())
}

/// Principal square root by the Denman-Beavers iteration.
fn denman_beavers_sqrt(a: &Matrix) -> Result<Matrix> {
    let mut y = a.clone();
    let mut z = Matrix::identity(a.rows());
    for _ in 0..60 {
        let y_next = y.add(&z.inverse()?).scale(0.5);
        let z_next = z.add(&y.inverse()?).scale(0.5);
        let delta = y_next.sub(&y).frobenius_norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.frobenius_norm().max(1.0) {
            return Ok(y);
        }
    }
    Err(SfmgError::NonConvergence {
        what: "Denman-Beavers square root".into(),
        iters: 60,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::{gaussian_matrix, RngState};
    use std::f64::consts::PI;

    fn rotation2(theta: f64) -> Matrix {
        Matrix::from_rows(&[
            vec![theta.cos(), -theta.sin()],
            vec![theta.sin(), theta.cos()],
        ])
        .unwrap()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(e, Matrix::identity(3));
    }

    #[test]
    fn exp_of_planar_generator_is_rotation() {
        let theta = PI / 2.0;
        let gen = Matrix::from_rows(&[vec![0.0, -theta], vec![theta, 0.0]]).unwrap();
        let e = matrix_exp(&gen).unwrap();
        assert!(e.sub(&rotation2(theta)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn exp_of_diagonal() {
        let e = matrix_exp(&Matrix::diagonal(&[1.0, 2.0])).unwrap();
        let expected = Matrix::diagonal(&[1.0f64.exp(), 2.0f64.exp()]);
        assert!(e.sub(&expected).frobenius_norm() < 1e-10 * expected.frobenius_norm());
    }

    #[test]
    fn exp_addition_on_commuting_inputs() {
        // diag and scalar multiples commute
        let a = Matrix::diagonal(&[0.3, -1.2, 2.0]);
        let b = a.scale(1.7);
        let lhs = matrix_exp(&a.add(&b)).unwrap();
        let rhs = matrix_exp(&a).unwrap().matmul(&matrix_exp(&b).unwrap());
        assert!(lhs.sub(&rhs).frobenius_norm() < 1e-9 * lhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = orthogonal_log(&Matrix::identity(4)).unwrap();
        assert!(l.frobenius_norm() < 1e-14);
    }

    #[test]
    fn log_of_planar_rotation() {
        let l = orthogonal_log(&rotation2(0.7)).unwrap();
        let expected = Matrix::from_rows(&[vec![0.0, -0.7], vec![0.7, 0.0]]).unwrap();
        assert!(l.sub(&expected).frobenius_norm() < 1e-10);
    }

    #[test]
    fn exp_log_round_trip_on_skew() {
        let mut rng = RngState::new(17);
        for _ in 0..10 {
            let g = gaussian_matrix(5, 5, &mut rng);
            let mut s = g.skew_part();
            // keep the spectral radius under pi - 0.1 (||.||_2 <= ||.||_F)
            let norm = s.frobenius_norm();
            if norm > PI - 0.1 {
                s = s.scale((PI - 0.1) / norm);
            }
            let v = matrix_exp(&s).unwrap();
            let l = orthogonal_log(&v).unwrap();
            assert!(l.sub(&s).frobenius_norm() < 1e-7, "round trip failed");
            assert!(l.add(&l.transpose()).frobenius_norm() < 1e-10);
            assert!(matrix_exp(&l).unwrap().sub(&v).frobenius_norm() < 1e-8);
        }
    }

    #[test]
    fn log_rejects_branch_cut() {
        let half_turn = rotation2(PI);
        assert!(matches!(
            orthogonal_log(&half_turn),
            Err(SfmgError::BranchCut(_))
        ));
    }

    #[test]
    fn log_handles_angles_near_pi() {
        let v = rotation2(3.0);
        let l = orthogonal_log(&v).unwrap();
        assert!(matrix_exp(&l).unwrap().sub(&v).frobenius_norm() < 1e-8);
    }
}
