//! Exponential map, logarithm map, geodesic interpolation, and the
//! conditional vector field of geodesic flow matching.

use crate::error::{Result, SfmgError};
use crate::numerics::{matrix_exp, orthogonal_log, qr_full, Matrix};
use crate::stiefel::point::{StiefelPoint, TangentVector};

pub const LOG_DEFAULT_TOL: f64 = 1e-9;
pub const LOG_DEFAULT_MAX_ITER: usize = 100;

const EXP_TANGENCY_TOL: f64 = 1e-6;

/// Canonical-metric exponential map.
///
/// Splitting the tangent as v = U A + Q B (A = U^T v skew, Q B the thin
/// factorization of the component orthogonal to span U),
/// Exp(U, v) = [U, Q] exp([[A, -B^T], [B, 0]]) [I_k; 0].
///
/// Exp(U, t v) then traces the geodesic, with constant Frobenius speed
/// ||v|| since the block exponential is orthogonal.
pub fn stiefel_exp(v: &TangentVector) -> Result<StiefelPoint> {
    let residual = v.tangency_residual();
    if residual > EXP_TANGENCY_TOL * (1.0 + v.norm()) {
        return Err(SfmgError::Degenerate(format!(
            "stiefel_exp input is not tangent (residual {residual:.3e})"
        )));
    }
    let u = v.base().frame();
    let val = v.value();
    let k = u.cols();

    let a = u.transpose().matmul(val);
    let perp = val.sub(&u.matmul(&a));
    let (q, b) = orthonormal_factor(&perp);
    let r = q.cols();
    if r == 0 {
        // v lies in span(U): a pure frame rotation.
        return Ok(StiefelPoint::new_unchecked(u.matmul(&matrix_exp(&a)?)));
    }

    let mut block = Matrix::zeros(k + r, k + r);
    block.set_block(0, 0, &a);
    block.set_block(0, k, &b.transpose().scale(-1.0));
    block.set_block(k, 0, &b);

    let coeff = matrix_exp(&block)?.columns(0, k);
    let frame = u.hstack(&q).matmul(&coeff);
    Ok(StiefelPoint::new_unchecked(frame))
}

/// Rank-revealing thin factorization M = Q B with Q^T Q = I_r by modified
/// Gram-Schmidt with reorthogonalization; numerically dependent columns are
/// dropped, so r <= cols and B is r x cols.
fn orthonormal_factor(m: &Matrix) -> (Matrix, Matrix) {
    let (n, k) = (m.rows(), m.cols());
    let scale = m.max_abs().max(1e-300);
    let mut q_cols: Vec<Vec<f64>> = Vec::new();
    let mut b_rows: Vec<Vec<f64>> = Vec::new(); // b_rows[r][j] = coefficient of q_r in column j
    for j in 0..k {
        let mut col = m.column(j);
        for _pass in 0..2 {
            for (r, q) in q_cols.iter().enumerate() {
                let dot: f64 = q.iter().zip(&col).map(|(a, b)| a * b).sum();
                for (c, qi) in col.iter_mut().zip(q) {
                    *c -= dot * qi;
                }
                b_rows[r][j] += dot;
            }
        }
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 * scale * (n as f64).sqrt() {
            for c in col.iter_mut() {
                *c /= norm;
            }
            let mut row = vec![0.0; k];
            row[j] = norm;
            q_cols.push(col);
            b_rows.push(row);
        }
    }
    let r = q_cols.len();
    let mut q = Matrix::zeros(n, r);
    for (jr, col) in q_cols.iter().enumerate() {
        for i in 0..n {
            q[(i, jr)] = col[i];
        }
    }
    let mut b = Matrix::zeros(r, k);
    for (ir, row) in b_rows.iter().enumerate() {
        for j in 0..k {
            b[(ir, j)] = row[j];
        }
    }
    (q, b)
}

/// Logarithm map by the matrix-algebraic shooting iteration.
///
/// Builds the 2k x 2k orthogonal completion of [U0^T U1; N], aligns the
/// completion block by an orthogonal Procrustes step, then repeatedly takes
/// the principal log and rotates the completion until the lower-right block
/// vanishes. Returns the tangent vector at `u0` whose geodesic reaches `u1`.
pub fn stiefel_log(
    u0: &StiefelPoint,
    u1: &StiefelPoint,
    tol: f64,
    max_iter: usize,
) -> Result<TangentVector> {
    if (u0.n(), u0.k()) != (u1.n(), u1.k()) {
        return Err(SfmgError::Shape(format!(
            "stiefel_log endpoints live on different manifolds: V_{}(R^{}) vs V_{}(R^{})",
            u0.k(),
            u0.n(),
            u1.k(),
            u1.n()
        )));
    }
    let k = u0.k();
    if u1.frame().sub(u0.frame()).frobenius_norm() < 1e-14 {
        return Ok(TangentVector::zero(u0.clone()));
    }

    let m = u0.frame().transpose().matmul(u1.frame());
    let residual_part = u1.frame().sub(&u0.frame().matmul(&m));
    // Orthogonal component of U1 relative to span(U0). Its rank r can be
    // below k (r = 0 when U1 is a pure rotation of the frame U0).
    let (q, n_mat) = orthonormal_factor(&residual_part);
    let r = q.cols();
    if r == 0 {
        let a = orthogonal_log(&m)?;
        return Ok(TangentVector::new_unchecked(
            u0.clone(),
            u0.frame().matmul(&a),
        ));
    }

    let dim = k + r;
    let mut w = Matrix::zeros(dim, k);
    w.set_block(0, 0, &m);
    w.set_block(k, 0, &n_mat);
    let (mut v, _) = qr_full(&w)?;

    // Procrustes: rotate the completion so its lower-right block is
    // symmetric positive semidefinite, which conditions the principal log.
    let y0 = v.block(k, k, r, dim - k);
    if let Some(polar) = polar_unitary(&y0) {
        let phi = polar.transpose();
        let aligned = v.columns(k, dim).matmul(&phi);
        v.set_block(0, k, &aligned);
    }
    if v.det() < 0.0 {
        // The completion block is free; flip one column to land in SO(dim).
        for i in 0..dim {
            v[(i, dim - 1)] = -v[(i, dim - 1)];
        }
    }

    let mut last_residual = f64::INFINITY;
    for _ in 0..max_iter {
        let l = orthogonal_log(&v)?;
        let a = l.block(0, 0, k, k);
        let b = l.block(k, 0, r, k);
        let c = l.block(k, k, r, r);
        last_residual = c.frobenius_norm();
        if last_residual <= tol {
            let value = u0.frame().matmul(&a).add(&q.matmul(&b));
            return Ok(TangentVector::new_unchecked(u0.clone(), value));
        }
        let rot = matrix_exp(&c.scale(-1.0))?;
        let updated = v.columns(k, dim).matmul(&rot);
        v.set_block(0, k, &updated);
    }
    Err(SfmgError::NonConvergence {
        what: "stiefel_log shooting iteration".into(),
        iters: max_iter,
        residual: last_residual,
    })
}

/// Unitary polar factor by the Newton iteration X <- (X + X^-T)/2.
/// Returns None for (numerically) singular input.
fn polar_unitary(y: &Matrix) -> Option<Matrix> {
    if y.det().abs() < 1e-12 {
        return None;
    }
    let mut x = y.clone();
    for _ in 0..50 {
        let inv_t = x.inverse().ok()?.transpose();
        let next = x.add(&inv_t).scale(0.5);
        let delta = next.sub(&x).frobenius_norm();
        x = next;
        if delta < 1e-14 {
            break;
        }
    }
    Some(x)
}

/// Point at parameter t on the geodesic from u0 to u1:
/// psi_t = Exp(U0, t Log(U0, U1)).
pub fn geodesic_interpolate(u0: &StiefelPoint, u1: &StiefelPoint, t: f64) -> Result<StiefelPoint> {
    let log = stiefel_log(u0, u1, LOG_DEFAULT_TOL, LOG_DEFAULT_MAX_ITER)?;
    stiefel_exp(&log.scale(t))
}

/// Geodesic distance ||Log(U0, U1)||_F.
pub fn geodesic_distance(u0: &StiefelPoint, u1: &StiefelPoint) -> Result<f64> {
    Ok(stiefel_log(u0, u1, LOG_DEFAULT_TOL, LOG_DEFAULT_MAX_ITER)?.norm())
}

/// Conditional vector field of the geodesic path toward `u1`:
/// u_t = Log(U_t, U1) ||Log(U0, U1)|| / ||Log(U_t, U1)||.
///
/// Returns the zero tangent when U_t coincides with U1 (terminal limit).
pub fn conditional_vector_field(
    ut: &StiefelPoint,
    u0: &StiefelPoint,
    u1: &StiefelPoint,
) -> Result<TangentVector> {
    if ut.frame().sub(u1.frame()).frobenius_norm() <= 1e-10 {
        return Ok(TangentVector::zero(ut.clone()));
    }
    let log_t = stiefel_log(ut, u1, LOG_DEFAULT_TOL, LOG_DEFAULT_MAX_ITER)?;
    let speed_t = log_t.norm();
    if speed_t < 1e-14 {
        return Ok(TangentVector::zero(ut.clone()));
    }
    let log_0 = stiefel_log(u0, u1, LOG_DEFAULT_TOL, LOG_DEFAULT_MAX_ITER)?;
    Ok(log_t.scale(log_0.norm() / speed_t))
}
