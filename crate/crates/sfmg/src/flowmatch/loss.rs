//! Conditional flow matching losses.
//!
//! Euclidean: straight-line paths x_t = x_0 + t (x_1 - x_0), regression
//! target (||x1-x0|| / ||x1-xt||)(x1-xt), which simplifies to x1 - x0 on the
//! path. Stiefel: geodesic paths, regression target the conditional vector
//! field; the raw network output is projected onto the tangent space before
//! the residual is formed, so the loss is blind to normal components.

use crate::error::Result;
use crate::flowmatch::net::{GradientSet, VectorFieldNet};
use crate::numerics::Matrix;
use crate::stiefel::{
    conditional_vector_field, geodesic_interpolate, project_tangent, StiefelPoint,
};

/// Regression target of the straight-line conditional flow, as displayed:
/// (||x1 - x0|| / ||x1 - xt||) (x1 - xt), with the analytic limit x1 - x0
/// when xt reaches x1.
pub fn euclidean_target(x0: &[f64], x1: &[f64], xt: &[f64]) -> Vec<f64> {
    let diff_full: Vec<f64> = x1.iter().zip(x0).map(|(a, b)| a - b).collect();
    let diff_t: Vec<f64> = x1.iter().zip(xt).map(|(a, b)| a - b).collect();
    let norm_full = norm(&diff_full);
    let norm_t = norm(&diff_t);
    if norm_t <= 1e-12 {
        return diff_full;
    }
    let scale = norm_full / norm_t;
    diff_t.iter().map(|d| d * scale).collect()
}

/// Squared-error flow matching loss on a straight-line path, with gradients
/// for every network parameter. `cond` is passed through to the field.
pub fn cfm_loss_euclidean(
    net: &VectorFieldNet,
    x0: &[f64],
    x1: &[f64],
    t: f64,
    cond: Option<&[f64]>,
) -> (f64, GradientSet) {
    assert_eq!(x0.len(), x1.len(), "endpoint dims differ");
    let xt: Vec<f64> = x0.iter().zip(x1).map(|(a, b)| a + t * (b - a)).collect();
    let target = euclidean_target(x0, x1, &xt);
    let (pred, cache) = net.forward_cached(&xt, t, cond);
    let resid: Vec<f64> = pred.iter().zip(&target).map(|(p, g)| p - g).collect();
    let loss: f64 = resid.iter().map(|r| r * r).sum();
    let upstream: Vec<f64> = resid.iter().map(|r| 2.0 * r).collect();
    (loss, net.backward(&cache, &upstream))
}

/// Geodesic flow matching loss on the Stiefel manifold, conditioned on the
/// eigenvalues. Errors from non-convergent logarithms propagate so the
/// caller can resample the noise endpoint.
pub fn cfm_loss_stiefel(
    net: &VectorFieldNet,
    u0: &StiefelPoint,
    u1: &StiefelPoint,
    t: f64,
    cond: &[f64],
) -> Result<(f64, GradientSet)> {
    let ut = geodesic_interpolate(u0, u1, t)?;
    let target = conditional_vector_field(&ut, u0, u1)?;
    let (raw, cache) = net.forward_cached(ut.frame().data(), t, Some(cond));
    let z = Matrix::from_vec(ut.n(), ut.k(), raw)?;
    let pred = project_tangent(&z, &ut);
    let resid = pred.value().sub(target.value());
    let loss = resid.frobenius_norm().powi(2);
    // The projection is linear and self-adjoint, so the pullback of the
    // residual is its own tangent projection.
    let upstream = project_tangent(&resid.scale(2.0), &ut);
    Ok((loss, net.backward(&cache, upstream.value().data())))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
