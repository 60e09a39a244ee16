//! Riemannian geometry of the Stiefel manifold V_k(R^n).
//!
//! V_k(R^n) is the set of n x k matrices with orthonormal columns. The
//! tangent space at Y consists of matrices Z with Y^T Z skew-symmetric;
//! the canonical-metric geodesics have a closed-form exponential map built
//! from a 2k x 2k matrix exponential, and the logarithm is computed by a
//! matrix-algebraic shooting iteration.

mod geodesic;
mod point;

pub use geodesic::{
    conditional_vector_field, geodesic_distance, geodesic_interpolate, stiefel_exp, stiefel_log,
    LOG_DEFAULT_MAX_ITER, LOG_DEFAULT_TOL,
};
pub use point::{haar_sample, project_normal, project_tangent, StiefelPoint, TangentVector};
