//! Points, tangent vectors, projections, and Haar sampling.

use crate::error::{Result, SfmgError};
use crate::numerics::{gaussian_matrix, thin_qr, Matrix, RngState};

const ON_MANIFOLD_TOL: f64 = 1e-8;
const TANGENCY_TOL: f64 = 1e-8;

/// A point of V_k(R^n): an n x k frame with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint {
    frame: Matrix,
}

impl StiefelPoint {
    /// Wrap a frame, verifying orthonormality.
    pub fn new(frame: Matrix) -> Result<Self> {
        let residual = orthonormality_residual(&frame);
        if residual > ON_MANIFOLD_TOL {
            return Err(SfmgError::Degenerate(format!(
                "frame is not orthonormal (||U^T U - I|| = {residual:.3e})"
            )));
        }
        Ok(StiefelPoint { frame })
    }

    /// Wrap without checking; for internal results known to be on-manifold.
    pub(crate) fn new_unchecked(frame: Matrix) -> Self {
        StiefelPoint { frame }
    }

    pub fn n(&self) -> usize {
        self.frame.rows()
    }

    pub fn k(&self) -> usize {
        self.frame.cols()
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    pub fn into_frame(self) -> Matrix {
        self.frame
    }

    /// ||U^T U - I_k||_F, the distance from exact orthonormality.
    pub fn manifold_residual(&self) -> f64 {
        orthonormality_residual(&self.frame)
    }
}

fn orthonormality_residual(frame: &Matrix) -> f64 {
    let k = frame.cols();
    frame
        .transpose()
        .matmul(frame)
        .sub(&Matrix::identity(k))
        .frobenius_norm()
}

/// A tangent vector attached to a base point, satisfying
/// base^T value + value^T base = 0.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: StiefelPoint,
    value: Matrix,
}

impl TangentVector {
    pub fn zero(base: StiefelPoint) -> Self {
        let value = Matrix::zeros(base.n(), base.k());
        TangentVector { base, value }
    }

    pub(crate) fn new_unchecked(base: StiefelPoint, value: Matrix) -> Self {
        TangentVector { base, value }
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn value(&self) -> &Matrix {
        &self.value
    }

    pub fn norm(&self) -> f64 {
        self.value.frobenius_norm()
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            value: self.value.scale(s),
        }
    }

    /// ||Y^T v + v^T Y||_F, zero for exact tangency.
    pub fn tangency_residual(&self) -> f64 {
        let yt_v = self.base.frame().transpose().matmul(&self.value);
        yt_v.add(&yt_v.transpose()).frobenius_norm()
    }

    pub fn is_tangent(&self) -> bool {
        self.tangency_residual() <= TANGENCY_TOL * (1.0 + self.norm())
    }
}

/// Orthogonal projection of an arbitrary n x k matrix onto the tangent
/// space at `base`: pi_T(Z, Y) = Y (Y^T Z - Z^T Y)/2 + (I - Y Y^T) Z.
pub fn project_tangent(z: &Matrix, base: &StiefelPoint) -> TangentVector {
    let y = base.frame();
    assert_eq!(
        (z.rows(), z.cols()),
        (y.rows(), y.cols()),
        "project_tangent shape mismatch"
    );
    let yt_z = y.transpose().matmul(z);
    let skew = yt_z.skew_part();
    // Y*skew + Z - Y*(Y^T Z) = Y*(skew - Y^T Z) + Z
    let value = y.matmul(&skew.sub(&yt_z)).add(z);
    TangentVector {
        base: base.clone(),
        value,
    }
}

/// Projection onto the normal space: pi_N(Z, Y) = Y (Y^T Z + Z^T Y)/2.
/// Together with `project_tangent` this decomposes Z exactly.
pub fn project_normal(z: &Matrix, base: &StiefelPoint) -> Matrix {
    let y = base.frame();
    assert_eq!(
        (z.rows(), z.cols()),
        (y.rows(), y.cols()),
        "project_normal shape mismatch"
    );
    let yt_z = y.transpose().matmul(z);
    y.matmul(&yt_z.symmetric_part())
}

/// Haar-uniform draw from V_k(R^n): the Q factor of a Gaussian matrix under
/// the positive-diagonal R convention.
pub fn haar_sample(n: usize, k: usize, rng: &mut RngState) -> StiefelPoint {
    assert!(n >= k && k >= 1, "haar_sample requires n >= k >= 1");
    loop {
        let g = gaussian_matrix(n, k, rng);
        // Gaussian matrices are full rank almost surely; retry on the
        // measure-zero degenerate draw rather than propagate an error.
        if let Ok((q, _)) = thin_qr(&g) {
            return StiefelPoint::new_unchecked(q);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_2_1(x: f64, y: f64) -> StiefelPoint {
        StiefelPoint::new(Matrix::from_rows(&[vec![x], vec![y]]).unwrap()).unwrap()
    }

    #[test]
    fn rejects_non_orthonormal_frames() {
        let m = Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert!(StiefelPoint::new(m).is_err());
    }

    #[test]
    fn projecting_base_point_gives_zero_tangent() {
        let mut rng = RngState::new(1);
        let u = haar_sample(6, 2, &mut rng);
        let t = project_tangent(u.frame(), &u);
        assert!(t.norm() < 1e-12);
    }

    #[test]
    fn tangent_projection_is_idempotent() {
        let mut rng = RngState::new(2);
        let u = haar_sample(7, 3, &mut rng);
        let z = gaussian_matrix(7, 3, &mut rng);
        let t1 = project_tangent(&z, &u);
        let t2 = project_tangent(t1.value(), &u);
        assert!(t1.value().sub(t2.value()).frobenius_norm() < 1e-10);
        assert!(t1.is_tangent());
    }

    #[test]
    fn hand_case_on_the_circle() {
        // n=2, k=1, Y=(1,0): pi_T((a,b)) = (0,b)
        let y = point_2_1(1.0, 0.0);
        let z = Matrix::from_rows(&[vec![0.3], vec![-1.7]]).unwrap();
        let t = project_tangent(&z, &y);
        assert!((t.value()[(0, 0)]).abs() < 1e-15);
        assert!((t.value()[(1, 0)] + 1.7).abs() < 1e-15);
    }

    #[test]
    fn tangent_plus_normal_reconstructs_input() {
        let mut rng = RngState::new(3);
        let u = haar_sample(8, 3, &mut rng);
        let z = gaussian_matrix(8, 3, &mut rng);
        let t = project_tangent(&z, &u);
        let n = project_normal(&z, &u);
        assert!(t.value().add(&n).sub(&z).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn normal_projection_cases() {
        let mut rng = RngState::new(4);
        let u = haar_sample(5, 2, &mut rng);
        // Z = Y -> fully normal
        let n = project_normal(u.frame(), &u);
        assert!(n.sub(u.frame()).frobenius_norm() < 1e-12);
        // Z tangent -> zero normal part
        let z = gaussian_matrix(5, 2, &mut rng);
        let t = project_tangent(&z, &u);
        assert!(project_normal(t.value(), &u).frobenius_norm() < 1e-12);
    }

    #[test]
    fn haar_is_on_manifold_and_sign_balanced() {
        let mut rng = RngState::new(5);
        for _ in 0..20 {
            let u = haar_sample(9, 4, &mut rng);
            assert!(u.manifold_residual() < 1e-10);
        }
        // k = n = 1: frame is +-1 with equal frequency
        let mut plus = 0usize;
        let draws = 10_000;
        for _ in 0..draws {
            let u = haar_sample(1, 1, &mut rng);
            let v = u.frame()[(0, 0)];
            assert!((v.abs() - 1.0).abs() < 1e-12);
            if v > 0.0 {
                plus += 1;
            }
        }
        let freq = plus as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.02, "sign frequency {freq}");
    }

    #[test]
    fn haar_rotation_invariance_first_moment() {
        // mean entry of U tends to 0 under Haar measure
        let mut rng = RngState::new(6);
        let draws = 10_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let u = haar_sample(4, 2, &mut rng);
            acc += u.frame().data().iter().sum::<f64>() / 8.0;
        }
        let mean = acc / draws as f64;
        assert!(mean.abs() < 0.02, "mean entry {mean}");
    }
}
