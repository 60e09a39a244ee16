//! Euler sampling of learned vector fields and the full three-stage
//! graph sampler.

use crate::error::Result;
use crate::flowmatch::net::VectorFieldNet;
use crate::graph::{finalize_binary, finalize_bonds, Graph};
use crate::numerics::{gaussian_matrix, gaussian_vector, Matrix, RngState};
use crate::stiefel::{haar_sample, project_tangent, stiefel_exp, StiefelPoint};

/// Integrate dx/dt = V(x, t) from t=0 to 1 with ceil(1/eps) Euler steps.
pub fn euler_sample_euclidean(
    net: &VectorFieldNet,
    x0: &[f64],
    eps: f64,
    cond: Option<&[f64]>,
) -> Vec<f64> {
    assert!(eps > 0.0 && eps <= 1.0, "step size must lie in (0, 1]");
    let steps = (1.0 / eps).ceil() as usize;
    let mut x = x0.to_vec();
    let mut t = 0.0;
    for _ in 0..steps {
        let v = net.forward(&x, t, cond);
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi += eps * vi;
        }
        t += eps;
    }
    x
}

/// Integrate a Stiefel field with the manifold Euler scheme
/// U <- Exp(U, eps * pi_T(V(U, t), U)); iterates stay on-manifold because
/// every step is an exact geodesic step.
pub fn euler_sample_stiefel(
    net: &VectorFieldNet,
    u0: &StiefelPoint,
    eps: f64,
    cond: Option<&[f64]>,
) -> Result<StiefelPoint> {
    assert!(eps > 0.0 && eps <= 1.0, "step size must lie in (0, 1]");
    let steps = (1.0 / eps).ceil() as usize;
    let (n, k) = (u0.n(), u0.k());
    let mut u = u0.clone();
    let mut t = 0.0;
    for _ in 0..steps {
        let raw = net.forward(u.frame().data(), t, cond);
        let z = Matrix::from_vec(n, k, raw)?;
        let v = project_tangent(&z, &u);
        u = stiefel_exp(&v.scale(eps))?;
        t += eps;
    }
    Ok(u)
}

/// The three trained generators plus the shape information needed to sample.
pub struct GeneratorSet {
    pub eigenvalues: VectorFieldNet,
    pub eigenvectors: VectorFieldNet,
    pub postprocess: VectorFieldNet,
}

impl GeneratorSet {
    pub fn k(&self) -> usize {
        self.eigenvalues.meta().output_dim
    }

    pub fn n(&self) -> usize {
        self.eigenvectors.meta().output_dim / self.k()
    }

    /// Node-feature dimension jointly modeled by the postprocess net
    /// (0 when the dataset has no features).
    pub fn feature_dim(&self) -> usize {
        let n = self.n();
        (self.postprocess.meta().output_dim - n * n) / n
    }
}

/// Three-stage sampling: eigenvalues -> eigenvectors conditioned on them ->
/// Laplacian reconstruction -> postprocess flow -> discrete finalization.
/// `bonds` switches the final quantization to the four-level bond rule.
pub fn sfmg_sample(nets: &GeneratorSet, eps: f64, rng: &mut RngState, bonds: bool) -> Result<Graph> {
    let k = nets.k();
    let n = nets.n();
    let m = nets.feature_dim();

    let lambda0 = gaussian_vector(k, rng);
    let lambda1 = euler_sample_euclidean(&nets.eigenvalues, &lambda0, eps, None);

    let u0 = haar_sample(n, k, rng);
    let u1 = euler_sample_stiefel(&nets.eigenvectors, &u0, eps, Some(&lambda1))?;

    let l0 = u1
        .frame()
        .matmul(&Matrix::diagonal(&lambda1))
        .matmul(&u1.frame().transpose());
    let mut x0 = l0.data().to_vec();
    if m > 0 {
        x0.extend(gaussian_matrix(n, m, rng).into_data());
    }

    let x1 = euler_sample_euclidean(&nets.postprocess, &x0, eps, None);
    let l1 = Matrix::from_vec(n, n, x1[..n * n].to_vec())?;
    let mut graph = if bonds {
        finalize_bonds(&l1)
    } else {
        finalize_binary(&l1)
    };
    if m > 0 {
        let features = Matrix::from_vec(n, m, x1[n * n..].to_vec())?;
        graph = graph.with_features(features)?;
    }
    Ok(graph)
}
