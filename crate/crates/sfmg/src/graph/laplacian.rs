//! Normalized Laplacian, truncated spectra, and rank-k reconstruction.

use crate::error::{Result, SfmgError};
use crate::graph::Graph;
use crate::numerics::{sym_eig, Matrix};

/// L = I - D^{-1/2} A D^{-1/2}, with the isolated-node convention
/// D^{-1/2}_ii = 0 for zero-degree nodes, so their rows equal the identity
/// row and each padding node contributes eigenvalue 1.
pub fn normalized_laplacian(g: &Graph) -> Matrix {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| {
            let d = g.degree(i);
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut l = Matrix::identity(n);
    let a = g.adjacency();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] != 0.0 {
                l[(i, j)] = -inv_sqrt[i] * a[(i, j)] * inv_sqrt[j];
            }
        }
    }
    l
}

/// Truncated spectrum: the k smallest eigenvalues with their sign-fixed
/// eigenvector frame U in V_k(R^n).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    k: usize,
    lambdas: Vec<f64>,
    frame: Matrix,
}

impl SpectralData {
    pub fn new(lambdas: Vec<f64>, frame: Matrix) -> Result<Self> {
        let k = lambdas.len();
        if frame.cols() != k {
            return Err(SfmgError::Shape(format!(
                "frame has {} columns for {k} eigenvalues",
                frame.cols()
            )));
        }
        let orth = frame
            .transpose()
            .matmul(&frame)
            .sub(&Matrix::identity(k))
            .frobenius_norm();
        if orth > 1e-8 {
            return Err(SfmgError::Degenerate(format!(
                "spectral frame is not orthonormal (residual {orth:.3e})"
            )));
        }
        Ok(SpectralData { k, lambdas, frame })
    }

    pub(crate) fn new_unchecked(lambdas: Vec<f64>, frame: Matrix) -> Self {
        SpectralData {
            k: lambdas.len(),
            lambdas,
            frame,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.frame.rows()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }
}

/// The k smallest eigenpairs of a symmetric matrix (small eigenvalues of the
/// normalized Laplacian carry the global structure).
pub fn truncated_spectrum(l: &Matrix, k: usize) -> Result<SpectralData> {
    let n = l.rows();
    if k == 0 || k > n {
        return Err(SfmgError::Invalid(format!(
            "truncation order k={k} outside 1..={n}"
        )));
    }
    let (vals, vecs) = sym_eig(l)?;
    let lambdas = vals[..k].to_vec();
    let frame = vecs.columns(0, k);
    Ok(SpectralData::new_unchecked(lambdas, frame))
}

/// L0 = U diag(lambda) U^T: the rank-k symmetric matrix a truncated
/// spectrum reconstructs.
pub fn reconstruct_laplacian(s: &SpectralData) -> Matrix {
    let weighted = s.frame.matmul(&Matrix::diagonal(&s.lambdas));
    weighted.matmul(&s.frame.transpose())
}
