//! Dense linear-algebra kernels and deterministic random sources.

mod eig;
mod expm;
mod matrix;
mod qr;
pub mod rng;

pub use eig::{fix_column_signs, sym_eig};
pub use expm::{matrix_exp, orthogonal_log};
pub use matrix::Matrix;
pub use qr::{qr_full, thin_qr};
pub use rng::{gaussian_matrix, gaussian_vector, RngState};
