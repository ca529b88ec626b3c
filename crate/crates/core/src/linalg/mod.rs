//! Sparse symmetric linear algebra for the exact potential computations:
//! a minimum-degree LDLᵀ factorisation with selected inversion (for Green
//! kernel diagonals) and Jacobi-preconditioned conjugate gradients.

mod cg;
mod ldl;
mod sparse;

pub use cg::{conjugate_gradient, CgOutcome};
pub use ldl::LdlFactor;
pub use sparse::SymmetricMatrix;

/// Max-norm of `A x - b`.
pub fn residual_max_norm(a: &SymmetricMatrix, x: &[f64], b: &[f64]) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| (ax - bi).abs())
        .fold(0.0, f64::max)
}
