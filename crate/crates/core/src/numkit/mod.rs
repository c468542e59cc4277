//! Dense numerical kernels shared by the filters and the scenarios.
//!
//! Everything here works on `nalgebra` dynamic matrices; dimensions in this
//! crate never exceed ~20 so there is no attempt at blocking or sparsity.

mod cholesky;
mod expm;
mod jacobian;
mod rk4;

pub use cholesky::cholesky_sqrt;
pub use expm::mat_exp;
pub use jacobian::{numerical_jacobian, numerical_jacobian_map, jacobian_step};
pub use rk4::{propagate, rk4_step};

use nalgebra::DMatrix;

/// Default integrator substep inside a measurement interval (s).
pub const DEFAULT_SUBSTEP: f64 = 0.1;

/// Replaces `m` by `(m + mᵀ) / 2`.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Frobenius norm of `a - b` relative to the Frobenius norm of `b`.
pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let denom = b.norm();
    let diff = (a - b).norm();
    if denom == 0.0 {
        diff
    } else {
        diff / denom
    }
}
