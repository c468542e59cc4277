use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Central-difference step for a component with value `x`.
#[inline]
pub fn jacobian_step(x: f64) -> f64 {
    (1e-6 * x.abs()).max(1e-6)
}

/// Central-difference Jacobian of a map `Rⁿ → Rᵐ`.
pub fn numerical_jacobian_map<F>(mut f: F, x: &DVector<f64>) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let n = x.len();
    let mut probe = x.clone();
    let mut jac: Option<DMatrix<f64>> = None;
    for j in 0..n {
        let h = jacobian_step(x[j]);
        probe[j] = x[j] + h;
        let plus = f(&probe)?;
        probe[j] = x[j] - h;
        let minus = f(&probe)?;
        probe[j] = x[j];
        if plus.iter().chain(minus.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDerivative { component: j });
        }
        let m = jac.get_or_insert_with(|| DMatrix::zeros(plus.len(), n));
        let col = (plus - minus) / (2.0 * h);
        m.set_column(j, &col);
    }
    Ok(jac.unwrap_or_else(|| DMatrix::zeros(0, 0)))
}

/// Central-difference Jacobian `∂f/∂x` of a derivative field at `(x, t)`.
pub fn numerical_jacobian<F>(f: F, x: &DVector<f64>, t: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>, f64) -> Result<DVector<f64>>,
{
    numerical_jacobian_map(|p| f(p, t), x)
}
