use nalgebra::DVector;

use crate::error::{Error, Result};

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<F>(f: &F, x: &DVector<f64>, t: f64, dt: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>, f64) -> Result<DVector<f64>> + ?Sized,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("rk4 step must be positive, got {dt}")));
    }
    let half = 0.5 * dt;
    let k1 = f(x, t)?;
    let k2 = f(&(x + &k1 * half), t + half)?;
    let k3 = f(&(x + &k2 * half), t + half)?;
    let k4 = f(&(x + &k3 * dt), t + dt)?;
    let next = x + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: t + dt });
    }
    Ok(next)
}

/// Integrates from `t0` to `t1` with `ceil((t1 - t0) / substep)` RK4 steps,
/// the last one shortened so the result lands exactly on `t1`.
pub fn propagate<F>(f: &F, x: &DVector<f64>, t0: f64, t1: f64, substep: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>, f64) -> Result<DVector<f64>> + ?Sized,
{
    if !(t1 > t0) || !(substep > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "propagate needs t1 > t0 and substep > 0 (t0 = {t0}, t1 = {t1}, substep = {substep})"
        )));
    }
    // Absorbs rounding so that e.g. 1.0 / 0.1 gives 10 steps, not 11.
    let steps = ((t1 - t0) / substep - 1e-9).ceil().max(1.0) as usize;
    let mut state = x.clone();
    for k in 0..steps {
        let t = t0 + k as f64 * substep;
        let h = if k + 1 == steps { t1 - t } else { substep };
        state = rk4_step(f, &state, t, h)?;
    }
    Ok(state)
}
