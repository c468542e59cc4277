use nalgebra::{DMatrix, DVector};

use super::{ReentryState, VehicleParams, STATE_DIM};
use crate::error::{Error, Result};
use crate::estimators::DynamicsModel;

/// Aerodynamic drag `½ A C ρ₀ e^(−h/H) v²` in kg·km/s².
///
/// Area is in m², density in kg/m³ and speed in km/s, so the SI force is
/// `½ A C ρ (1000 v)²` N and one kg·km/s² is 1000 N.
pub fn drag(s: &ReentryState, p: &VehicleParams) -> f64 {
    let rho = p.rho0_kg_m3 * (-s.h / p.scale_height_km).exp();
    500.0 * p.area_m2 * s.c * rho * s.v * s.v
}

/// `[ẋ, ḣ, v̇, γ̇, Ċ]` of the planar re-entry equations, with `g = μ/(R_E + h)²`.
pub fn reentry_derivatives(s: &ReentryState, p: &VehicleParams) -> Result<[f64; 5]> {
    if s.v.abs() < 1e-9 {
        return Err(Error::DegenerateSpeed { v: s.v });
    }
    let r = p.earth_radius_km + s.h;
    let g = p.mu_km3_s2 / (r * r);
    let (sin_g, cos_g) = s.gamma.sin_cos();
    Ok([
        p.earth_radius_km / r * s.v * cos_g,
        s.v * sin_g,
        -drag(s, p) / p.mass_kg - g * sin_g,
        -(g - s.v * s.v / r) * cos_g / s.v,
        0.0,
    ])
}

/// Closed-form `∂f/∂x` of [`reentry_derivatives`], rows and columns in
/// `(x, h, v, γ, C)` order.
pub fn reentry_jacobian(s: &ReentryState, p: &VehicleParams) -> Result<DMatrix<f64>> {
    if s.v.abs() < 1e-9 {
        return Err(Error::DegenerateSpeed { v: s.v });
    }
    let r = p.earth_radius_km + s.h;
    let g = p.mu_km3_s2 / (r * r);
    let (sin_g, cos_g) = s.gamma.sin_cos();
    let v = s.v;
    // Drag per unit C, so the C column stays defined at C = 0.
    let drag_per_c = 500.0 * p.area_m2 * p.rho0_kg_m3 * (-s.h / p.scale_height_km).exp() * v * v;
    let d = drag_per_c * s.c;
    let m = p.mass_kg;
    let re = p.earth_radius_km;

    let mut j = DMatrix::zeros(STATE_DIM, STATE_DIM);
    j[(0, 1)] = -re / (r * r) * v * cos_g;
    j[(0, 2)] = re / r * cos_g;
    j[(0, 3)] = -re / r * v * sin_g;
    j[(1, 2)] = sin_g;
    j[(1, 3)] = v * cos_g;
    j[(2, 1)] = d / (p.scale_height_km * m) + 2.0 * g / r * sin_g;
    j[(2, 2)] = -2.0 * d / (v * m);
    j[(2, 3)] = -g * cos_g;
    j[(2, 4)] = -drag_per_c / m;
    j[(3, 1)] = (2.0 * g / (r * v) - v / (r * r)) * cos_g;
    j[(3, 2)] = (g / (v * v) + 1.0 / r) * cos_g;
    j[(3, 3)] = (g / v - v / r) * sin_g;
    Ok(j)
}

/// `v²/2 − μ/(R_E + h)`; drag makes it non-increasing along a trajectory.
pub fn specific_energy(s: &ReentryState, p: &VehicleParams) -> f64 {
    0.5 * s.v * s.v - p.mu_km3_s2 / (p.earth_radius_km + s.h)
}

/// Re-entry dynamics with additive process noise on every state.
#[derive(Debug, Clone)]
pub struct ReentryDynamics {
    params: VehicleParams,
    noise_input: DMatrix<f64>,
    q: DMatrix<f64>,
}

impl ReentryDynamics {
    pub fn new(params: VehicleParams, q: DMatrix<f64>) -> Self {
        Self {
            params,
            noise_input: DMatrix::identity(STATE_DIM, STATE_DIM),
            q,
        }
    }

    pub fn params(&self) -> &VehicleParams {
        &self.params
    }
}

impl DynamicsModel for ReentryDynamics {
    fn state_dim(&self) -> usize {
        STATE_DIM
    }

    fn drift(&self, x: &DVector<f64>, _t: f64) -> Result<DVector<f64>> {
        let d = reentry_derivatives(&ReentryState::from_slice(x.as_slice()), &self.params)?;
        Ok(DVector::from_row_slice(&d))
    }

    fn noise_input(&self) -> &DMatrix<f64> {
        &self.noise_input
    }

    fn process_noise(&self) -> &DMatrix<f64> {
        &self.q
    }

    fn state_jacobian(&self, x: &DVector<f64>, _t: f64) -> Result<DMatrix<f64>> {
        reentry_jacobian(&ReentryState::from_slice(x.as_slice()), &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn level_flight() {
        let p = params();
        let s = ReentryState { x: 0.0, h: 50.0, v: 3.0, gamma: 0.0, c: 0.7 };
        let d = reentry_derivatives(&s, &p).unwrap();
        assert_eq!(d[1], 0.0);
        assert!((d[0] - 3.0 * p.earth_radius_km / (p.earth_radius_km + 50.0)).abs() < 1e-15);
    }

    #[test]
    fn vertical_fall_without_drag() {
        let p = params();
        let s = ReentryState { x: 0.0, h: 80.0, v: 2.0, gamma: -std::f64::consts::FRAC_PI_2, c: 0.0 };
        let d = reentry_derivatives(&s, &p).unwrap();
        assert!((d[1] + 2.0).abs() < 1e-15);
        assert!((d[2] - p.gravity(80.0)).abs() < 1e-15);
    }

    #[test]
    fn reference_state_by_hand() {
        // Every term evaluated separately from the defaults.
        let p = params();
        let s = ReentryState::reference_initial();
        let r = 6371.0 + 100.0;
        let g = 398_600.4418 / (r * r);
        let gamma = -10f64.to_radians();
        let rho = 1.225 * (-100.0f64 / 7.5).exp();
        let drag_n = 0.5 * 0.5 * 0.7 * rho * 6000.0 * 6000.0;
        let decel = drag_n / 1000.0 / 1000.0; // m/s² → km/s²
        let expected = [
            6371.0 / r * 6.0 * gamma.cos(),
            6.0 * gamma.sin(),
            -decel - g * gamma.sin(),
            -(1.0 / 6.0) * (g - 36.0 / r) * gamma.cos(),
            0.0,
        ];
        let d = reentry_derivatives(&s, &p).unwrap();
        for i in 0..5 {
            assert!((d[i] - expected[i]).abs() <= 1e-14 * expected[i].abs().max(1e-3), "component {i}");
        }
    }

    #[test]
    fn drag_limits() {
        let p = params();
        let base = ReentryState { x: 0.0, h: 0.0, v: 2.0, gamma: 0.0, c: 0.7 };
        let at_ground = drag(&base, &p);
        assert!((at_ground - 500.0 * 0.5 * 0.7 * 1.225 * 4.0).abs() < 1e-9);
        assert_eq!(drag(&ReentryState { v: 0.0, ..base }, &p), 0.0);
        let at_scale = drag(&ReentryState { h: p.scale_height_km, ..base }, &p);
        assert!((at_scale - at_ground * (-1f64).exp()).abs() <= 1e-12 * at_ground);
    }

    #[test]
    fn zero_speed_is_rejected() {
        let s = ReentryState { v: 0.0, ..ReentryState::reference_initial() };
        assert!(matches!(reentry_derivatives(&s, &params()), Err(Error::DegenerateSpeed { .. })));
    }

    #[test]
    fn closed_form_jacobian_matches_differences() {
        let model = ReentryDynamics::new(params(), DMatrix::zeros(5, 5));
        for s in [
            ReentryState::reference_initial(),
            ReentryState { x: 40.0, h: 30.0, v: 2.5, gamma: -0.6, c: 0.9 },
            ReentryState { x: -3.0, h: 70.0, v: 5.0, gamma: 0.2, c: 0.0 },
        ] {
            let x = s.to_vector();
            let a = model.state_jacobian(&x, 0.0).unwrap();
            let n = crate::numkit::numerical_jacobian(|p, t| model.drift(p, t), &x, 0.0).unwrap();
            for i in 0..5 {
                let scale = n.row(i).amax().max(1e-12);
                for k in 0..5 {
                    assert!((a[(i, k)] - n[(i, k)]).abs() <= 1e-6 * scale, "{s:?} ({i}, {k}): {} vs {}", a[(i, k)], n[(i, k)]);
                }
            }
        }
    }

    #[test]
    fn jacobian_agrees_with_finer_difference() {
        // Richardson-combined central differences at steps h and h/2 as the oracle.
        let model = ReentryDynamics::new(params(), DMatrix::zeros(5, 5));
        let x = ReentryState::reference_initial().to_vector();
        let j = model.state_jacobian(&x, 0.0).unwrap();
        let mut oracle = DMatrix::zeros(5, 5);
        for k in 0..5 {
            let h = 1e-3 * x[k].abs().max(1e-2);
            let cd = |h: f64| {
                let mut p = x.clone();
                let mut m = x.clone();
                p[k] += h;
                m[k] -= h;
                (model.drift(&p, 0.0).unwrap() - model.drift(&m, 0.0).unwrap()) / (2.0 * h)
            };
            let rich = (cd(h / 2.0) * 4.0 - cd(h)) / 3.0;
            oracle.set_column(k, &rich);
        }
        for i in 0..5 {
            for k in 0..5 {
                let scale = oracle.row(i).amax().max(1e-12);
                assert!((j[(i, k)] - oracle[(i, k)]).abs() <= 1e-6 * scale, "({i}, {k}): {} vs {}", j[(i, k)], oracle[(i, k)]);
            }
        }
    }
}
