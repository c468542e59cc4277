use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use super::{GnssSatellite, LeoState, SPEED_OF_LIGHT_KM_S};
use crate::error::{Error, Result};
use crate::estimators::MeasurementModel;
use crate::rng::RunRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnssMeasurement {
    /// Index into the satellite list the measurement was simulated from.
    pub sat: usize,
    pub epoch: f64,
    pub pseudorange_km: f64,
    pub carrier_range_km: f64,
    /// Satellite position at `epoch`; broadcast ephemerides are taken as exact.
    pub sat_position: [f64; 3],
    pub sat_clock_bias_s: f64,
}

impl GnssMeasurement {
    pub fn sat_position(&self) -> Vector3<f64> {
        Vector3::from(self.sat_position)
    }
}

/// Ionosphere-free range `(ρ + Φ) / 2`.
pub fn graphic_combine(m: &GnssMeasurement) -> f64 {
    0.5 * (m.pseudorange_km + m.carrier_range_km)
}

/// Slant delay `I₀ / sin(elevation)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonoModel {
    pub zenith_delay_km: f64,
}

impl Default for IonoModel {
    fn default() -> Self {
        Self { zenith_delay_km: 0.005 }
    }
}

impl IonoModel {
    pub fn none() -> Self {
        Self { zenith_delay_km: 0.0 }
    }

    pub fn slant_delay(&self, elevation_rad: f64) -> f64 {
        self.zenith_delay_km / elevation_rad.sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GnssNoise {
    pub sigma_pseudorange_km: f64,
    pub sigma_carrier_km: f64,
}

impl Default for GnssNoise {
    fn default() -> Self {
        Self {
            sigma_pseudorange_km: 1e-3,
            sigma_carrier_km: 1e-5,
        }
    }
}

impl GnssNoise {
    pub fn none() -> Self {
        Self {
            sigma_pseudorange_km: 0.0,
            sigma_carrier_km: 0.0,
        }
    }

    pub fn graphic_sigma(&self) -> f64 {
        0.5 * self.sigma_pseudorange_km.hypot(self.sigma_carrier_km)
    }
}

/// A satellite is tracked when the line of sight clears the Earth and it
/// rises above `min_elevation_deg` over the receiver's local horizontal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilityMask {
    pub earth_radius_km: f64,
    pub min_elevation_deg: f64,
}

impl Default for VisibilityMask {
    fn default() -> Self {
        Self {
            earth_radius_km: 6378.137,
            min_elevation_deg: 5.0,
        }
    }
}

/// True when the segment `a → b` stays outside the sphere of `radius`.
pub fn line_of_sight_clear(a: &Vector3<f64>, b: &Vector3<f64>, radius: f64) -> bool {
    let d = b - a;
    let s = (-a.dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (a + d * s).norm() > radius
}

fn elevation(user: &Vector3<f64>, sat: &Vector3<f64>) -> f64 {
    let los = sat - user;
    (los.dot(user) / (los.norm() * user.norm())).clamp(-1.0, 1.0).asin()
}

/// Pseudo-range and carrier-range to every tracked satellite.
///
/// Ranges are instantaneous (no light time), the carrier integer ambiguity
/// is zero, and the ionosphere delays code and advances carrier by the same
/// amount.
#[allow(clippy::too_many_arguments)]
pub fn simulate_measurements(
    user: &LeoState,
    epoch: f64,
    sats: &[GnssSatellite],
    mu: f64,
    iono: &IonoModel,
    noise: &GnssNoise,
    mask: &VisibilityMask,
    rng: &mut RunRng,
) -> Result<Vec<GnssMeasurement>> {
    let r = user.position();
    let min_el = mask.min_elevation_deg.to_radians();
    let mut out = Vec::new();
    for (i, sat) in sats.iter().enumerate() {
        let p = sat.position(epoch, mu);
        let el = elevation(&r, &p);
        if el < min_el || !line_of_sight_clear(&r, &p, mask.earth_radius_km) {
            continue;
        }
        let geometric = (p - r).norm();
        let clock = SPEED_OF_LIGHT_KM_S * (user.clock_bias - sat.clock_bias_s);
        let delay = iono.slant_delay(el);
        out.push(GnssMeasurement {
            sat: i,
            epoch,
            pseudorange_km: geometric + clock + delay + rng.gaussian(noise.sigma_pseudorange_km),
            carrier_range_km: geometric + clock - delay + rng.gaussian(noise.sigma_carrier_km),
            sat_position: p.into(),
            sat_clock_bias_s: sat.clock_bias_s,
        });
    }
    if out.is_empty() {
        return Err(Error::NoVisibleSatellites { t: epoch });
    }
    Ok(out)
}

/// How the filter consumes the two range types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    #[default]
    Graphic,
    PseudorangeOnly,
    /// ρ and Φ stacked as separate measurements.
    Raw,
}

/// Range model `|p_sat − r| + c (δt_u − δt_i)` for the 8-state LEO filter.
#[derive(Debug, Clone)]
pub struct GnssMeasurementModel {
    sats: Vec<(Vector3<f64>, f64)>,
    stacked: bool,
    r: DMatrix<f64>,
}

impl GnssMeasurementModel {
    /// Builds the model and observation vector for one epoch.
    pub fn new(measurements: &[GnssMeasurement], pipeline: Pipeline, assumed: &GnssNoise) -> (Self, DVector<f64>) {
        let sats: Vec<_> = measurements
            .iter()
            .map(|m| (m.sat_position(), m.sat_clock_bias_s))
            .collect();
        let n = measurements.len();
        let (z, var, stacked) = match pipeline {
            Pipeline::Graphic => (
                measurements.iter().map(graphic_combine).collect::<Vec<_>>(),
                vec![assumed.graphic_sigma().powi(2); n],
                false,
            ),
            Pipeline::PseudorangeOnly => (
                measurements.iter().map(|m| m.pseudorange_km).collect(),
                vec![assumed.sigma_pseudorange_km.powi(2); n],
                false,
            ),
            Pipeline::Raw => {
                let mut z: Vec<f64> = measurements.iter().map(|m| m.pseudorange_km).collect();
                z.extend(measurements.iter().map(|m| m.carrier_range_km));
                let mut var = vec![assumed.sigma_pseudorange_km.powi(2); n];
                var.extend(std::iter::repeat_n(assumed.sigma_carrier_km.powi(2), n));
                (z, var, true)
            }
        };
        let model = Self {
            sats,
            stacked,
            r: DMatrix::from_diagonal(&DVector::from_vec(var)),
        };
        (model, DVector::from_vec(z))
    }

    fn ranges(&self, x: &DVector<f64>) -> impl Iterator<Item = (Vector3<f64>, f64)> + '_ {
        let r = Vector3::new(x[0], x[1], x[2]);
        let bias = x[6];
        self.sats.iter().map(move |(p, dt)| {
            let los = p - r;
            let range = los.norm();
            (los / range, range + SPEED_OF_LIGHT_KM_S * (bias - dt))
        })
    }
}

impl MeasurementModel for GnssMeasurementModel {
    fn dim(&self) -> usize {
        self.r.nrows()
    }

    fn measure(&self, x: &DVector<f64>, _t: f64) -> Result<DVector<f64>> {
        let single: Vec<f64> = self.ranges(x).map(|(_, range)| range).collect();
        let mut z = single.clone();
        if self.stacked {
            z.extend(single);
        }
        Ok(DVector::from_vec(z))
    }

    fn noise_covariance(&self) -> &DMatrix<f64> {
        &self.r
    }

    fn jacobian(&self, x: &DVector<f64>, _t: f64) -> Result<DMatrix<f64>> {
        let n = self.sats.len();
        let mut h = DMatrix::zeros(self.dim(), x.len());
        for (i, (u, _)) in self.ranges(x).enumerate() {
            for row in [i, i + n].into_iter().take(if self.stacked { 2 } else { 1 }) {
                h[(row, 0)] = -u.x;
                h[(row, 1)] = -u.y;
                h[(row, 2)] = -u.z;
                h[(row, 6)] = SPEED_OF_LIGHT_KM_S;
            }
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leonav::{build_constellation, ConstellationSpec};
    use crate::numkit::numerical_jacobian_map;

    const MU: f64 = 398_600.4418;

    fn leo() -> LeoState {
        LeoState::circular(6892.0, 97.4f64.to_radians(), MU)
    }

    fn simulate(user: &LeoState, iono: IonoModel, noise: GnssNoise) -> Vec<GnssMeasurement> {
        let sats = build_constellation(&ConstellationSpec::default());
        let mut rng = RunRng::new(5, 0);
        simulate_measurements(user, 0.0, &sats, MU, &iono, &noise, &VisibilityMask::default(), &mut rng).unwrap()
    }

    #[test]
    fn clean_ranges_are_geometric() {
        let user = leo();
        let ms = simulate(&user, IonoModel::none(), GnssNoise::none());
        assert!(ms.len() >= 8, "only {} satellites tracked", ms.len());
        for m in &ms {
            let g = (m.sat_position() - user.position()).norm();
            assert_eq!(m.pseudorange_km, g);
            assert_eq!(m.carrier_range_km, g);
        }
    }

    #[test]
    fn receiver_clock_offsets_every_range() {
        let user = leo();
        let mut biased = user;
        biased.clock_bias = 1e-3;
        let clean = simulate(&user, IonoModel::none(), GnssNoise::none());
        let offset = simulate(&biased, IonoModel::none(), GnssNoise::none());
        for (a, b) in clean.iter().zip(&offset) {
            assert!((b.pseudorange_km - a.pseudorange_km - 299.792458).abs() < 1e-9);
        }
    }

    #[test]
    fn code_minus_carrier_is_twice_the_delay() {
        let user = leo();
        let iono = IonoModel::default();
        for m in simulate(&user, iono, GnssNoise::none()) {
            let el = elevation(&user.position(), &m.sat_position());
            let two_i = 2.0 * iono.slant_delay(el);
            // ρ and Φ are ~2e4 km, whose spacing in f64 is ~3.6e-12 km.
            assert!((m.pseudorange_km - m.carrier_range_km - two_i).abs() < 1e-11);
        }
    }

    #[test]
    fn graphic_cancels_iono_and_keeps_clock() {
        let mut user = leo();
        user.clock_bias = 2e-4;
        for m in simulate(&user, IonoModel::default(), GnssNoise::none()) {
            let g = (m.sat_position() - user.position()).norm();
            let expected = g + SPEED_OF_LIGHT_KM_S * 2e-4;
            assert!((graphic_combine(&m) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn graphic_without_iono_averages_noise() {
        let m = GnssMeasurement {
            sat: 0,
            epoch: 0.0,
            pseudorange_km: 20_000.0 + 3e-4,
            carrier_range_km: 20_000.0 - 1e-4,
            sat_position: [0.0; 3],
            sat_clock_bias_s: 0.0,
        };
        assert!((graphic_combine(&m) - (20_000.0 + 1e-4)).abs() < 1e-11);
    }

    #[test]
    fn earth_blocks_the_far_side() {
        let user = Vector3::new(6900.0, 0.0, 0.0);
        assert!(!line_of_sight_clear(&user, &Vector3::new(-26_560.0, 0.0, 0.0), 6378.137));
        assert!(line_of_sight_clear(&user, &Vector3::new(26_560.0, 0.0, 0.0), 6378.137));
        let sat = GnssSatellite {
            constellation: crate::leonav::Constellation::Gps,
            prn: 1,
            semi_major_axis_km: 26_560.0,
            inclination_rad: 0.0,
            raan_rad: 0.0,
            arg_latitude_rad: std::f64::consts::PI,
            clock_bias_s: 0.0,
        };
        let state = LeoState { position: [6900.0, 0.0, 0.0], ..leo() };
        let mask = VisibilityMask { min_elevation_deg: -90.0, ..VisibilityMask::default() };
        let err = simulate_measurements(&state, 0.0, &[sat], MU, &IonoModel::none(), &GnssNoise::none(), &mask, &mut RunRng::new(0, 0));
        assert!(matches!(err, Err(Error::NoVisibleSatellites { .. })));
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let user = leo();
        let ms = simulate(&user, IonoModel::none(), GnssNoise::none());
        for pipeline in [Pipeline::Graphic, Pipeline::Raw] {
            let (model, z) = GnssMeasurementModel::new(&ms, pipeline, &GnssNoise::default());
            assert_eq!(model.dim(), z.len());
            let mut x = user.to_vector();
            x[6] = 1e-4;
            let h = model.jacobian(&x, 0.0).unwrap();
            let num = numerical_jacobian_map(|p| model.measure(p, 0.0), &x).unwrap();
            assert!((&h - &num).amax() < 1e-9 * h.amax(), "{pipeline:?}");
        }
    }

    #[test]
    fn model_reproduces_clean_graphic_ranges() {
        let mut user = leo();
        user.clock_bias = 1e-3;
        let ms = simulate(&user, IonoModel::default(), GnssNoise::none());
        let (model, z) = GnssMeasurementModel::new(&ms, Pipeline::Graphic, &GnssNoise::default());
        let pred = model.measure(&user.to_vector(), 0.0).unwrap();
        assert!((pred - z).amax() < 1e-9);
    }
}
