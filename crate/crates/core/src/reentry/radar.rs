use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ReentryState, VehicleParams};
use crate::error::{Error, Result};
use crate::estimators::MeasurementModel;
use crate::rng::RunRng;

/// Radar position as a downrange distance from the re-entry point (km).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarSite {
    pub downrange_km: f64,
}

impl Default for RadarSite {
    fn default() -> Self {
        Self { downrange_km: 500.0 }
    }
}

/// Angular separation and the vertical/horizontal offsets in the radar's local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarGeometry {
    pub phi: f64,
    pub dh: f64,
    pub dd: f64,
}

pub fn radar_geometry(s: &ReentryState, site: &RadarSite, p: &VehicleParams) -> RadarGeometry {
    let re = p.earth_radius_km;
    let phi = (site.downrange_km - s.x) / re;
    let (sin_phi, cos_phi) = phi.sin_cos();
    RadarGeometry {
        phi,
        dh: (re + s.h) * cos_phi - re,
        dd: (re + s.h) * sin_phi,
    }
}

/// Noise-free `(range km, elevation rad)`; elevation is measured from the
/// radar's local horizontal.
pub fn radar_observe(s: &ReentryState, site: &RadarSite, p: &VehicleParams) -> Result<[f64; 2]> {
    let g = radar_geometry(s, site, p);
    if g.dh == 0.0 && g.dd == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    Ok([g.dh.hypot(g.dd), g.dh.atan2(g.dd)])
}

/// Noise-free observation plus zero-mean Gaussian range and elevation noise.
pub fn radar_measure(
    s: &ReentryState,
    site: &RadarSite,
    p: &VehicleParams,
    noise: &RadarNoiseSpec,
    rng: &mut RunRng,
) -> Result<[f64; 2]> {
    let [r, e] = radar_observe(s, site, p)?;
    Ok([
        r + rng.gaussian(noise.sigma_range_km),
        e + rng.gaussian(noise.sigma_elevation_rad),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoisePreset {
    /// 50 m range, 0.1° elevation.
    #[default]
    Sim50m,
    /// 20 m range, 17.5 mrad elevation.
    Model20m,
}

impl std::str::FromStr for NoisePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sim50m" => Ok(Self::Sim50m),
            "model20m" => Ok(Self::Model20m),
            other => Err(Error::InvalidArgument(format!("unknown noise preset '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarNoiseSpec {
    pub sigma_range_km: f64,
    pub sigma_elevation_rad: f64,
    pub seed: u64,
}

impl RadarNoiseSpec {
    pub fn from_preset(preset: NoisePreset, seed: u64) -> Self {
        let (sigma_range_km, sigma_elevation_rad) = match preset {
            NoisePreset::Sim50m => (0.050, 0.1f64.to_radians()),
            NoisePreset::Model20m => (0.020, 17.5e-3),
        };
        Self {
            sigma_range_km,
            sigma_elevation_rad,
            seed,
        }
    }

    /// Random stream for run `stream` under this noise seed.
    pub fn generator(&self, stream: u64) -> RunRng {
        RunRng::new(self.seed, stream)
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(vec![
            self.sigma_range_km.powi(2),
            self.sigma_elevation_rad.powi(2),
        ]))
    }
}

/// Range/elevation measurement model used by the filters.
#[derive(Debug, Clone)]
pub struct RadarMeasurement {
    site: RadarSite,
    params: VehicleParams,
    r: DMatrix<f64>,
}

impl RadarMeasurement {
    pub fn new(site: RadarSite, params: VehicleParams, noise: &RadarNoiseSpec) -> Self {
        Self {
            site,
            params,
            r: noise.covariance(),
        }
    }
}

impl MeasurementModel for RadarMeasurement {
    fn dim(&self) -> usize {
        2
    }

    fn measure(&self, x: &DVector<f64>, _t: f64) -> Result<DVector<f64>> {
        let obs = radar_observe(&ReentryState::from_slice(x.as_slice()), &self.site, &self.params)?;
        Ok(DVector::from_row_slice(&obs))
    }

    fn noise_covariance(&self) -> &DMatrix<f64> {
        &self.r
    }
}
