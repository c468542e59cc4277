use std::f64::consts::TAU;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constellation {
    Gps,
    Galileo,
}

impl Constellation {
    fn layout(self) -> (usize, usize, f64, f64) {
        // (satellites, planes, semi-major axis km, inclination deg)
        match self {
            Constellation::Gps => (32, 6, 26_560.0, 55.0),
            Constellation::Galileo => (30, 3, 29_600.0, 56.0),
        }
    }
}

/// A GNSS satellite on a circular Keplerian orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnssSatellite {
    pub constellation: Constellation,
    pub prn: usize,
    pub semi_major_axis_km: f64,
    pub inclination_rad: f64,
    pub raan_rad: f64,
    /// Argument of latitude at t = 0.
    pub arg_latitude_rad: f64,
    /// Satellite clock offset (s), assumed known to the receiver.
    pub clock_bias_s: f64,
}

impl GnssSatellite {
    pub fn position(&self, t: f64, mu: f64) -> Vector3<f64> {
        let a = self.semi_major_axis_km;
        let n = (mu / (a * a * a)).sqrt();
        let (su, cu) = (self.arg_latitude_rad + n * t).sin_cos();
        let (so, co) = self.raan_rad.sin_cos();
        let (si, ci) = self.inclination_rad.sin_cos();
        Vector3::new(
            a * (co * cu - so * su * ci),
            a * (so * cu + co * su * ci),
            a * su * si,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSpec {
    pub gps: bool,
    pub galileo: bool,
}

impl Default for ConstellationSpec {
    fn default() -> Self {
        Self { gps: true, galileo: true }
    }
}

/// Walker-like layout: satellites are dealt round-robin into equally spaced
/// planes, evenly phased within each plane and staggered between planes.
pub fn build_constellation(spec: &ConstellationSpec) -> Vec<GnssSatellite> {
    let mut out = Vec::new();
    for (enabled, which) in [(spec.gps, Constellation::Gps), (spec.galileo, Constellation::Galileo)] {
        if !enabled {
            continue;
        }
        let (count, planes, a, inc) = which.layout();
        for k in 0..count {
            let plane = k % planes;
            let slot = k / planes;
            let in_plane = count / planes + usize::from(plane < count % planes);
            out.push(GnssSatellite {
                constellation: which,
                prn: k + 1,
                semi_major_axis_km: a,
                inclination_rad: inc.to_radians(),
                raan_rad: TAU * plane as f64 / planes as f64,
                arg_latitude_rad: TAU * slot as f64 / in_plane as f64 + TAU * plane as f64 / count as f64,
                clock_bias_s: 0.0,
            });
        }
    }
    out
}

pub fn satellite_positions(sats: &[GnssSatellite], t: f64, mu: f64) -> Vec<Vector3<f64>> {
    sats.iter().map(|s| s.position(t, mu)).collect()
}
