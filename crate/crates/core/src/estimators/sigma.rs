use nalgebra::{DMatrix, DVector};

use super::model::check_dims;
use super::state::StateEstimate;
use crate::error::{Error, Result};
use crate::numkit::cholesky_sqrt;

/// Spread parameter `κ` and augmented dimension `n`; sigma offsets are the
/// columns of `√((n + κ) P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UTParams {
    pub kappa: f64,
    pub augmented_dim: usize,
}

impl UTParams {
    /// `kappa = None` selects `κ = 3 − n`.
    pub fn new(augmented_dim: usize, kappa: Option<f64>) -> Result<Self> {
        let kappa = kappa.unwrap_or(3.0 - augmented_dim as f64);
        if !(augmented_dim as f64 + kappa > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "n + kappa must be positive (n = {augmented_dim}, kappa = {kappa})"
            )));
        }
        Ok(Self {
            kappa,
            augmented_dim,
        })
    }

    pub fn spread(&self) -> f64 {
        self.augmented_dim as f64 + self.kappa
    }

    pub fn center_weight(&self) -> f64 {
        self.kappa / self.spread()
    }

    pub fn offset_weight(&self) -> f64 {
        1.0 / (2.0 * self.spread())
    }
}

/// `2n + 1` weighted points. Index 0 is the centre, `1..=n` the positive
/// offsets and `n+1..=2n` the mirrored negative ones.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPointSet {
    pub points: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
}

impl SigmaPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Offsets `X_i − X_0`.
    pub fn offsets(&self) -> Vec<DVector<f64>> {
        let center = &self.points[0];
        self.points.iter().map(|p| p - center).collect()
    }
}

/// Augmented mean `[x; 0]` and block-diagonal covariance `[[P, 0], [0, Q]]`.
pub fn build_augmented(
    est: &StateEstimate,
    q: &DMatrix<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch {
            what: "process noise columns",
            expected: q.nrows(),
            got: q.ncols(),
        });
    }
    let n = est.dim();
    let m = q.nrows();
    let mut mean = DVector::zeros(n + m);
    mean.rows_mut(0, n).copy_from(&est.mean);
    let mut cov = DMatrix::zeros(n + m, n + m);
    cov.view_mut((0, 0), (n, n)).copy_from(&est.covariance);
    cov.view_mut((n, n), (m, m)).copy_from(q);
    Ok((mean, cov))
}

pub fn generate_sigma_points(
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    params: &UTParams,
) -> Result<SigmaPointSet> {
    let n = params.augmented_dim;
    check_dims("sigma point mean", n, mean.len())?;
    check_dims("sigma point covariance", n, cov.nrows())?;
    let root = cholesky_sqrt(&(cov * params.spread()))?;

    let mut points = Vec::with_capacity(2 * n + 1);
    points.push(mean.clone());
    for i in 0..n {
        points.push(mean + root.column(i));
    }
    for i in 0..n {
        points.push(mean - root.column(i));
    }
    let mut weights = vec![params.offset_weight(); 2 * n + 1];
    weights[0] = params.center_weight();
    Ok(SigmaPointSet { points, weights })
}

/// Weighted mean and weighted outer-product covariance about that mean.
pub fn ut_moments(set: &SigmaPointSet) -> (DVector<f64>, DMatrix<f64>) {
    assert!(!set.is_empty(), "empty sigma point set");
    let n = set.points[0].len();
    let mut mean = DVector::zeros(n);
    for (p, &w) in set.points.iter().zip(&set.weights) {
        mean.axpy(w, p, 1.0);
    }
    let mut cov = DMatrix::zeros(n, n);
    for (p, &w) in set.points.iter().zip(&set.weights) {
        let d = p - &mean;
        cov.ger(w, &d, &d, 1.0);
    }
    (mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_reference_set() {
        let params = UTParams::new(1, Some(2.0)).unwrap();
        let set = generate_sigma_points(
            &DVector::from_element(1, 0.0),
            &DMatrix::from_element(1, 1, 4.0),
            &params,
        )
        .unwrap();
        let pts: Vec<f64> = set.points.iter().map(|p| p[0]).collect();
        assert_eq!(pts[0], 0.0);
        assert!((pts[1] - 12f64.sqrt()).abs() < 1e-15);
        assert!((pts[2] + 12f64.sqrt()).abs() < 1e-15);
        assert!((set.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((set.weights[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!((set.weights[2] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn default_kappa_for_ten_dimensions() {
        let params = UTParams::new(10, None).unwrap();
        assert_eq!(params.kappa, -7.0);
        let set = generate_sigma_points(
            &DVector::zeros(10),
            &DMatrix::identity(10, 10),
            &params,
        )
        .unwrap();
        assert_eq!(set.len(), 21);
        assert!((set.weights[0] + 7.0 / 3.0).abs() < 1e-15);
        assert!((set.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_spread() {
        assert!(UTParams::new(3, Some(-3.0)).is_err());
        assert!(UTParams::new(3, Some(-4.0)).is_err());
    }

    #[test]
    fn augmented_layout() {
        let est = StateEstimate::new(
            DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0]),
            DMatrix::from_fn(5, 5, |i, j| if i == j { 2.0 } else { 0.1 }),
            0.0,
        )
        .unwrap();
        let q = DMatrix::identity(5, 5) * 1e-15;
        let (m, p) = build_augmented(&est, &q).unwrap();
        assert_eq!(m.len(), 10);
        assert!(m.rows(5, 5).iter().all(|&v| v == 0.0));
        assert_eq!(p.view((0, 0), (5, 5)), est.covariance);
        assert!(p.view((0, 5), (5, 5)).iter().all(|&v| v == 0.0));
        assert_eq!(p.view((5, 5), (5, 5)), q);

        let est2 = StateEstimate::new(DVector::zeros(2), DMatrix::identity(2, 2), 0.0).unwrap();
        let (_, p2) = build_augmented(&est2, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(p2, DMatrix::identity(4, 4));
    }

    #[test]
    fn identical_points_have_zero_covariance() {
        let set = SigmaPointSet {
            points: vec![DVector::from_vec(vec![1.0, 2.0]); 5],
            weights: vec![-1.0, 0.5, 0.5, 0.5, 0.5],
        };
        let (m, p) = ut_moments(&set);
        assert!((m - DVector::from_vec(vec![1.0, 2.0])).amax() < 1e-15);
        assert!(p.amax() < 1e-15);
    }

    fn spd(n: usize, v: &[f64]) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |i, j| v[i * 8 + j]);
        &a * a.transpose() + DMatrix::identity(n, n) * 0.05
    }

    proptest! {
        #[test]
        fn reconstruction_identity(n in 1usize..=8, v in proptest::collection::vec(-1.0f64..1.0, 64),
                                   mu in proptest::collection::vec(-10.0f64..10.0, 8), kappa in -0.9f64..3.0) {
            let cov = spd(n, &v);
            let mean = DVector::from_iterator(n, mu.iter().copied().take(n));
            let params = UTParams::new(n, Some(kappa - n as f64 + 1.0)).unwrap();
            let set = generate_sigma_points(&mean, &cov, &params).unwrap();
            prop_assert_eq!(set.len(), 2 * n + 1);
            prop_assert!((set.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let (m, p) = ut_moments(&set);
            prop_assert!((m - &mean).amax() <= 1e-9);
            prop_assert!((p - &cov).amax() <= 1e-9);
        }

        #[test]
        fn linear_map_moments(v in proptest::collection::vec(-1.0f64..1.0, 64),
                              a in proptest::collection::vec(-2.0f64..2.0, 9)) {
            let cov = spd(3, &v);
            let mean = DVector::from_vec(vec![1.0, -2.0, 0.5]);
            let params = UTParams::new(3, None).unwrap();
            let set = generate_sigma_points(&mean, &cov, &params).unwrap();
            let map = DMatrix::from_row_slice(3, 3, &a);
            let mapped = SigmaPointSet {
                points: set.points.iter().map(|p| &map * p).collect(),
                weights: set.weights.clone(),
            };
            let (m, p) = ut_moments(&mapped);
            prop_assert!((m - &map * &mean).amax() <= 1e-9);
            prop_assert!((p - &map * &cov * map.transpose()).amax() <= 1e-9);
        }
    }
}
