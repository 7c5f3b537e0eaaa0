use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::Table;
use crate::error::{Error, Result};
use crate::seed;

/// Two attributes tied by a noisy linear relation, with a fraction of rows
/// pushed off the relation. The off-relation rows stay inside the bulk of
/// the data cloud, so they are only visible through the relation itself.
///
/// The default noise is small against the length of the line (1:1000), so
/// the band is thinner than the typical gap between neighbouring points.
/// Distance-based detectors then see a one-dimensional curve whose ends look
/// sparser than the slightly displaced outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLinear {
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    pub noise_sigma: f64,
    pub outlier_fraction: f64,
    /// Minimum outlier residual, in units of `noise_sigma`. Must exceed 2 so
    /// outliers sit strictly outside the inlier band.
    pub outlier_offset_sigmas: f64,
    /// Width of the outlier residual range above the minimum, same units.
    pub outlier_spread_sigmas: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub seed: u64,
}

impl Default for SyntheticLinear {
    fn default() -> Self {
        SyntheticLinear {
            n: 1000,
            slope: 1.0,
            intercept: 0.0,
            noise_sigma: 0.001,
            outlier_fraction: 0.05,
            outlier_offset_sigmas: 3.0,
            outlier_spread_sigmas: 2.0,
            x_min: 0.0,
            x_max: 1.0,
            seed: 0,
        }
    }
}

/// Residual unit used for outliers when the inlier noise is exactly zero.
const ZERO_NOISE_UNIT: f64 = 0.01;

impl SyntheticLinear {
    pub fn n_outliers(&self) -> usize {
        (self.outlier_fraction * self.n as f64).round() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.outlier_fraction > 0.0 && self.outlier_fraction < 0.5) {
            return Err(Error::param(format!(
                "outlier fraction must lie in (0, 0.5), got {}",
                self.outlier_fraction
            )));
        }
        if self.n < 2 {
            return Err(Error::param("need at least 2 rows"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::param("noise sigma must be finite and non-negative"));
        }
        if !(self.outlier_offset_sigmas > 2.0) {
            return Err(Error::param(
                "outlier offset must exceed the 2-sigma inlier band",
            ));
        }
        if !(self.outlier_spread_sigmas >= 0.0) || !(self.x_max > self.x_min) {
            return Err(Error::param("invalid outlier spread or x range"));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Table> {
        self.validate()?;
        let mut rng = seed::rng(self.seed);
        let n_out = self.n_outliers();

        let mut is_outlier: Vec<bool> = (0..self.n).map(|i| i < n_out).collect();
        is_outlier.shuffle(&mut rng);

        let sigma = self.noise_sigma;
        let unit = if sigma > 0.0 { sigma } else { ZERO_NOISE_UNIT };
        let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("valid sigma");
        let (mut xs, mut ys) = (Vec::with_capacity(self.n), Vec::with_capacity(self.n));
        for &outlier in &is_outlier {
            let x = rng.gen_range(self.x_min..self.x_max);
            let residual = if outlier {
                let lo = self.outlier_offset_sigmas * unit;
                let hi = lo + self.outlier_spread_sigmas * unit;
                let mag = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                if rng.gen::<bool>() {
                    mag
                } else {
                    -mag
                }
            } else if sigma == 0.0 {
                0.0
            } else {
                // truncated to the 2-sigma band by rejection
                loop {
                    let r = normal.sample(&mut rng);
                    if r.abs() <= 2.0 * sigma {
                        break r;
                    }
                }
            };
            xs.push(x);
            ys.push(self.slope * x + self.intercept + residual);
        }
        let labels = is_outlier.iter().map(|&o| u8::from(o)).collect();
        Table::new(vec!["x".into(), "y".into()], vec![xs, ys], Some(labels))
    }
}

pub fn generate_synthetic_linear(params: &SyntheticLinear) -> Result<Table> {
    params.generate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residuals(t: &Table, p: &SyntheticLinear) -> Vec<f64> {
        t.column(0)
            .iter()
            .zip(t.column(1))
            .map(|(x, y)| y - (p.slope * x + p.intercept))
            .collect()
    }

    #[test]
    fn outlier_count_is_exact() {
        let p = SyntheticLinear::default();
        let t = p.generate().unwrap();
        assert_eq!(t.labels().unwrap().iter().filter(|&&l| l == 1).count(), 50);
    }

    #[test]
    fn zero_noise_inliers_lie_on_the_line() {
        let p = SyntheticLinear {
            noise_sigma: 0.0,
            slope: 2.5,
            intercept: -1.0,
            ..Default::default()
        };
        let t = p.generate().unwrap();
        for (r, &l) in residuals(&t, &p).iter().zip(t.labels().unwrap()) {
            if l == 0 {
                assert!(r.abs() < 1e-12);
            } else {
                assert!(r.abs() >= p.outlier_offset_sigmas * ZERO_NOISE_UNIT - 1e-12);
            }
        }
    }

    #[test]
    fn band_membership_matches_labels() {
        for seed in 0..5 {
            let p = SyntheticLinear {
                seed,
                n: 500,
                noise_sigma: 0.3,
                slope: -1.5,
                ..Default::default()
            };
            let t = p.generate().unwrap();
            for (r, &l) in residuals(&t, &p).iter().zip(t.labels().unwrap()) {
                // float slack from recomputing y - (a x + b)
                let outside = r.abs() > 2.0 * p.noise_sigma + 1e-9;
                assert_eq!(outside, l == 1, "residual {r} label {l}");
                if l == 1 {
                    assert!(r.abs() >= p.outlier_offset_sigmas * p.noise_sigma - 1e-9);
                }
            }
        }
    }

    #[test]
    fn invalid_fractions_rejected() {
        for f in [0.0, 0.5, 0.7, -0.1] {
            let p = SyntheticLinear {
                outlier_fraction: f,
                ..Default::default()
            };
            assert!(p.generate().is_err());
        }
        let p = SyntheticLinear {
            outlier_offset_sigmas: 1.5,
            ..Default::default()
        };
        assert!(p.generate().is_err());
    }

    #[test]
    fn same_seed_same_table() {
        let p = SyntheticLinear::default();
        assert_eq!(p.generate().unwrap(), p.generate().unwrap());
    }
}
