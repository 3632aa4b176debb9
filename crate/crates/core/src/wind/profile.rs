use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Height of the input wind-speed layer, m.
pub const REFERENCE_HEIGHT: f64 = 10.0;

/// Mean wind speed at `hub` metres from the 10 m mean via the logarithmic
/// profile `v10 · ln(hub/z0) / ln(10/z0)`.
pub fn extrapolate_wind(v10: f64, z0: f64, hub: f64) -> Result<f64> {
    if !(z0 > 0.0 && z0 < REFERENCE_HEIGHT) {
        return Err(Error::InvalidRoughness(z0));
    }
    if !(hub >= REFERENCE_HEIGHT) {
        return Err(Error::InvalidInput(format!(
            "hub height {hub} m is below the {REFERENCE_HEIGHT} m reference"
        )));
    }
    if !(v10 >= 0.0) {
        return Err(Error::InvalidInput(format!("negative wind speed {v10}")));
    }
    Ok(v10 * (hub / z0).ln() / (REFERENCE_HEIGHT / z0).ln())
}

/// Two-parameter Weibull wind-speed distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullDistribution {
    pub shape: f64,
    pub scale: f64,
}

impl WeibullDistribution {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "Weibull shape {shape} and scale {scale} must be positive"
            )));
        }
        Ok(Self { shape, scale })
    }

    /// Weibull with the given shape whose mean is `v_mean`.
    pub fn from_mean(v_mean: f64, shape: f64) -> Result<Self> {
        if !(v_mean > 0.0 && v_mean.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "mean wind speed must be positive, got {v_mean}"
            )));
        }
        let scale = if shape == 2.0 {
            2.0 * v_mean / std::f64::consts::PI.sqrt()
        } else {
            v_mean / gamma(1.0 + 1.0 / shape)
        };
        Self::new(shape, scale)
    }

    pub fn mean(&self) -> f64 {
        self.scale * gamma(1.0 + 1.0 / self.shape)
    }

    pub fn cdf(&self, v: f64) -> f64 {
        1.0 - self.survival(v)
    }

    /// `P(V > v)`.
    pub fn survival(&self, v: f64) -> f64 {
        if v <= 0.0 {
            1.0
        } else if v.is_infinite() {
            0.0
        } else {
            (-(v / self.scale).powf(self.shape)).exp()
        }
    }

    pub fn pdf(&self, v: f64) -> f64 {
        if v < 0.0 {
            return 0.0;
        }
        let k = self.shape;
        let x = v / self.scale;
        k / self.scale * x.powf(k - 1.0) * (-x.powf(k)).exp()
    }
}

/// Rayleigh (Weibull shape 2) distribution with mean `v_mean`.
pub fn speed_distribution(v_mean: f64) -> Result<WeibullDistribution> {
    WeibullDistribution::from_mean(v_mean, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_height_is_identity() {
        assert_eq!(extrapolate_wind(6.3, 0.1, 10.0).unwrap(), 6.3);
    }

    #[test]
    fn hundred_metre_hub() {
        let v = extrapolate_wind(5.0, 0.03, 100.0).unwrap();
        let oracle = 5.0 * (100.0f64 / 0.03).ln() / (10.0f64 / 0.03).ln();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 6.982).abs() < 1e-3);
    }

    #[test]
    fn roughness_bounds() {
        assert!(matches!(
            extrapolate_wind(5.0, 12.0, 100.0),
            Err(Error::InvalidRoughness(_))
        ));
        assert!(matches!(
            extrapolate_wind(5.0, 0.0, 100.0),
            Err(Error::InvalidRoughness(_))
        ));
        assert!(matches!(
            extrapolate_wind(5.0, 10.0, 100.0),
            Err(Error::InvalidRoughness(_))
        ));
        assert!(extrapolate_wind(5.0, 0.1, 5.0).is_err());
    }

    #[test]
    fn rayleigh_scale() {
        let d = speed_distribution(7.0).unwrap();
        assert!((d.scale - 7.8988).abs() < 1e-3);
        assert!((d.mean() - 7.0).abs() < 1e-6);
        assert!(speed_distribution(0.0).is_err());
    }

    #[test]
    fn pdf_integrates_to_cdf() {
        let d = WeibullDistribution::new(2.3, 8.0).unwrap();
        let n = 200_000;
        let b = 12.0;
        let h = b / n as f64;
        let integral: f64 = (0..n).map(|j| d.pdf((j as f64 + 0.5) * h) * h).sum();
        assert!((integral - d.cdf(b)).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn mean_is_preserved(v in 0.5f64..20.0, k in 1.2f64..4.0) {
            let d = WeibullDistribution::from_mean(v, k).unwrap();
            prop_assert!((d.mean() - v).abs() < 1e-9 * v);
        }

        #[test]
        fn profile_increases_with_height(v in 0.1f64..20.0, z0 in 0.0002f64..2.0, h in 10.0f64..150.0, dh in 0.5f64..50.0) {
            prop_assert!(extrapolate_wind(v, z0, h + dh).unwrap() > extrapolate_wind(v, z0, h).unwrap());
        }
    }
}
