use std::collections::BTreeMap;

use nalgebra::DVector;

use super::landuse::LandUseGroup;
use super::linalg::{spd_inverse, Design};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    pub n_obs: usize,
}

/// Least squares via a QR factorisation of the design. `R²` is computed
/// against the mean of `y` when the design has a column named `constant`,
/// otherwise against zero.
pub fn fit_ols(y: &[f64], design: &Design) -> Result<OlsResult> {
    let n = design.n_obs();
    let k = design.n_params();
    if y.len() != n {
        return Err(Error::InvalidInput(
            "outcome and design lengths differ".into(),
        ));
    }
    if n <= k {
        return Err(Error::InvalidInput(format!(
            "{n} observations for {k} parameters"
        )));
    }
    design.ensure_full_rank()?;
    let yv = DVector::from_column_slice(y);
    let qr = design.x.clone().qr();
    let qty = qr.q().transpose() * &yv;
    let r = qr.r();
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Collinearity(design.names[k - 1].clone()))?;
    let fitted = &design.x * &beta;
    let resid = &yv - fitted;
    let rss = resid.norm_squared();
    let centre = if design.names.iter().any(|n| n == "constant") {
        yv.mean()
    } else {
        0.0
    };
    let tss: f64 = y.iter().map(|v| (v - centre).powi(2)).sum();
    let sigma2 = rss / (n - k) as f64;
    let xtx_inv = spd_inverse(&(r.transpose() * &r))
        .ok_or_else(|| Error::Collinearity(design.names[k - 1].clone()))?;
    Ok(OlsResult {
        names: design.names.clone(),
        coefficients: beta.iter().copied().collect(),
        std_errors: (0..k).map(|j| (sigma2 * xtx_inv[(j, j)]).sqrt()).collect(),
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 1.0 },
        residuals: resid.iter().copied().collect(),
        n_obs: n,
    })
}

/// Regresses deviations on aggregated land-use shares with a constant,
/// dropping `base` so the shares are not collinear with the constant.
pub fn deviation_regression(
    deviations: &[f64],
    shares: &[BTreeMap<LandUseGroup, f64>],
    base: Option<LandUseGroup>,
) -> Result<OlsResult> {
    if deviations.len() != shares.len() {
        return Err(Error::InvalidInput(
            "one share row per deviation required".into(),
        ));
    }
    let n = deviations.len();
    let mut names = vec!["constant".to_string()];
    let mut cols = vec![vec![1.0; n]];
    for g in LandUseGroup::ALL {
        if Some(g) == base {
            continue;
        }
        names.push(g.as_str().to_string());
        cols.push(
            shares
                .iter()
                .map(|s| s.get(&g).copied().unwrap_or(0.0))
                .collect(),
        );
    }
    fit_ols(deviations, &Design::new(names, cols)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn normal_equations(x: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
        let xt = x.transpose();
        let inv = (&xt * x).try_inverse().unwrap();
        (inv * xt * DVector::from_column_slice(y))
            .iter()
            .copied()
            .collect()
    }

    #[test]
    fn exact_fit_has_unit_r2() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let d = Design::new(vec!["constant".into(), "x".into()], vec![vec![1.0; 10], x]).unwrap();
        let f = fit_ols(&y, &d).unwrap();
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.residuals.iter().all(|r| r.abs() < 1e-12));
        assert!((f.coefficients[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_instances_match_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let cols: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..24).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect();
            let y: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d = Design::new((0..4).map(|j| format!("x{j}")).collect(), cols).unwrap();
            let f = fit_ols(&y, &d).unwrap();
            let o = normal_equations(&d.x, &y);
            for (a, b) in f.coefficients.iter().zip(&o) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn full_share_set_is_collinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shares: Vec<BTreeMap<LandUseGroup, f64>> = (0..24)
            .map(|_| {
                let raw: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..1.0)).collect();
                let s: f64 = raw.iter().sum();
                LandUseGroup::ALL
                    .iter()
                    .zip(raw)
                    .map(|(&g, v)| (g, 100.0 * v / s))
                    .collect()
            })
            .collect();
        let dev: Vec<f64> = (0..24).map(|_| rng.gen_range(0.5..2.0)).collect();
        assert!(matches!(
            deviation_regression(&dev, &shares, None),
            Err(Error::Collinearity(_))
        ));
        let f = deviation_regression(&dev, &shares, Some(LandUseGroup::Vacant)).unwrap();
        assert_eq!(f.names.len(), 5);
        assert!(f.r_squared >= 0.0 && f.r_squared <= 1.0);
    }
}
