use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erfc;

use super::linalg::{spd_inverse, Design};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
pub const LOGLIK_TOLERANCE: f64 = 1e-8;
/// Coefficients beyond this magnitude are taken as a sign of separation.
pub const SEPARATION_BOUND: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Logit,
    Probit,
}

impl Link {
    pub fn as_str(self) -> &'static str {
        match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub link: Link,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Max-norm of the score at the reported estimate.
    pub gradient_max_norm: f64,
    pub n_obs: usize,
}

impl FitResult {
    pub fn n_params(&self) -> usize {
        self.coefficients.len()
    }

    pub fn odds_ratios(&self) -> Vec<f64> {
        self.coefficients.iter().map(|b| b.exp()).collect()
    }

    /// Standard errors of the odds ratios by the delta method.
    pub fn odds_ratio_std_errors(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(&self.std_errors)
            .map(|(b, se)| b.exp() * se)
            .collect()
    }

    /// Two-sided normal p-values of the coefficients.
    pub fn p_values(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(&self.std_errors)
            .map(|(b, se)| two_sided_p(b / se))
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<(f64, f64)> {
        let i = self.names.iter().position(|n| n == name)?;
        Some((self.coefficients[i], self.std_errors[i]))
    }
}

pub(crate) fn two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `φ(z)/Φ(z)`, switching to the asymptotic series deep in the left tail.
fn inverse_mills(z: f64) -> f64 {
    if z > -30.0 {
        norm_pdf(z) / norm_cdf(z)
    } else {
        let z2 = z * z;
        -z / (1.0 - 1.0 / z2 + 3.0 / (z2 * z2))
    }
}

fn ln_norm_cdf(z: f64) -> f64 {
    if z > -30.0 {
        norm_cdf(z).ln()
    } else {
        let z2 = z * z;
        -0.5 * z2 - (-z).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            + (1.0 - 1.0 / z2 + 3.0 / (z2 * z2)).ln()
    }
}

/// Log-likelihood, score and Hessian of a binary-response model at `beta`.
pub fn log_likelihood_parts(
    design: &Design,
    y: &[f64],
    beta: &DVector<f64>,
    link: Link,
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let x = &design.x;
    let eta = x * beta;
    let k = x.ncols();
    let mut ll = 0.0;
    let mut grad = DVector::zeros(k);
    let mut w = DVector::zeros(x.nrows());
    let mut resid = DVector::zeros(x.nrows());
    for (i, (&e, &yi)) in eta.iter().zip(y).enumerate() {
        match link {
            Link::Logit => {
                ll += yi * e - softplus(e);
                let p = 1.0 / (1.0 + (-e).exp());
                resid[i] = yi - p;
                w[i] = p * (1.0 - p);
            }
            Link::Probit => {
                let q = 2.0 * yi - 1.0;
                ll += ln_norm_cdf(q * e);
                let lambda = q * inverse_mills(q * e);
                resid[i] = lambda;
                w[i] = lambda * (lambda + e);
            }
        }
    }
    grad.gemv_tr(1.0, x, &resid, 0.0);
    let mut hess = DMatrix::zeros(k, k);
    for (r, wi) in w.iter().enumerate() {
        let row = x.row(r);
        for a in 0..k {
            let xa = row[a] * wi;
            if xa == 0.0 {
                continue;
            }
            for b in a..k {
                hess[(a, b)] -= xa * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            hess[(a, b)] = hess[(b, a)];
        }
    }
    (ll, grad, hess)
}

pub fn log_likelihood(design: &Design, y: &[f64], beta: &[f64], link: Link) -> f64 {
    log_likelihood_parts(design, y, &DVector::from_column_slice(beta), link).0
}

/// Maximum-likelihood fit by Newton-Raphson with step halving.
///
/// Stops when the log-likelihood changes by less than [`LOGLIK_TOLERANCE`]
/// or after [`MAX_ITERATIONS`]. Standard errors come from the inverse of the
/// observed information.
pub fn fit_binary(design: &Design, y: &[f64], link: Link) -> Result<FitResult> {
    if y.len() != design.n_obs() {
        return Err(Error::InvalidInput(
            "outcome and design lengths differ".into(),
        ));
    }
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidInput("outcomes must be 0 or 1".into()));
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::Separation("constant".into()));
    }
    design.ensure_full_rank()?;

    let k = design.n_params();
    let mut beta = DVector::zeros(k);
    let (mut ll, mut grad, mut hess) = log_likelihood_parts(design, y, &beta, link);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let info = -&hess;
        let step = match nalgebra::linalg::Cholesky::new(info) {
            Some(c) => c.solve(&grad),
            None => return Err(Error::Separation(separating_name(design, &beta))),
        };
        let mut t = 1.0;
        let (mut cand, mut parts);
        loop {
            cand = &beta + &step * t;
            parts = log_likelihood_parts(design, y, &cand, link);
            if parts.0 >= ll - 1e-12 * ll.abs() || t < 1e-10 {
                break;
            }
            t *= 0.5;
        }
        if let Some(j) = cand.iter().position(|b| b.abs() > SEPARATION_BOUND) {
            return Err(Error::Separation(design.names[j].clone()));
        }
        let delta = (parts.0 - ll).abs();
        beta = cand;
        (ll, grad, hess) = parts;
        if delta < LOGLIK_TOLERANCE {
            converged = true;
            break;
        }
    }
    let cov =
        spd_inverse(&(-&hess)).ok_or_else(|| Error::Separation(separating_name(design, &beta)))?;
    let std_errors = (0..k).map(|j| cov[(j, j)].sqrt()).collect();
    Ok(FitResult {
        link,
        names: design.names.clone(),
        coefficients: beta.iter().copied().collect(),
        std_errors,
        log_likelihood: ll,
        aic: 2.0 * k as f64 - 2.0 * ll,
        iterations,
        converged,
        gradient_max_norm: grad.amax(),
        n_obs: design.n_obs(),
    })
}

fn separating_name(design: &Design, beta: &DVector<f64>) -> String {
    design.names[beta.iamax()].clone()
}
