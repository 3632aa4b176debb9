use std::fmt::Write as _;

use super::binary::{two_sided_p, FitResult};
use super::ols::OlsResult;

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

fn pad_row(out: &mut String, label: &str, cells: &[String]) {
    let _ = write!(out, "{label:<34}");
    for c in cells {
        let _ = write!(out, "{c:>22}");
    }
    out.push('\n');
}

/// Side-by-side odds-ratio table: one column per fit, standard errors in
/// parentheses, stars at the 0.01, 0.05 and 0.10 levels.
pub fn format_fit_report(title: &str, fits: &[(String, FitResult)]) -> String {
    let mut vars: Vec<String> = Vec::new();
    for (_, f) in fits {
        for n in &f.names {
            if n != "constant" && !n.starts_with("year_") && !vars.contains(n) {
                vars.push(n.clone());
            }
        }
    }
    let cell = |f: &FitResult, name: &str| -> String {
        let Some(i) = f.names.iter().position(|n| n == name) else {
            return String::new();
        };
        let or = f.odds_ratios()[i];
        let se = f.odds_ratio_std_errors()[i];
        format!("{or:.3}{} ({se:.3})", stars(f.p_values()[i]))
    };
    let mut out = format!("{title}\n");
    pad_row(
        &mut out,
        "",
        &fits.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>(),
    );
    for v in &vars {
        pad_row(
            &mut out,
            v,
            &fits.iter().map(|(_, f)| cell(f, v)).collect::<Vec<_>>(),
        );
    }
    pad_row(
        &mut out,
        "Year fixed effect",
        &fits
            .iter()
            .map(|(_, f)| {
                if f.names.iter().any(|n| n.starts_with("year_")) {
                    "yes".into()
                } else {
                    "no".into()
                }
            })
            .collect::<Vec<_>>(),
    );
    pad_row(
        &mut out,
        "Constant",
        &fits
            .iter()
            .map(|(_, f)| cell(f, "constant"))
            .collect::<Vec<_>>(),
    );
    pad_row(
        &mut out,
        "Number of observations",
        &fits
            .iter()
            .map(|(_, f)| f.n_obs.to_string())
            .collect::<Vec<_>>(),
    );
    pad_row(
        &mut out,
        "AIC",
        &fits
            .iter()
            .map(|(_, f)| format!("{:.2}", f.aic))
            .collect::<Vec<_>>(),
    );
    pad_row(
        &mut out,
        "Log likelihood",
        &fits
            .iter()
            .map(|(_, f)| format!("{:.2}", f.log_likelihood))
            .collect::<Vec<_>>(),
    );
    out
}

/// Coefficient table for a least-squares fit.
pub fn format_ols_report(title: &str, fit: &OlsResult) -> String {
    let mut out = format!("{title}\n");
    for (i, n) in fit.names.iter().enumerate() {
        let b = fit.coefficients[i];
        let se = fit.std_errors[i];
        let p = two_sided_p(b / se);
        pad_row(&mut out, n, &[format!("{b:.3}{} ({se:.3})", stars(p))]);
    }
    pad_row(&mut out, "Number of observations", &[fit.n_obs.to_string()]);
    pad_row(&mut out, "R2", &[format!("{:.3}", fit.r_squared)]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Link;

    #[test]
    fn star_levels() {
        assert_eq!(stars(0.001), "***");
        assert_eq!(stars(0.03), "**");
        assert_eq!(stars(0.07), "*");
        assert_eq!(stars(0.5), "");
    }

    #[test]
    fn report_layout() {
        let f = FitResult {
            link: Link::Logit,
            names: vec!["constant".into(), "scenicness".into(), "year_2010".into()],
            coefficients: vec![1.0, -0.25, 0.1],
            std_errors: vec![0.2, 0.05, 0.3],
            log_likelihood: -100.0,
            aic: 206.0,
            iterations: 5,
            converged: true,
            gradient_max_norm: 0.0,
            n_obs: 300,
        };
        let r = format_fit_report("wind", &[("Model 2".into(), f)]);
        assert!(r.contains("scenicness"));
        assert!(r.contains("0.779*** (0.039)"));
        assert!(r.contains("yes"));
        assert!(!r.contains("year_2010"));
        assert!(r.contains("206.00"));
    }
}
