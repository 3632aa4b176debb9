//! Levelised cost of electricity and cost-potential curves.

mod curve;

pub use curve::{cost_curve, parse_curve_csv, write_curve_csv, CostCurvePoint, CurveSite};

use crate::error::{Error, Result};

pub const DEFAULT_INTEREST: f64 = 0.08;

/// Operation and maintenance cost, either per unit of capacity or per unit
/// of energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmCost {
    /// £/kW·yr
    PerKwYear(f64),
    /// £/kWh
    PerKwh(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconParams {
    /// £/kW
    pub investment: f64,
    pub om: OmCost,
    pub lifetime_years: u32,
    pub interest: f64,
}

impl EconParams {
    pub fn ground_pv() -> Self {
        Self {
            investment: 500.0,
            om: OmCost::PerKwYear(8.0),
            lifetime_years: 20,
            interest: DEFAULT_INTEREST,
        }
    }

    pub fn rooftop_pv() -> Self {
        Self {
            investment: 1130.0,
            om: OmCost::PerKwYear(9.57),
            lifetime_years: 20,
            interest: DEFAULT_INTEREST,
        }
    }

    pub fn wind() -> Self {
        Self {
            investment: 1050.0,
            om: OmCost::PerKwh(0.02),
            lifetime_years: 20,
            interest: DEFAULT_INTEREST,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lifetime_years < 1 {
            return Err(Error::InvalidInput(
                "lifetime must be at least one year".into(),
            ));
        }
        if !(self.interest >= 0.0 && self.interest.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "interest rate {} must be non-negative",
                self.interest
            )));
        }
        let om = match self.om {
            OmCost::PerKwYear(v) | OmCost::PerKwh(v) => v,
        };
        if !(self.investment >= 0.0 && om >= 0.0) {
            return Err(Error::InvalidInput("costs must be non-negative".into()));
        }
        Ok(())
    }

    /// Same economics with a different investment cost.
    pub fn with_investment(self, investment: f64) -> Self {
        Self { investment, ..self }
    }
}

/// Present value of one unit per year over `n` years at rate `i`.
pub fn annuity_factor(interest: f64, lifetime_years: u32) -> f64 {
    let n = f64::from(lifetime_years);
    if interest == 0.0 {
        n
    } else {
        (1.0 - (1.0 + interest).powf(-n)) / interest
    }
}

/// LCOE in £/kWh for a plant producing `energy` kWh per kW per year.
///
/// Discounted capacity costs `I₀ + M·AF` are spread over discounted energy
/// `E·AF`; energy-proportional O&M is added on top.
pub fn lcoe(params: &EconParams, energy_kwh_per_kw: f64) -> Result<f64> {
    if !(energy_kwh_per_kw > 0.0) {
        return Err(Error::UndefinedLcoe(energy_kwh_per_kw));
    }
    params.validate()?;
    let af = annuity_factor(params.interest, params.lifetime_years);
    let (fixed, variable) = match params.om {
        OmCost::PerKwYear(m) => (m, 0.0),
        OmCost::PerKwh(m) => (0.0, m),
    };
    Ok((params.investment + fixed * af) / (energy_kwh_per_kw * af) + variable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn discounted_sum(i: f64, n: u32) -> f64 {
        (1..=n).map(|t| 1.0 / (1.0 + i).powi(t as i32)).sum()
    }

    #[test]
    fn annuity_matches_discounted_sum() {
        assert!((annuity_factor(0.08, 20) - 9.8181).abs() < 1e-4);
        assert!((annuity_factor(0.08, 20) - discounted_sum(0.08, 20)).abs() < 1e-12);
        assert_eq!(annuity_factor(0.0, 7), 7.0);
    }

    #[test]
    fn ground_pv_anchor() {
        let v = lcoe(&EconParams::ground_pv(), 982.0).unwrap();
        assert!((v - 0.060).abs() < 0.0005, "{v}");
    }

    #[test]
    fn wind_example() {
        let v = lcoe(&EconParams::wind(), 2500.0).unwrap();
        let oracle = 1050.0 / (discounted_sum(0.08, 20) * 2500.0) + 0.02;
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.0628).abs() < 5e-5);
    }

    #[test]
    fn undiscounted_single_year() {
        let p = EconParams {
            investment: 100.0,
            om: OmCost::PerKwYear(0.0),
            lifetime_years: 1,
            interest: 0.0,
        };
        assert!((lcoe(&p, 100.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn undefined_without_energy() {
        assert!(matches!(
            lcoe(&EconParams::wind(), 0.0),
            Err(Error::UndefinedLcoe(_))
        ));
        assert!(lcoe(&EconParams::wind(), -5.0).is_err());
    }

    #[test]
    fn bad_params_rejected() {
        let p = EconParams {
            lifetime_years: 0,
            ..EconParams::wind()
        };
        assert!(lcoe(&p, 1000.0).is_err());
        let p = EconParams {
            interest: -0.1,
            ..EconParams::wind()
        };
        assert!(lcoe(&p, 1000.0).is_err());
    }

    fn params() -> impl Strategy<Value = EconParams> {
        (
            1.0f64..3000.0,
            0.0f64..50.0,
            1u32..40,
            0.0f64..0.2,
            any::<bool>(),
        )
            .prop_map(|(inv, om, n, i, per_kwh)| EconParams {
                investment: inv,
                om: if per_kwh {
                    OmCost::PerKwh(om / 1000.0)
                } else {
                    OmCost::PerKwYear(om)
                },
                lifetime_years: n,
                interest: i,
            })
    }

    proptest! {
        #[test]
        fn decreasing_in_energy(p in params(), e in 100.0f64..5000.0, de in 1.0f64..1000.0) {
            prop_assert!(lcoe(&p, e + de).unwrap() < lcoe(&p, e).unwrap());
        }

        #[test]
        fn increasing_in_investment(p in params(), e in 100.0f64..5000.0, di in 1.0f64..1000.0) {
            let q = p.with_investment(p.investment + di);
            prop_assert!(lcoe(&q, e).unwrap() > lcoe(&p, e).unwrap());
        }

        #[test]
        fn zero_interest_closed_form(inv in 0.0f64..3000.0, m in 0.0f64..50.0, n in 1u32..40, e in 100.0f64..5000.0) {
            let p = EconParams { investment: inv, om: OmCost::PerKwYear(m), lifetime_years: n, interest: 0.0 };
            let expect = (inv / f64::from(n) + m) / e;
            prop_assert!((lcoe(&p, e).unwrap() - expect).abs() <= 1e-12 * expect.max(1e-12));
        }

        #[test]
        fn currency_scale_invariance(p in params(), e in 100.0f64..5000.0, k in 0.01f64..100.0) {
            let scaled = EconParams {
                investment: p.investment / k,
                om: match p.om { OmCost::PerKwh(v) => OmCost::PerKwh(v / k), OmCost::PerKwYear(v) => OmCost::PerKwYear(v / k) },
                ..p
            };
            let a = lcoe(&p, e).unwrap() / k;
            prop_assert!((lcoe(&scaled, e).unwrap() - a).abs() <= 1e-12 * a.max(1e-12));
        }
    }
}
