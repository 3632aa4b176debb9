use std::fmt::Write as _;
use std::path::Path;

use crate::csvio;
use crate::error::{Error, Result};
use crate::numfmt::sig6;

/// One site offered to a cost curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSite {
    pub site_id: String,
    pub energy_twh: f64,
    pub lcoe: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostCurvePoint {
    pub cumulative_twh: f64,
    pub lcoe: f64,
    pub site_id: String,
}

/// Sorts sites by LCOE (ties by id) and accumulates their energy. Sites with
/// zero energy add nothing to the curve and are dropped so the cumulative
/// column is strictly increasing.
pub fn cost_curve(sites: &[CurveSite]) -> Result<Vec<CostCurvePoint>> {
    for s in sites {
        if !s.lcoe.is_finite() {
            return Err(Error::InvalidInput(format!(
                "site {} has non-finite LCOE",
                s.site_id
            )));
        }
        if !(s.energy_twh >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "site {} has negative energy {}",
                s.site_id, s.energy_twh
            )));
        }
    }
    let mut order: Vec<&CurveSite> = sites.iter().filter(|s| s.energy_twh > 0.0).collect();
    order.sort_by(|a, b| {
        a.lcoe
            .total_cmp(&b.lcoe)
            .then_with(|| a.site_id.cmp(&b.site_id))
    });
    let mut cum = 0.0;
    Ok(order
        .into_iter()
        .map(|s| {
            cum += s.energy_twh;
            CostCurvePoint {
                cumulative_twh: cum,
                lcoe: s.lcoe,
                site_id: s.site_id.clone(),
            }
        })
        .collect())
}

/// `cumulative_TWh,lcoe_GBP_per_kWh,site_id`
pub fn write_curve_csv(points: &[CostCurvePoint]) -> String {
    let mut s = String::from("cumulative_TWh,lcoe_GBP_per_kWh,site_id\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{}",
            sig6(p.cumulative_twh),
            sig6(p.lcoe),
            p.site_id
        );
    }
    s
}

/// Reads a curve written by [`write_curve_csv`], checking its ordering.
/// Equal neighbours are accepted because printing at six significant digits
/// can merge cumulative values of large curves; a decrease is an error.
pub fn parse_curve_csv(text: &str, source: &Path) -> Result<Vec<CostCurvePoint>> {
    let mut rdr = csvio::reader_from_str(text);
    let headers = rdr.headers()?.clone();
    let cum = csvio::column(&headers, "cumulative_TWh", source)?;
    let lc = csvio::column(&headers, "lcoe_GBP_per_kWh", source)?;
    let id = csvio::column(&headers, "site_id", source)?;
    let mut out: Vec<CostCurvePoint> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let p = CostCurvePoint {
            cumulative_twh: csvio::parse_f64(&rec, cum, source, line)?,
            lcoe: csvio::parse_f64(&rec, lc, source, line)?,
            site_id: csvio::field(&rec, id).to_string(),
        };
        if let Some(prev) = out.last() {
            if p.cumulative_twh < prev.cumulative_twh {
                return Err(Error::parse(source, line, "cumulative energy decreases"));
            }
        }
        out.push(p);
    }
    Ok(out)
}
