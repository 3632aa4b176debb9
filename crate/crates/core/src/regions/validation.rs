use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::csvio;
use crate::error::{Error, Result};
use crate::numfmt::sig6;

/// Factor applied to the external rooftop estimates before comparison.
pub const DEFAULT_EXTERNAL_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub region: String,
    pub own: f64,
    pub external: f64,
    /// `None` when the external value is zero.
    pub deviation: Option<f64>,
}

/// Mean, sample standard deviation, minimum and maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(Summary {
        n,
        mean,
        sd,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<DeviationRow>,
    pub summary: Option<Summary>,
    /// Regions with a zero external value.
    pub flagged: Vec<String>,
}

/// Reads a `region,value` CSV; a repeated region is an error.
pub fn parse_region_values(text: &str, source: &Path) -> Result<BTreeMap<String, f64>> {
    let mut rdr = csvio::reader_from_str(text);
    let h = rdr.headers()?.clone();
    let r = csvio::column(&h, "region", source)?;
    let v = csvio::column(&h, "value", source)?;
    let mut out = BTreeMap::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let key = csvio::field(&rec, r).to_string();
        let val = csvio::parse_f64(&rec, v, source, row + 2)?;
        if out.insert(key.clone(), val).is_some() {
            return Err(Error::parse(
                source,
                row + 2,
                format!("region {key} repeated"),
            ));
        }
    }
    Ok(out)
}

pub fn read_region_values(path: &Path) -> Result<BTreeMap<String, f64>> {
    parse_region_values(&csvio::read_to_string(path)?, path)
}

/// `region,value` rows in key order.
pub fn write_region_values(values: &BTreeMap<String, f64>) -> String {
    let mut s = String::from("region,value\n");
    for (k, v) in values {
        let _ = writeln!(s, "{k},{}", sig6(*v));
    }
    s
}

/// Deviation `own / (external · factor)` per region.
pub fn validation_compare(
    own: &BTreeMap<String, f64>,
    external: &BTreeMap<String, f64>,
    factor: f64,
) -> Result<ValidationReport> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "scaling factor {factor} must be positive"
        )));
    }
    if let Some(k) = own.keys().find(|k| !external.contains_key(*k)) {
        return Err(Error::Data(format!("region {k} has no external value")));
    }
    if let Some(k) = external.keys().find(|k| !own.contains_key(*k)) {
        return Err(Error::Data(format!("region {k} has no own value")));
    }
    let mut rows = Vec::with_capacity(own.len());
    let mut flagged = Vec::new();
    for (k, &o) in own {
        let e = external[k];
        let deviation = if e == 0.0 {
            flagged.push(k.clone());
            None
        } else {
            Some(o / (e * factor))
        };
        rows.push(DeviationRow {
            region: k.clone(),
            own: o,
            external: e,
            deviation,
        });
    }
    let devs: Vec<f64> = rows.iter().filter_map(|r| r.deviation).collect();
    Ok(ValidationReport {
        summary: summarize(&devs),
        rows,
        flagged,
    })
}

pub fn write_validation_csv(report: &ValidationReport) -> String {
    let mut s = String::from("region,own,external,deviation\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.region,
            sig6(r.own),
            sig6(r.external),
            r.deviation.map(sig6).unwrap_or_default()
        );
    }
    if let Some(m) = report.summary {
        let _ = writeln!(
            s,
            "\nstatistic,mean,sd,min,max\ndeviation,{},{},{},{}",
            sig6(m.mean),
            sig6(m.sd),
            sig6(m.min),
            sig6(m.max)
        );
    }
    s
}

/// Twenty-four city-level (own, external) rooftop estimates in GWh whose
/// deviations at the default factor have mean 0.97, standard deviation 0.30,
/// minimum 0.62 and maximum 1.99.
pub fn calibration_fixture() -> (BTreeMap<String, f64>, BTreeMap<String, f64>) {
    const N: usize = 24;
    const MEAN: f64 = 0.97;
    const SD: f64 = 0.30;
    const LO: f64 = 0.62;
    const HI: f64 = 1.99;
    let m = N - 2;
    // Interior values a + b·u with u a standardised right-skewed pattern,
    // chosen so the full set hits the target mean and sample variance.
    let raw: Vec<f64> = (0..m)
        .map(|i| (i as f64 / (m - 1) as f64).powi(2))
        .collect();
    let rm = raw.iter().sum::<f64>() / m as f64;
    let rs = (raw.iter().map(|r| (r - rm).powi(2)).sum::<f64>() / m as f64).sqrt();
    let u: Vec<f64> = raw.iter().map(|r| (r - rm) / rs).collect();
    let a = (N as f64 * MEAN - LO - HI) / m as f64;
    let ss_target = (N - 1) as f64 * SD * SD
        - (LO - MEAN).powi(2)
        - (HI - MEAN).powi(2)
        - m as f64 * (a - MEAN).powi(2);
    let b = (ss_target / m as f64).sqrt();
    let mut devs = vec![LO, HI];
    devs.extend(u.iter().map(|ui| a + b * ui));

    let mut own = BTreeMap::new();
    let mut external = BTreeMap::new();
    for (i, d) in devs.into_iter().enumerate() {
        let key = format!("city{:02}", i + 1);
        let ext = 40.0 + 13.0 * ((i * 7) % N) as f64;
        external.insert(key.clone(), ext);
        own.insert(key, d * ext * DEFAULT_EXTERNAL_FACTOR);
    }
    (own, external)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LcoeWeighting {
    #[default]
    Site,
    Energy,
}

impl LcoeWeighting {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "site" => Ok(Self::Site),
            "energy" => Ok(Self::Energy),
            other => Err(Error::Config(format!("unknown LCOE weighting `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenicLcoePoint {
    pub level: u8,
    pub n_sites: usize,
    pub mean_lcoe: Option<f64>,
}

/// Mean LCOE over all sites with scenicness at or below each integer level
/// 1..10. `sites` holds `(scenicness, lcoe, energy)`.
pub fn scenic_lcoe_curve(
    sites: &[(f64, f64, f64)],
    weighting: LcoeWeighting,
) -> Vec<ScenicLcoePoint> {
    (1..=10u8)
        .map(|level| {
            let l = f64::from(level);
            let (mut num, mut den, mut n) = (0.0, 0.0, 0usize);
            for &(s, lcoe, e) in sites {
                if s <= l {
                    let w = match weighting {
                        LcoeWeighting::Site => 1.0,
                        LcoeWeighting::Energy => e,
                    };
                    num += w * lcoe;
                    den += w;
                    n += 1;
                }
            }
            ScenicLcoePoint {
                level,
                n_sites: n,
                mean_lcoe: (den > 0.0).then(|| num / den),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(v: &[(&str, f64)]) -> BTreeMap<String, f64> {
        v.iter().map(|(k, x)| (k.to_string(), *x)).collect()
    }

    #[test]
    fn region_values_round_trip() {
        let m = map(&[("a", 1.5), ("b", 2.0)]);
        assert_eq!(
            parse_region_values(&write_region_values(&m), Path::new("v.csv")).unwrap(),
            m
        );
        assert!(parse_region_values("region,value\na,1\na,2\n", Path::new("v.csv")).is_err());
    }

    #[test]
    fn calibration_identity() {
        let ext = map(&[("a", 10.0), ("b", 3.0)]);
        let own = map(&[("a", 80.0), ("b", 24.0)]);
        let r = validation_compare(&own, &ext, 8.0).unwrap();
        assert!(r.rows.iter().all(|x| x.deviation == Some(1.0)));
    }

    #[test]
    fn unit_factor_quotient() {
        let r = validation_compare(&map(&[("a", 40.0)]), &map(&[("a", 10.0)]), 1.0).unwrap();
        assert_eq!(r.rows[0].deviation, Some(4.0));
    }

    #[test]
    fn zero_external_is_flagged() {
        let r = validation_compare(
            &map(&[("a", 4.0), ("b", 8.0)]),
            &map(&[("a", 0.0), ("b", 1.0)]),
            8.0,
        )
        .unwrap();
        assert_eq!(r.flagged, vec!["a".to_string()]);
        assert_eq!(r.summary.unwrap().n, 1);
    }

    #[test]
    fn key_mismatch_and_bad_factor() {
        assert!(validation_compare(&map(&[("a", 1.0)]), &map(&[("b", 1.0)]), 8.0).is_err());
        assert!(validation_compare(&map(&[]), &map(&[]), 0.0).is_err());
    }

    #[test]
    fn fixture_summary() {
        let (own, ext) = calibration_fixture();
        assert_eq!(own.len(), 24);
        let s = validation_compare(&own, &ext, DEFAULT_EXTERNAL_FACTOR)
            .unwrap()
            .summary
            .unwrap();
        assert!((s.mean - 0.97).abs() < 1e-9);
        assert!((s.sd - 0.30).abs() < 1e-9);
        assert!((s.min - 0.62).abs() < 1e-12);
        assert!((s.max - 1.99).abs() < 1e-12);
    }

    #[test]
    fn scenic_curve_weights() {
        let sites = [(1.5, 0.05, 1.0), (3.0, 0.07, 3.0), (9.5, 0.10, 1.0)];
        let c = scenic_lcoe_curve(&sites, LcoeWeighting::Site);
        assert_eq!(c[0].mean_lcoe, None);
        assert_eq!(c[1].n_sites, 1);
        assert!((c[2].mean_lcoe.unwrap() - 0.06).abs() < 1e-15);
        assert!((c[9].mean_lcoe.unwrap() - 0.22 / 3.0).abs() < 1e-15);
        let e = scenic_lcoe_curve(&sites, LcoeWeighting::Energy);
        assert!((e[2].mean_lcoe.unwrap() - (0.05 + 0.21) / 4.0).abs() < 1e-15);
    }
}
