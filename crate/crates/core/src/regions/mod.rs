//! Local-authority regions: record linking, aggregation, wind/PV overlap,
//! validation against external estimates and scenicness-LCOE summaries.

mod aggregate;
mod link;
mod overlap;
mod validation;

pub use aggregate::{aggregate_to_la, write_la_csv, LaAggregate, LaRow};
pub use link::{
    link_records, normalize_postcode, parse_link_keys, read_link_keys, read_postcode_lookup,
    write_link_results, LinkKey, LinkOutcome, PostcodeLookup, RejectReason,
};
pub use overlap::{
    overlap_analysis, write_overlap_csv, LandCoverTag, OverlapMode, OverlapReport, OverlapRow,
};
pub use validation::{
    calibration_fixture, parse_region_values, read_region_values, scenic_lcoe_curve, summarize,
    validation_compare, write_region_values, write_validation_csv, DeviationRow, LcoeWeighting,
    ScenicLcoePoint, Summary, ValidationReport, DEFAULT_EXTERNAL_FACTOR,
};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::csvio;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LaRegion {
    pub code: String,
    pub name: String,
    pub area_km2: f64,
}

/// Local authorities keyed by their nine-character code.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaTable {
    regions: BTreeMap<String, LaRegion>,
}

impl LaTable {
    pub fn new(regions: Vec<LaRegion>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for r in regions {
            if r.code.chars().count() != 9 || !r.code.chars().all(|c| c.is_ascii_alphanumeric()) {
                return Err(Error::Data(format!(
                    "LA code `{}` is not nine alphanumeric characters",
                    r.code
                )));
            }
            if !(r.area_km2 > 0.0) {
                return Err(Error::Data(format!(
                    "LA {} has non-positive area {}",
                    r.code, r.area_km2
                )));
            }
            let code = r.code.clone();
            if map.insert(code.clone(), r).is_some() {
                return Err(Error::Data(format!("duplicate LA code {code}")));
            }
        }
        Ok(Self { regions: map })
    }

    pub fn get(&self, code: &str) -> Option<&LaRegion> {
        self.regions.get(code)
    }

    pub fn contains(&self, code: &str) -> bool {
        self.regions.contains_key(code)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LaRegion> {
        self.regions.values()
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// `code,name,area_km2`
    pub fn parse_csv(text: &str, source: &Path) -> Result<Self> {
        let mut rdr = csvio::reader_from_str(text);
        let h = rdr.headers()?.clone();
        let c = csvio::column(&h, "code", source)?;
        let n = csvio::column(&h, "name", source)?;
        let a = csvio::column(&h, "area_km2", source)?;
        let mut rows = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            rows.push(LaRegion {
                code: csvio::field(&rec, c).to_string(),
                name: csvio::field(&rec, n).to_string(),
                area_km2: csvio::parse_f64(&rec, a, source, row + 2)?,
            });
        }
        Self::new(rows)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::parse_csv(&csvio::read_to_string(path)?, path)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("code,name,area_km2\n");
        for r in self.iter() {
            let _ = writeln!(s, "{},{},{}", r.code, r.name, r.area_km2);
        }
        s
    }
}
