use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::csvio;
use crate::error::{Error, Result};

/// The thirteen land-use classes of the national land-use statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LandUseCategory {
    Residential,
    ResidentialGardens,
    CommunityService,
    IndustryAndCommerce,
    DefenceBuildings,
    UnknownDevelopedUse,
    MineralsAndLandfill,
    TransportAndUtilities,
    OutdoorRecreation,
    Agriculture,
    ForestOpenLandAndWater,
    UndevelopedLand,
    Vacant,
}

impl LandUseCategory {
    pub const ALL: [LandUseCategory; 13] = [
        Self::Residential,
        Self::ResidentialGardens,
        Self::CommunityService,
        Self::IndustryAndCommerce,
        Self::DefenceBuildings,
        Self::UnknownDevelopedUse,
        Self::MineralsAndLandfill,
        Self::TransportAndUtilities,
        Self::OutdoorRecreation,
        Self::Agriculture,
        Self::ForestOpenLandAndWater,
        Self::UndevelopedLand,
        Self::Vacant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Residential => "residential",
            Self::ResidentialGardens => "residential_gardens",
            Self::CommunityService => "community_service",
            Self::IndustryAndCommerce => "industry_and_commerce",
            Self::DefenceBuildings => "defence_buildings",
            Self::UnknownDevelopedUse => "unknown_developed_use",
            Self::MineralsAndLandfill => "minerals_and_landfill",
            Self::TransportAndUtilities => "transport_and_utilities",
            Self::OutdoorRecreation => "outdoor_recreation",
            Self::Agriculture => "agriculture",
            Self::ForestOpenLandAndWater => "forest_open_land_and_water",
            Self::UndevelopedLand => "undeveloped_land",
            Self::Vacant => "vacant",
        }
    }

    pub fn group(self) -> LandUseGroup {
        use LandUseCategory::*;
        match self {
            Residential => LandUseGroup::Residential,
            CommunityService | IndustryAndCommerce | DefenceBuildings => LandUseGroup::Commercial,
            UndevelopedLand | Vacant => LandUseGroup::Vacant,
            Agriculture | ForestOpenLandAndWater | ResidentialGardens => {
                LandUseGroup::AgricultureAndForest
            }
            UnknownDevelopedUse
            | MineralsAndLandfill
            | TransportAndUtilities
            | OutdoorRecreation => LandUseGroup::Other,
        }
    }
}

impl fmt::Display for LandUseCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LandUseCategory {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown land-use category `{s}`")))
    }
}

/// Aggregated land-use groups used in the deviation regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LandUseGroup {
    Residential,
    Commercial,
    Vacant,
    AgricultureAndForest,
    Other,
}

impl LandUseGroup {
    pub const ALL: [LandUseGroup; 5] = [
        Self::Residential,
        Self::Commercial,
        Self::Vacant,
        Self::AgricultureAndForest,
        Self::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Residential => "residential",
            Self::Commercial => "commercial",
            Self::Vacant => "vacant",
            Self::AgricultureAndForest => "agriculture_forest",
            Self::Other => "other",
        }
    }
}

impl FromStr for LandUseGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown land-use group `{s}`")))
    }
}

/// Per-region deviations with their land-use category shares.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareTable {
    pub regions: Vec<String>,
    pub deviations: Vec<f64>,
    pub shares: Vec<BTreeMap<LandUseCategory, f64>>,
}

/// Reads `region,deviation,<category>...` where each category column is
/// named like [`LandUseCategory::as_str`]; absent categories count as zero.
pub fn parse_share_table(text: &str, source: &Path) -> Result<ShareTable> {
    let mut rdr = csvio::reader_from_str(text);
    let headers = rdr.headers()?.clone();
    let region = csvio::column(&headers, "region", source)?;
    let deviation = csvio::column(&headers, "deviation", source)?;
    let mut cats = Vec::new();
    for (j, h) in headers.iter().enumerate() {
        if j != region && j != deviation {
            let cat = h
                .parse::<LandUseCategory>()
                .map_err(|e| Error::parse(source, 1, e.to_string()))?;
            cats.push((j, cat));
        }
    }
    let mut out = ShareTable {
        regions: Vec::new(),
        deviations: Vec::new(),
        shares: Vec::new(),
    };
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        out.regions.push(csvio::field(&rec, region).to_string());
        out.deviations
            .push(csvio::parse_f64(&rec, deviation, source, line)?);
        let mut m = BTreeMap::new();
        for &(j, cat) in &cats {
            m.insert(cat, csvio::parse_f64(&rec, j, source, line)?);
        }
        out.shares.push(m);
    }
    Ok(out)
}

pub fn read_share_table(path: &Path) -> Result<ShareTable> {
    parse_share_table(&csvio::read_to_string(path)?, path)
}

/// Sums category shares into the five groups. Missing categories count as
/// zero.
pub fn aggregate_landuse(
    shares: &BTreeMap<LandUseCategory, f64>,
) -> Result<BTreeMap<LandUseGroup, f64>> {
    let mut out: BTreeMap<LandUseGroup, f64> =
        LandUseGroup::ALL.iter().map(|&g| (g, 0.0)).collect();
    for (&cat, &v) in shares {
        if !(v >= 0.0) {
            return Err(Error::Data(format!("negative share {v} for {cat}")));
        }
        *out.get_mut(&cat.group()).expect("all groups present") += v;
    }
    Ok(out)
}
